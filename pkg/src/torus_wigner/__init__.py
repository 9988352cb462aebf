"""Discrete Wigner functions for quantum computers on a 2N x 2N phase-space torus."""
__version__ = "0.1.0"

from .core import PhasePoint, fourier, phase_point_op, reflection, shift_u, shift_v, translation
from .evolution import (
    ClassicalMap,
    UndefinedInterference,
    apply_classical_map,
    boolean_gate,
    cat_unitary,
    classicality_check,
    half_fourier,
    z_matrix,
)
from .grover import GroverConfig, grover_step, run_grover
from .states import StateSpec, make_state, parse_state_spec
from .tomography import (
    decompose_controlled_A,
    measure_wigner_point,
    scattering_circuit,
    wigner_tomography,
)
from .wigner import LineSpec, WignerGrid, inner_product, line_projector, state_from_wigner, wigner_of

__all__ = [
    "ClassicalMap",
    "GroverConfig",
    "LineSpec",
    "PhasePoint",
    "StateSpec",
    "UndefinedInterference",
    "WignerGrid",
    "apply_classical_map",
    "boolean_gate",
    "cat_unitary",
    "classicality_check",
    "decompose_controlled_A",
    "fourier",
    "grover_step",
    "half_fourier",
    "inner_product",
    "line_projector",
    "make_state",
    "measure_wigner_point",
    "parse_state_spec",
    "phase_point_op",
    "reflection",
    "run_grover",
    "scattering_circuit",
    "shift_u",
    "shift_v",
    "state_from_wigner",
    "translation",
    "wigner_of",
    "wigner_tomography",
    "z_matrix",
]
