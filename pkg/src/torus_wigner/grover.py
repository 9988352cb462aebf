"""Grover search seen as a phase-space map."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import check_dimension
from .states import momentum_vector, pure
from .wigner import WignerGrid, wigner_of

TRAJECTORY_MAX_N = 64


@dataclass(frozen=True)
class GroverConfig:
    n: int
    marked: int
    initial_momentum: int = 0

    def __post_init__(self):
        n = check_dimension(self.n)
        if n & (n - 1):
            raise ValueError(f"Grover search needs N = 2^L, got {n}")
        if not 0 <= self.marked < n:
            raise ValueError(f"marked item {self.marked} outside [0, {n})")
        if not 0 <= self.initial_momentum < n:
            raise ValueError(f"initial momentum {self.initial_momentum} outside [0, {n})")

    @classmethod
    def from_qubits(cls, qubits: int, marked: int, initial_momentum: int = 0) -> "GroverConfig":
        return cls(2**qubits, marked, initial_momentum)


@dataclass(frozen=True, eq=False)
class GroverFrame:
    step: int
    rho: np.ndarray
    wigner: WignerGrid
    success_probability: float


def oracle(cfg: GroverConfig) -> np.ndarray:
    """U_o = I - 2|w><w| in the position basis."""
    u = np.eye(cfg.n, dtype=complex)
    u[cfg.marked, cfg.marked] = -1.0
    return u


def inversion(cfg: GroverConfig) -> np.ndarray:
    """U_k = I - 2|k><k| about the initial momentum state."""
    return np.eye(cfg.n, dtype=complex) - 2 * pure(momentum_vector(cfg.n, cfg.initial_momentum))


def grover_step(cfg: GroverConfig) -> np.ndarray:
    return inversion(cfg) @ oracle(cfg)


def grover_angle(n: int) -> float:
    return math.asin(1 / math.sqrt(n))


def closed_form_probability(n: int, steps: int) -> float:
    """sin^2((2t + 1) theta), sin theta = 1/sqrt(N)."""
    return math.sin((2 * steps + 1) * grover_angle(n)) ** 2


def default_steps(n: int) -> int:
    return int(round(math.pi * math.sqrt(n) / 4))


def floor_steps(n: int) -> int:
    return int(math.floor(math.pi * math.sqrt(n) / 4))


def run_grover(cfg: GroverConfig, steps: int | None = None) -> list[GroverFrame]:
    """Iterate U_G from |k>, capturing rho, W and P(marked) after every step."""
    if cfg.n > TRAJECTORY_MAX_N:
        raise ValueError(f"trajectory mode is limited to N <= {TRAJECTORY_MAX_N}")
    steps = default_steps(cfg.n) if steps is None else steps
    if steps < 0:
        raise ValueError("steps must be non-negative")
    u = grover_step(cfg)
    psi = momentum_vector(cfg.n, cfg.initial_momentum)
    frames = []
    for t in range(steps + 1):
        if t:
            psi = u @ psi
        rho = pure(psi)
        frames.append(GroverFrame(t, rho, wigner_of(rho), float(rho[cfg.marked, cfg.marked].real)))
    return frames
