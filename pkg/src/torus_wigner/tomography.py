"""Direct measurement of W(alpha) with an ancilla-controlled scattering circuit.

Register layout for circuits: system qubit i carries bit i of the position
label n; the ancilla is the most significant qubit, so joint basis index is
``ancilla * N + n``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import check_dimension, fourier, is_unitary, phase_point_op
from .wigner import WignerGrid, extend_from_subgrid

GENERATOR_ID = "numpy.Philox4x64-10"

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SZ = np.diag([1.0, -1.0]).astype(complex)
_SY = np.array([[0, -1j], [1j, 0]])
_SX = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class ScatteringResult:
    sigma_z: float
    sigma_y: float
    sigma_x: float = 0.0

    @property
    def derived_value(self) -> complex:
        """sigma_z - i sigma_y, equal to Tr(U rho)."""
        return complex(self.sigma_z, -self.sigma_y)


def controlled(u: np.ndarray) -> np.ndarray:
    """|0><0| (x) I + |1><1| (x) U with the ancilla as the high bit."""
    n = u.shape[0]
    out = np.eye(2 * n, dtype=complex)
    out[n:, n:] = u
    return out


def scattering_circuit(rho: np.ndarray, u: np.ndarray) -> ScatteringResult:
    """Run H, controlled-U, H on ancilla |0> with the system in ``rho``; exact expectations."""
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if rho.shape != u.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {u.shape}")
    if not is_unitary(u):
        raise ValueError("scattering circuit needs a unitary operator")
    n = rho.shape[0]
    eye = np.eye(n)
    had = np.kron(_H, eye)
    circuit = had @ controlled(u) @ had
    start = np.kron(np.diag([1.0, 0.0]), rho)
    final = circuit @ start @ circuit.conj().T

    def expect(pauli):
        return float(np.trace(np.kron(pauli, eye) @ final).real)

    result = ScatteringResult(expect(_SZ), expect(_SY), expect(_SX))
    overlap = np.trace(u @ rho)
    if abs(result.sigma_z - overlap.real) >= 1e-12 or abs(result.sigma_y + overlap.imag) >= 1e-12:
        raise RuntimeError("scattering circuit disagrees with Tr(U rho)")
    return result


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def measure_wigner_point(rho: np.ndarray, alpha, shots: int = 0, seed: int = 0) -> tuple[float, float]:
    """Estimate W(alpha) from ``shots`` single-run outcomes of the circuit with U = 2N A(alpha).

    Returns (estimate, standard error).  ``shots=0`` gives the exact value.
    """
    rho = np.asarray(rho, dtype=complex)
    n = check_dimension(rho.shape[0])
    if shots < 0:
        raise ValueError("shots must be non-negative")
    sz = scattering_circuit(rho, 2 * n * phase_point_op(n, alpha)).sigma_z
    if shots == 0:
        return sz / (2 * n), 0.0
    p_plus = min(1.0, max(0.0, (1 + sz) / 2))
    ups = make_rng(seed).binomial(shots, p_plus)
    mean = (2 * ups - shots) / shots
    stderr = math.sqrt(max(0.0, 1 - mean * mean) / shots)
    return mean / (2 * n), stderr / (2 * n)


def wigner_tomography(rho: np.ndarray, shots_per_point: int = 0, seed: int = 0,
                      workers: int | None = None, with_errors: bool = False):
    """Measure every point of G_N and extend to G_2N by the sign relations.

    Point (q, p) uses seed ``seed ^ (q N + p)``, so the result does not depend
    on evaluation order or worker count.
    """
    rho = np.asarray(rho, dtype=complex)
    n = check_dimension(rho.shape[0])
    points = [(q, p) for q in range(n) for p in range(n)]

    def one(pt):
        return measure_wigner_point(rho, pt, shots_per_point, seed ^ (pt[0] * n + pt[1]))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(pt) for pt in points]
    est = np.array([r[0] for r in results]).reshape(n, n)
    grid = WignerGrid(extend_from_subgrid(est))
    if with_errors:
        return grid, np.array([r[1] for r in results]).reshape(n, n)
    return grid


# --- gate networks ----------------------------------------------------------

GATE_KINDS = ("hadamard", "phase", "controlled_phase", "cnot", "fourier_block", "inverse_fourier_block")


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    control: int | None = None
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate {self.kind!r}")


@dataclass
class GateList:
    n_qubits: int
    gates: list = field(default_factory=list)

    def append(self, gate: Gate) -> None:
        used = list(gate.targets) + ([] if gate.control is None else [gate.control])
        if any(not 0 <= q < self.n_qubits for q in used):
            raise ValueError(f"gate {gate} touches a qubit outside 0..{self.n_qubits - 1}")
        self.gates.append(gate)

    def expanded(self) -> "GateList":
        """Replace Fourier blocks by Hadamard / controlled-phase / CNOT networks."""
        out = GateList(self.n_qubits)
        for g in self.gates:
            if g.kind == "fourier_block":
                for sub in fourier_network(g.targets):
                    out.append(sub)
            elif g.kind == "inverse_fourier_block":
                for sub in inverse_network(fourier_network(g.targets)):
                    out.append(sub)
            else:
                out.append(g)
        return out

    def unitary(self) -> np.ndarray:
        dim = 2**self.n_qubits
        m = np.eye(dim, dtype=complex)
        for g in self.gates:
            m = _apply(m, g, self.n_qubits)
        return m

    def __len__(self) -> int:
        return len(self.gates)


def _apply(m: np.ndarray, g: Gate, width: int) -> np.ndarray:
    """Left-multiply ``m`` (columns are states) by gate ``g``."""
    dim = m.shape[0]
    idx = np.arange(dim)
    if g.kind in ("fourier_block", "inverse_fourier_block"):
        ft = fourier(2 ** len(g.targets)) if len(g.targets) > 1 else _H
        if g.kind == "inverse_fourier_block":
            ft = ft.conj().T
        return _apply_register(m, ft, g.targets, width)
    t = g.targets[0]
    bit_t = (idx >> t) & 1
    ctrl = np.ones(dim, dtype=bool) if g.control is None else ((idx >> g.control) & 1).astype(bool)
    if g.kind == "hadamard":
        return _apply_register(m, _H, (t,), width)
    if g.kind in ("phase", "controlled_phase"):
        if g.kind == "controlled_phase" and g.control is None:
            raise ValueError("controlled_phase needs a control qubit")
        factor = np.where(ctrl & (bit_t == 1), np.exp(1j * g.angle), 1.0)
        return factor[:, None] * m
    # cnot
    flipped = np.where(ctrl, idx ^ (1 << t), idx)
    out = np.empty_like(m)
    out[flipped] = m
    return out


def _apply_register(m: np.ndarray, op: np.ndarray, targets, width: int) -> np.ndarray:
    """Apply ``op`` to the sub-register whose bit j is qubit ``targets[j]``."""
    dim = m.shape[0]
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=int)
    for j, t in enumerate(targets):
        local |= ((idx >> t) & 1) << j
    rest = idx.copy()
    for t in targets:
        rest &= ~(1 << t)
    # index of the basis state with the same "rest" bits and local value v
    def compose(v):
        out = rest.copy()
        for j, t in enumerate(targets):
            out |= ((v >> j) & 1) << t
        return out

    result = np.zeros_like(m)
    for v in range(op.shape[0]):
        src = compose(v)  # rows whose local value is v, aligned with idx
        # new[row with local=w] += op[w, v] * old[row with local=v]
        result += op[local, v][:, None] * m[src]
    return result


def fourier_network(targets) -> list[Gate]:
    """DFT exp(+2 pi i n k / M) on ``targets`` (bit j = targets[j]) from H, controlled phases and swaps."""
    targets = tuple(targets)
    size = len(targets)
    gates = []
    for j in reversed(range(size)):
        gates.append(Gate("hadamard", (targets[j],)))
        for m in reversed(range(j)):
            gates.append(Gate("controlled_phase", (targets[j],), control=targets[m],
                              angle=math.pi / 2 ** (j - m)))
    for j in range(size // 2):
        a, b = targets[j], targets[size - 1 - j]
        gates += [Gate("cnot", (b,), control=a), Gate("cnot", (a,), control=b), Gate("cnot", (b,), control=a)]
    return gates


def inverse_network(gates: list[Gate]) -> list[Gate]:
    return [Gate(g.kind, g.targets, g.control, -g.angle) for g in reversed(gates)]


def _controlled_v(gl: GateList, anc: int, width: int, power: int, n: int) -> None:
    for i in range(width):
        angle = 2 * math.pi * ((power * 2**i) % n) / n
        if angle:
            gl.append(Gate("controlled_phase", (i,), control=anc, angle=angle))


def decompose_controlled_A(n: int, alpha, expand: bool = False) -> GateList:
    """Gate network for controlled-(2N A(alpha)) = controlled-(U^q R V^-p) e^{i pi p q / N}.

    V^m acts qubit-wise, U^m = F^-1 V^m F, and R|n> = |-n> = U |NOT n>.
    Gates are listed in time order.
    """
    n = check_dimension(n)
    width = n.bit_length() - 1
    if 2**width != n:
        raise ValueError(f"gate decomposition needs N = 2^L, got {n}")
    q, p = (int(x) % (2 * n) for x in alpha)
    anc = width
    system = tuple(range(width))
    gl = GateList(width + 1)
    _controlled_v(gl, anc, width, -p, n)
    for i in system:
        gl.append(Gate("cnot", (i,), control=anc))
    gl.append(Gate("fourier_block", system))
    _controlled_v(gl, anc, width, q + 1, n)
    gl.append(Gate("inverse_fourier_block", system))
    angle = math.pi * ((p * q) % (2 * n)) / n
    if angle:
        gl.append(Gate("phase", (anc,), angle=angle))
    return gl.expanded() if expand else gl
