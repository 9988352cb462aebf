"""Discrete Wigner functions on G_2N and the phase-space geometry around them."""
from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .core import PhasePoint, check_dimension, phase_point_op, phase_point_stack

IMAG_TOL = 1e-12
GAMMA_MAX_N = 8


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """W(q, p) for all (q, p) in G_2N; ``values[q, p]``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 4:
            raise ValueError(f"grid must be 2N x 2N with N even, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0] // 2

    def __getitem__(self, alpha) -> float:
        q, p = PhasePoint(*alpha).normalized(self.n)
        return float(self.values[q, p])


def _sign_table(n: int) -> np.ndarray:
    """sign[sq, sp, q, p] = (-1)^(sp q + sq p + sq sp N) for (q, p) in G_N."""
    q = np.arange(n)[:, None]
    p = np.arange(n)[None, :]
    out = np.empty((2, 2, n, n))
    for sq in (0, 1):
        for sp in (0, 1):
            out[sq, sp] = (-1.0) ** ((sp * q + sq * p + sq * sp * n) % 2)
    return out


def extend_from_subgrid(sub: np.ndarray) -> np.ndarray:
    """Fill the redundant 3N^2 values of G_2N from the N x N block G_N."""
    n = sub.shape[0]
    signs = _sign_table(n)
    full = np.empty((2 * n, 2 * n), dtype=sub.dtype)
    for sq in (0, 1):
        for sp in (0, 1):
            full[sq * n:(sq + 1) * n, sp * n:(sp + 1) * n] = signs[sq, sp] * sub
    return full


def redundancy_residual(values: np.ndarray) -> float:
    """Max violation of the sign relations between the four N x N blocks."""
    values = np.asarray(values)
    n = values.shape[0] // 2
    return float(np.abs(extend_from_subgrid(values[:n, :n]) - values).max())


def wigner_of(rho: np.ndarray) -> WignerGrid:
    """W(alpha) = Tr(rho A(alpha)), evaluated on G_N and extended to G_2N.

    Uses W(q, p) = (1/2N) sum_k rho[q-k, k] exp(i pi p (2k - q) / N), which
    is Tr(rho A) written out in the position basis.
    """
    rho = np.asarray(rho, dtype=complex)
    n = check_dimension(rho.shape[0])
    k = np.arange(n)
    q = np.arange(n)[:, None]
    diag = rho[(q - k) % n, k]  # diag[q, k] = rho[q - k, k]
    # sum_k diag[q, k] exp(2 pi i p k / N) for p = 0..N-1
    summed = np.fft.ifft(diag, axis=1) * n
    p = np.arange(n)[None, :]
    sub = summed * np.exp(-1j * np.pi * ((p * q) % (2 * n)) / n) / (2 * n)
    if np.abs(sub.imag).max() >= IMAG_TOL:
        raise ValueError("Wigner function has an imaginary part; rho is not Hermitian")
    return WignerGrid(extend_from_subgrid(sub.real))


def state_from_wigner(grid: WignerGrid, full_grid: bool = False) -> np.ndarray:
    """Rebuild rho = 4N sum_{G_N} W A  (or N sum_{G_2N} W A with ``full_grid``)."""
    w = grid.values
    n = grid.n
    if redundancy_residual(w) > 1e-10:
        raise ValueError("grid violates the G_2N sign relations")
    side = 2 * n if full_grid else n
    weight = n if full_grid else 4 * n
    k = np.arange(n)
    rho = np.zeros((n, n), dtype=complex)
    for q in range(side):
        # sum_p W(q,p) A(q,p) = (1/2N) U^q R diag_k(sum_p W e^{i pi p q/N} e^{-2 pi i p k/N})
        p = np.arange(side)
        phases = np.exp(1j * np.pi * ((np.outer(p, q - 2 * k)) % (2 * n)) / n)
        d = w[q, :side] @ phases
        rho[(q - k) % n, k] += d
    rho *= weight / (2 * n)
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("reconstructed matrix is not Hermitian")
    return rho


def inner_product(w1: WignerGrid, w2: WignerGrid) -> float:
    """N sum_{G_2N} W1 W2, which equals Tr(rho1 rho2)."""
    if w1.n != w2.n:
        raise ValueError(f"dimension mismatch: {w1.n} vs {w2.n}")
    return float(w1.n * np.sum(w1.values * w2.values))


# --- lines ------------------------------------------------------------------

@dataclass(frozen=True)
class LineSpec:
    """Points (q, p) of G_2N with n1 p - n2 q = n3 (mod 2N)."""

    n1: int
    n2: int
    n3: int

    @classmethod
    def vertical(cls, q0: int) -> "LineSpec":
        return cls(0, -1, q0)

    @classmethod
    def horizontal(cls, p0: int) -> "LineSpec":
        return cls(1, 0, p0)

    def normalized(self, n: int) -> "LineSpec":
        side = 2 * n
        line = LineSpec(self.n1 % side, self.n2 % side, self.n3 % side)
        if line.n1 == 0 and line.n2 == 0:
            raise ValueError("line needs (n1, n2) != (0, 0)")
        return line


def _line_mask(n: int, line: LineSpec) -> np.ndarray:
    line = line.normalized(n)
    side = 2 * n
    q = np.arange(side)[:, None]
    p = np.arange(side)[None, :]
    return (line.n1 * p - line.n2 * q - line.n3) % side == 0


def line_points(n: int, line: LineSpec) -> list[PhasePoint]:
    n = check_dimension(n)
    qs, ps = np.nonzero(_line_mask(n, line))
    return [PhasePoint(int(q), int(p)) for q, p in zip(qs, ps)]


def line_sum(grid: WignerGrid, line: LineSpec) -> float:
    return float(grid.values[_line_mask(grid.n, line)].sum())


def line_projector(n: int, line: LineSpec, tol: float = 1e-10):
    """Return (A_L, d): the sum of A over the line and the dimension it projects onto.

    ``d`` is round(Tr A_L), cross-checked against the count of even-even
    points on the line divided by N.
    """
    n = check_dimension(n)
    pts = line_points(n, line)
    proj = np.zeros((n, n), dtype=complex)
    for alpha in pts:
        proj += phase_point_op(n, alpha)
    if np.abs(proj @ proj - proj).max() > tol or np.abs(proj - proj.conj().T).max() > tol:
        raise RuntimeError(f"line sum {line} is not a projector")
    trace = np.trace(proj).real
    dim = int(round(trace))
    if abs(trace - dim) > tol:
        raise RuntimeError(f"projector trace {trace} is not an integer")
    even = sum(1 for a in pts if a.is_even)
    if even % n or even // n != dim:
        raise RuntimeError(f"dimension {dim} disagrees with even-point count {even}/{n}")
    return proj, dim


def marginal(grid: WignerGrid, family: str = "position") -> np.ndarray:
    """Sums of W over the lines q = 2j (position) or p = 2j (momentum)."""
    w = grid.values
    if family == "position":
        return w[0::2, :].sum(axis=1)
    if family == "momentum":
        return w[:, 0::2].sum(axis=0)
    raise ValueError(f"unknown marginal family {family!r}")


# --- three-point function ---------------------------------------------------

def triangle_area(alpha, beta, gamma) -> int:
    """Signed doubled area (beta - alpha) x (gamma - alpha), i.e. in units of the unit-step triangle."""
    a, b, c = (PhasePoint(*x) for x in (alpha, beta, gamma))
    return (b.q - a.q) * (c.p - a.p) - (b.p - a.p) * (c.q - a.q)


def three_point(n: int, alpha, beta, gamma) -> complex:
    """Gamma(alpha, beta, gamma) = Tr(A(alpha) A(beta) A(gamma)) by direct trace."""
    return complex(np.trace(phase_point_op(n, alpha) @ phase_point_op(n, beta) @ phase_point_op(n, gamma)))


def three_point_closed_form(n: int, alpha, beta, gamma) -> complex:
    """Geometric form of Gamma for even N.

    Nonzero iff alpha + beta + gamma is even in both coordinates; then
    Gamma = exp(i pi S / N) / (4 N^3) with S the doubled triangle area.
    """
    a, b, c = (PhasePoint(*x) for x in (alpha, beta, gamma))
    if (a.q + b.q + c.q) % 2 or (a.p + b.p + c.p) % 2:
        return 0j
    s = triangle_area(a, b, c)
    return complex(np.exp(1j * np.pi * (s % (2 * n)) / n) / (4 * n**3))


@lru_cache(maxsize=4)
def _gamma_table(n: int) -> np.ndarray:
    ops = phase_point_stack(n)
    full = ops.reshape(4 * n * n, n, n)
    sub = ops[:n, :n].reshape(n * n, n, n)
    pairs = np.einsum("bij,cjk->bcik", sub, sub).reshape(n**4, n, n)
    # Tr(A_a P_bc) = sum_ij A_a[i,j] P_bc[j,i]
    table = full.reshape(4 * n * n, -1) @ pairs.transpose(0, 2, 1).reshape(n**4, -1).T
    table = table.reshape(4 * n * n, n * n, n * n)
    table.flags.writeable = False
    return table


def gamma_table(n: int) -> np.ndarray:
    """Gamma[a, b, c] for a in G_2N, b and c in G_N (flattened q-major); memoised."""
    n = check_dimension(n)
    if n > GAMMA_MAX_N:
        raise ValueError(f"three-point table refused for N={n} > {GAMMA_MAX_N}")
    return _gamma_table(n)


def purity_residual(grid: WignerGrid) -> float:
    """max_alpha |W(alpha) - 16 N^2 sum_{b,c in G_N} Gamma(alpha,b,c) W(b) W(c)|.

    Zero exactly for pure states.  The prefactor 16 N^2 follows from
    rho = 4N sum_{G_N} W A, squared.
    """
    n = grid.n
    table = gamma_table(n)
    wsub = grid.values[:n, :n].reshape(-1)
    quad = table @ wsub @ wsub
    return float(np.abs(grid.values.reshape(-1) - 16 * n * n * quad).max())


# --- serialisation ----------------------------------------------------------

def format_grid_csv(grid: WignerGrid) -> str:
    buf = io.StringIO()
    buf.write("q,p,w\n")
    side = 2 * grid.n
    for q in range(side):
        for p in range(side):
            buf.write(f"{q},{p},{grid.values[q, p]:.17g}\n")
    return buf.getvalue()


def write_grid_csv(grid: WignerGrid, path) -> None:
    Path(path).write_text(format_grid_csv(grid))


def parse_grid_csv(text: str) -> WignerGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "q,p,w":
        raise ValueError("grid CSV must start with header 'q,p,w'")
    rows = [ln.split(",") for ln in lines[1:]]
    side = int(round(np.sqrt(len(rows))))
    if side * side != len(rows):
        raise ValueError(f"grid CSV has {len(rows)} rows, not a square count")
    values = np.full((side, side), np.nan)
    for q, p, w in rows:
        values[int(q), int(p)] = float(w)
    if np.isnan(values).any():
        raise ValueError("grid CSV is missing points")
    return WignerGrid(values)


def read_grid_csv(path) -> WignerGrid:
    return parse_grid_csv(Path(path).read_text())
