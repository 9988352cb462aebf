"""Phase-space propagation: the Z superoperator and maps with a classical picture."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    PhasePoint,
    check_dimension,
    fourier,
    is_unitary,
    phase_point_op,
    phase_point_stack,
    translation,
)
from .states import random_pure_state
from .wigner import WignerGrid, marginal, redundancy_residual, wigner_of

Z_MAX_N = 16
GAMMA_INVARIANCE_MAX_N = 4
# columns per conjugation batch; fixed so results do not depend on worker count
Z_CHUNK = 32


class UndefinedInterference(ValueError):
    """A strip permutation has no classical action on the grid's interference terms."""


# --- Z superoperator --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZMatrix:
    """Z[a, b] over G_2N x G_2N, points flattened q-major."""

    n: int
    entries: np.ndarray

    def apply(self, grid: WignerGrid) -> WignerGrid:
        if grid.n != self.n:
            raise ValueError(f"dimension mismatch: {grid.n} vs {self.n}")
        return WignerGrid((self.entries @ grid.values.reshape(-1)).reshape(2 * self.n, 2 * self.n))

    def row(self, alpha) -> np.ndarray:
        q, p = PhasePoint(*alpha).normalized(self.n)
        return self.entries[q * 2 * self.n + p].reshape(2 * self.n, 2 * self.n)

    def column(self, beta) -> np.ndarray:
        q, p = PhasePoint(*beta).normalized(self.n)
        return self.entries[:, q * 2 * self.n + p].reshape(2 * self.n, 2 * self.n)


def z_matrix(u: np.ndarray, workers: int | None = None) -> ZMatrix:
    """Z[a, b] = N Tr(A(a) U A(b) U^dagger), one conjugation per column b."""
    u = np.asarray(u, dtype=complex)
    n = check_dimension(u.shape[0], max_n=Z_MAX_N)
    if not is_unitary(u):
        raise ValueError("Z matrix needs a unitary operator")
    ops = phase_point_stack(n).reshape(4 * n * n, n, n)
    # Tr(A B) = sum_ij A[i,j] B[j,i]
    rows = ops.reshape(4 * n * n, n * n)

    def columns(lo: int, hi: int) -> np.ndarray:
        conj = u @ ops[lo:hi] @ u.conj().T
        return n * (rows @ conj.transpose(0, 2, 1).reshape(hi - lo, n * n).T)

    total = 4 * n * n
    bounds = [(lo, min(lo + Z_CHUNK, total)) for lo in range(0, total, Z_CHUNK)]
    if workers and workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: columns(*b), bounds))
    else:
        parts = [columns(*b) for b in bounds]
    z = np.concatenate(parts, axis=1)
    if np.abs(z.imag).max() > 1e-12:
        raise RuntimeError("Z matrix has a non-negligible imaginary part")
    return ZMatrix(n, z.real.copy())


def gamma_invariance_residual(u: np.ndarray) -> float:
    """max |sum Z Z Z Gamma - Gamma| over all triples of G_2N."""
    u = np.asarray(u, dtype=complex)
    n = check_dimension(u.shape[0], max_n=GAMMA_INVARIANCE_MAX_N)
    ops = phase_point_stack(n).reshape(4 * n * n, n, n)
    gamma = np.einsum("aij,bjk,cki->abc", ops, ops, ops)
    z = z_matrix(u).entries
    moved = np.einsum("xa,yb,zc,abc->xyz", z, z, z, gamma, optimize=True)
    return float(np.abs(moved - gamma).max())


def evolve_state(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if rho.shape != u.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {u.shape}")
    return u @ rho @ u.conj().T


# --- classical maps ---------------------------------------------------------

MAP_KINDS = ("translation", "reflection", "rotation90", "linear", "strip_permutation")


@dataclass(frozen=True)
class ClassicalMap:
    kind: str
    sigma: tuple = (0, 0)
    matrix: tuple = ((1, 0), (0, 1))
    perm: tuple = ()

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "strip_permutation" and sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation of 0..{len(self.perm) - 1}: {self.perm}")

    @classmethod
    def translation(cls, q: int, p: int) -> "ClassicalMap":
        return cls("translation", sigma=(int(q), int(p)))

    @classmethod
    def reflection(cls, q: int, p: int) -> "ClassicalMap":
        return cls("reflection", sigma=(int(q), int(p)))

    @classmethod
    def rotation90(cls) -> "ClassicalMap":
        return cls("rotation90")

    @classmethod
    def linear(cls, m) -> "ClassicalMap":
        m = np.asarray(m, dtype=int)
        return cls("linear", matrix=tuple(tuple(int(x) for x in row) for row in m))

    @classmethod
    def strip_permutation(cls, f) -> "ClassicalMap":
        return cls("strip_permutation", perm=tuple(int(x) for x in f))


# rotation by +90 degrees: the point (q, p) moves to (-p, q)
ROTATION90 = ((0, -1), (1, 0))


def affine_form(f) -> tuple[int, int] | None:
    """Return (c, a) with f(n) = c n + a mod N, or None if f is not affine."""
    n = len(f)
    a = f[0] % n
    c = (f[1] - f[0]) % n if n > 1 else 1
    if all((c * k + a) % n == f[k] % n for k in range(n)):
        return c, a
    return None


def _inverse_mod(m: np.ndarray, side: int) -> np.ndarray:
    det = int(round(np.linalg.det(m)))
    if det % side != 1:
        raise ValueError(f"linear map needs det = 1 mod {side}, got det {det}")
    a, b = m[0]
    c, d = m[1]
    return np.array([[d, -b], [-c, a]]) % side


def _pullback(values: np.ndarray, minv: np.ndarray, shift=(0, 0)) -> np.ndarray:
    """W'(alpha) = W(minv @ alpha + shift) on the 2N grid."""
    side = values.shape[0]
    q, p = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    sq = (minv[0, 0] * q + minv[0, 1] * p + shift[0]) % side
    sp = (minv[1, 0] * q + minv[1, 1] * p + shift[1]) % side
    return values[sq, sp]


def position_strip(n: int, k: int) -> np.ndarray:
    """Wigner grid of the computational state |k>: 1/2N on q = 2k, (-1)^p / 2N on q = 2k + N."""
    side = 2 * n
    w = np.zeros((side, side))
    w[(2 * k) % side, :] = 1 / side
    w[(2 * k + n) % side, :] = (-1.0) ** np.arange(side) / side
    return w


def _strip_map(values: np.ndarray, f: tuple, interference: str, tol: float) -> np.ndarray:
    n = values.shape[0] // 2
    if len(f) != n:
        raise ValueError(f"permutation has length {len(f)}, grid needs {n}")
    form = affine_form(f)
    if form is not None:
        c, a = form
        # strip q = 2k goes to 2(ck + a); momentum untouched
        cinv = pow(c, -1, 2 * n)
        minv = np.array([[cinv, 0], [0, 1]])
        return _pullback(values, minv, shift=((-2 * a * cinv) % (2 * n), 0))
    probs = marginal(WignerGrid(values), "position")
    direct = sum(probs[k] * position_strip(n, k) for k in range(n))
    leftover = np.abs(values - direct).max()
    if leftover > tol and interference == "raise":
        raise UndefinedInterference(
            f"non-affine permutation has no classical image for interference terms (size {leftover:.3g})"
        )
    return sum(probs[k] * position_strip(n, f[k]) for k in range(n))


def apply_classical_map(grid: WignerGrid, cmap: ClassicalMap, interference: str = "raise",
                        tol: float = 1e-12) -> WignerGrid:
    """Move grid values along a classical phase-space map.

    For a non-affine strip permutation, coherences between computational
    states have no classical image: ``interference="raise"`` signals
    :class:`UndefinedInterference`, ``"drop"`` maps the direct strips only.
    """
    w = grid.values
    side = w.shape[0]
    kind = cmap.kind
    if kind == "translation":
        s = np.array(cmap.sigma)
        out = _pullback(w, np.eye(2, dtype=int), shift=(-2 * s) % side)
    elif kind == "reflection":
        s = np.array(cmap.sigma)
        out = _pullback(w, -np.eye(2, dtype=int) % side, shift=(2 * s) % side)
    elif kind in ("rotation90", "linear"):
        m = np.array(ROTATION90 if kind == "rotation90" else cmap.matrix, dtype=int)
        out = _pullback(w, _inverse_mod(m, side))
    else:
        out = _strip_map(w, cmap.perm, interference, tol)
    if redundancy_residual(out) > 1e-12 * max(1.0, np.abs(w).max()):
        raise ValueError(f"{kind} map does not respect the G_2N sign relations")
    return WignerGrid(out)


# --- unitaries with a classical picture -------------------------------------

def cat_matrix(a: int, b: int) -> np.ndarray:
    """Torus automorphism transported by cat_unitary(a, b): U A(alpha) = A(M alpha) U."""
    return np.array([[a, 1], [a * b - 1, b]], dtype=int)


def is_chaotic(a: int, b: int) -> bool:
    return a + b > 2


def cat_unitary(n: int, a: int, b: int) -> np.ndarray:
    """U_cat = V_b T V_a with quadratic kicks in position (V) and momentum (T).

    Global phase fixed so that <0|U_cat|0> is real and positive.
    """
    n = check_dimension(n)
    k = np.arange(n)
    quad = (k * k) % (2 * n)

    def kick(j):
        return np.exp(-2j * np.pi * ((quad * (1 - j)) % (2 * n)) / (2 * n))

    ft = fourier(n)
    kinetic = ft @ np.diag(np.exp(-2j * np.pi * quad / (2 * n))) @ ft.conj().T
    u = kick(b)[:, None] * kinetic * kick(a)[None, :]
    phase = u[0, 0] / abs(u[0, 0])
    return u / phase


def boolean_gate(n: int, f, g=None) -> np.ndarray:
    """U_{f,g}|k> = exp(2 pi i g(k) / N) |f(k)>; ``g`` is a callable or sequence."""
    n = check_dimension(n)
    f = [f(k) for k in range(n)] if callable(f) else list(f)
    f = [int(x) % n for x in f]
    if len(f) != n or sorted(f) != list(range(n)):
        raise ValueError("f must be a bijection on 0..N-1")
    u = np.zeros((n, n), dtype=complex)
    for k in range(n):
        gk = 0 if g is None else (g(k) if callable(g) else g[k])
        u[f[k], k] = np.exp(2j * np.pi * (gk % n) / n)
    return u


def bit_flip(n: int, qubit: int = 0) -> np.ndarray:
    """NOT on one qubit of the position label: |k> -> |k xor 2^qubit>."""
    n = check_dimension(n)
    if n & (n - 1) or not 0 <= qubit < n.bit_length() - 1:
        raise ValueError(f"bit flip needs N = 2^L and 0 <= qubit < L, got N={n}, qubit={qubit}")
    return boolean_gate(n, [k ^ (1 << qubit) for k in range(n)])


def half_fourier(n: int) -> np.ndarray:
    """Identity on the most significant qubit, DFT of size N/2 on the rest."""
    if n % 2:
        raise ValueError("half Fourier needs even N")
    n = check_dimension(n)
    half = n // 2
    k = np.arange(half)
    small = np.exp(2j * np.pi * (np.outer(k, k) % half) / half) / np.sqrt(half)
    return np.kron(np.eye(2), small)


def classicality_check(u: np.ndarray, cmap: ClassicalMap, trials: int = 20, seed: int = 0) -> float:
    """Max deviation between quantum and classical propagation over random pure states."""
    u = np.asarray(u, dtype=complex)
    n = check_dimension(u.shape[0])
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        rho = random_pure_state(n, rng)
        quantum = wigner_of(u @ rho @ u.conj().T).values
        classical = apply_classical_map(wigner_of(rho), cmap, interference="drop").values
        worst = max(worst, float(np.abs(quantum - classical).max()))
    return worst


# --- CLI map grammar --------------------------------------------------------

def read_permutation(path) -> list[int]:
    return [int(line) for line in Path(path).read_text().split()]


def parse_map_spec(text: str, n: int):
    """Parse ``trans:q,p | refl:q,p | ft | cat:a,b | perm:@file | halfft | shift:a``.

    Returns (unitary, ClassicalMap or None).
    """
    n = check_dimension(n)
    head, _, body = text.strip().partition(":")
    args = [x.strip() for x in body.split(",")] if body else []
    try:
        if head == "trans" and len(args) == 2:
            q, p = map(int, args)
            return translation(n, q, p), ClassicalMap.translation(q, p)
        if head == "refl" and len(args) == 2:
            q, p = map(int, args)
            return 2 * n * phase_point_op(n, (q, p)), ClassicalMap.reflection(q, p)
        if head == "ft" and not args:
            return fourier(n), ClassicalMap.rotation90()
        if head == "cat" and len(args) == 2:
            a, b = map(int, args)
            return cat_unitary(n, a, b), ClassicalMap.linear(cat_matrix(a, b))
        if head == "perm" and body.startswith("@"):
            f = read_permutation(body[1:])
            return boolean_gate(n, f), ClassicalMap.strip_permutation(f)
        if head == "halfft" and not args:
            return half_fourier(n), None
        if head == "shift" and len(args) == 1:
            a = int(args[0])
            f = [(k + a) % n for k in range(n)]
            return boolean_gate(n, f), ClassicalMap.strip_permutation(f)
    except (TypeError, ValueError, OSError) as exc:
        raise ValueError(f"malformed map spec {text!r}: {exc}") from None
    raise ValueError(f"malformed map spec {text!r}")
