"""Operator algebra on the discrete 2N x 2N phase-space torus.

Position basis |n>, n = 0..N-1, with momentum states obtained by the
discrete Fourier transform.  Everything is dense ``complex128``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

MAX_DIMENSION = 256

# tolerance hierarchy: single constructions vs. products of O(N) factors
CONSTRUCTION_TOL = 1e-12
COMPOSED_TOL = 1e-10


def check_dimension(n, max_n: int = MAX_DIMENSION) -> int:
    """Validate a Hilbert-space dimension and return it as ``int``.

    Only even N >= 2 is supported; the trace and projector-dimension rules
    used throughout hold for even N only.
    """
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if n % 2:
        raise ValueError(f"odd dimension {n} is not supported")
    if n > max_n:
        raise ValueError(f"dimension {n} exceeds cap {max_n}")
    return n


class PhasePoint(NamedTuple):
    q: int
    p: int

    def normalized(self, n: int) -> "PhasePoint":
        side = 2 * n
        return PhasePoint(self.q % side, self.p % side)

    @property
    def is_even(self) -> bool:
        return self.q % 2 == 0 and self.p % 2 == 0


def grid_points(n: int, side: int | None = None) -> list[PhasePoint]:
    """All points of the ``side`` x ``side`` grid in q-major order (default G_2N)."""
    side = 2 * n if side is None else side
    return [PhasePoint(q, p) for q in range(side) for p in range(side)]


def periodic_delta(z: int, modulus: int) -> int:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    return 1 if z % modulus == 0 else 0


def is_unitary(m: np.ndarray, tol: float = COMPOSED_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() < tol)


def is_hermitian(m: np.ndarray, tol: float = CONSTRUCTION_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.abs(m - m.conj().T).max() < tol)


def shift_u(n: int, m: int) -> np.ndarray:
    """Cyclic position shift: U^m |k> = |k + m mod N>."""
    n = check_dimension(n)
    return np.roll(np.eye(n, dtype=complex), m % n, axis=0)


def shift_v(n: int, m: int) -> np.ndarray:
    """Momentum shift, diagonal in position: V^m |k> = exp(2 pi i m k / N) |k>."""
    n = check_dimension(n)
    k = np.arange(n)
    return np.diag(np.exp(2j * np.pi * ((m * k) % n) / n))


def fourier(n: int) -> np.ndarray:
    """Unitary DFT with <n'|F|n> = exp(2 pi i n n' / N) / sqrt(N)."""
    n = check_dimension(n)
    k = np.arange(n)
    return np.exp(2j * np.pi * (np.outer(k, k) % n) / n) / np.sqrt(n)


def reflection(n: int) -> np.ndarray:
    n = check_dimension(n)
    r = np.zeros((n, n), dtype=complex)
    k = np.arange(n)
    r[(-k) % n, k] = 1.0
    return r


def translation(n: int, q: int, p: int) -> np.ndarray:
    """T(q, p) = U^q V^p exp(i pi q p / N), with q, p reduced mod 2N first.

    The reduction makes T^dagger(q, p) == T(2N - q, 2N - p) hold exactly.
    """
    n = check_dimension(n)
    q %= 2 * n
    p %= 2 * n
    return shift_u(n, q) @ shift_v(n, p) * np.exp(1j * np.pi * q * p / n)


def phase_point_op(n: int, alpha) -> np.ndarray:
    """A(q, p) = U^q R V^{-p} exp(i pi p q / N) / (2N)."""
    n = check_dimension(n)
    q, p = PhasePoint(*alpha).normalized(n)
    k = np.arange(n)
    out = np.zeros((n, n), dtype=complex)
    # U^q R V^{-p} |k> = exp(-2 pi i p k / N) |q - k>
    out[(q - k) % n, k] = np.exp(-2j * np.pi * ((p * k) % n) / n)
    return out * (np.exp(1j * np.pi * q * p / n) / (2 * n))


@lru_cache(maxsize=8)
def _stack(n: int) -> np.ndarray:
    side = 2 * n
    ops = np.empty((side, side, n, n), dtype=complex)
    for q in range(side):
        for p in range(side):
            ops[q, p] = phase_point_op(n, (q, p))
    ops.flags.writeable = False
    return ops


def phase_point_stack(n: int) -> np.ndarray:
    """Read-only array ``ops[q, p]`` of all A(q, p) over G_2N (cached)."""
    n = check_dimension(n, max_n=64)
    return _stack(n)


def phase_point_relations_check(n: int, tol: float = CONSTRUCTION_TOL) -> bool:
    """Verify A(q + sq N, p + sp N) = A(q, p) (-1)^(sp q + sq p + sq sp N) on G_N."""
    n = check_dimension(n)
    for q in range(n):
        for p in range(n):
            base = phase_point_op(n, (q, p))
            for sq in (0, 1):
                for sp in (0, 1):
                    sign = (-1) ** (sp * q + sq * p + sq * sp * n)
                    other = phase_point_op(n, (q + sq * n, p + sp * n))
                    if np.abs(other - sign * base).max() >= tol:
                        return False
    return True
