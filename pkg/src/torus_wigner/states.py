"""Reference states: computational, momentum, two-term superpositions,
the completely mixed state and the periodic Gaussian wavepacket."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import check_dimension, fourier

KINDS = ("position", "momentum", "superposition", "mixed", "gaussian", "raw")

# mirror images summed on each side of the Gaussian centre
GAUSSIAN_IMAGES = 3


@dataclass(frozen=True)
class StateSpec:
    kind: str
    params: tuple = ()
    vector: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}")

    @classmethod
    def position(cls, q0: int) -> "StateSpec":
        return cls("position", (int(q0),))

    @classmethod
    def momentum(cls, k0: int) -> "StateSpec":
        return cls("momentum", (int(k0),))

    @classmethod
    def superposition(cls, q0: int, q1: int, phi: float = 0.0) -> "StateSpec":
        return cls("superposition", (int(q0), int(q1), float(phi)))

    @classmethod
    def mixed(cls) -> "StateSpec":
        return cls("mixed")

    @classmethod
    def gaussian(cls, q0: int, p0: int, s: float) -> "StateSpec":
        return cls("gaussian", (int(q0), int(p0), float(s)))

    @classmethod
    def raw(cls, amplitudes) -> "StateSpec":
        return cls("raw", (), np.asarray(amplitudes, dtype=complex))


def parse_state_spec(text: str) -> StateSpec:
    """Parse ``pos:q0 | mom:k0 | super:q0,q1,phi | mixed | gauss:q0,p0,s | raw:@file``.

    Raw files hold one amplitude per line as ``re,im``.
    """
    text = text.strip()
    head, _, body = text.partition(":")
    args = [a.strip() for a in body.split(",")] if body else []
    try:
        if head == "pos" and len(args) == 1:
            return StateSpec.position(int(args[0]))
        if head == "mom" and len(args) == 1:
            return StateSpec.momentum(int(args[0]))
        if head == "super" and len(args) in (2, 3):
            phi = float(args[2]) if len(args) == 3 else 0.0
            return StateSpec.superposition(int(args[0]), int(args[1]), phi)
        if head == "mixed" and not args:
            return StateSpec.mixed()
        if head == "gauss" and len(args) == 3:
            return StateSpec.gaussian(int(args[0]), int(args[1]), float(args[2]))
        if head == "raw" and body.startswith("@"):
            return StateSpec.raw(read_amplitudes(body[1:]))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed state spec {text!r}: {exc}") from None
    raise ValueError(f"malformed state spec {text!r}")


def read_amplitudes(path) -> np.ndarray:
    amps = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        re_, im = line.split(",")
        amps.append(complex(float(re_), float(im)))
    return np.array(amps, dtype=complex)


def basis_vector(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[k % n] = 1.0
    return v


def momentum_vector(n: int, k: int) -> np.ndarray:
    """|k> = sum_n exp(2 pi i n k / N) |n> / sqrt(N)."""
    return fourier(n)[:, k % n]


def pure(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def gaussian_amplitudes(n: int, q0: int, p0: int, s: float) -> np.ndarray:
    """Periodised Gaussian: sum over mirror images at distance m N, |m| <= 3.

    Amplitudes fall off as exp(-(x)^2 / 4 s^2) so ``s`` is the standard
    deviation of |psi|^2.  The momentum boost uses the unwrapped coordinate
    n + mN; for integer p0 it is the same for every image.
    """
    n = check_dimension(n)
    if not s > 0:
        raise ValueError(f"gaussian width must be positive, got {s}")
    k = np.arange(n)
    psi = np.zeros(n, dtype=complex)
    for m in range(-GAUSSIAN_IMAGES, GAUSSIAN_IMAGES + 1):
        x = k - q0 + m * n
        psi += np.exp(-x**2 / (4 * s * s)) * np.exp(2j * np.pi * p0 * (k + m * n) / n)
    return psi / np.linalg.norm(psi)


def gaussian_wavepacket(n: int, q0: int, p0: int, s: float) -> np.ndarray:
    return pure(gaussian_amplitudes(n, q0, p0, s))


def make_state(n: int, spec: StateSpec) -> np.ndarray:
    n = check_dimension(n)
    kind, args = spec.kind, spec.params
    if kind == "position":
        return pure(basis_vector(n, args[0]))
    if kind == "momentum":
        return pure(momentum_vector(n, args[0]))
    if kind == "superposition":
        q0, q1, phi = args
        if q0 % n == q1 % n:
            raise ValueError("superposition needs two distinct basis states")
        psi = (basis_vector(n, q0) + np.exp(-1j * phi) * basis_vector(n, q1)) / np.sqrt(2)
        return pure(psi)
    if kind == "mixed":
        return np.eye(n, dtype=complex) / n
    if kind == "gaussian":
        return gaussian_wavepacket(n, *args)
    # raw
    v = spec.vector
    if v is None or v.shape != (n,):
        raise ValueError(f"raw state must have {n} amplitudes")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("raw state has zero norm")
    return pure(v / norm)


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Raise ``ValueError`` unless ``rho`` is a Hermitian, unit-trace, PSD matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-12:
        raise ValueError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def random_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return pure(v / np.linalg.norm(v))


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from a Ginibre matrix of the given rank."""
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
