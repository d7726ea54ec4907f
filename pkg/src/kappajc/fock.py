"""Truncated Fock space, spin-1/2 operators and dense linear algebra.

Composite states live in spin (x) Fock space with a spin-major ordering:
index ``k = sigma * (n_max + 1) + n`` where ``sigma = 0`` is spin up
(excited, ``|e>``) and ``sigma = 1`` is spin down (``|g>``).

Operators and states are plain complex ``numpy`` arrays. The ``Basis``
object carries the truncation and the index bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import InvalidDimensionError, NumericFailure, TruncationError

UP, DOWN = 0, 1

COHERENT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class Basis:
    """Spin-major composite basis with Fock levels ``0..n_max``."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidDimensionError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, sigma: int, n: int) -> int:
        if sigma not in (UP, DOWN) or not 0 <= n <= self.n_max:
            raise IndexError(f"(sigma={sigma}, n={n}) outside basis with n_max={self.n_max}")
        return sigma * (self.n_max + 1) + n

    def unpack(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.dim:
            raise IndexError(f"index {k} outside basis of dimension {self.dim}")
        return divmod(k, self.n_max + 1)

    def fock_levels(self) -> np.ndarray:
        """Fock level of every composite index."""
        n = np.arange(self.n_max + 1)
        return np.concatenate([n, n])

    def interior(self, margin: int) -> np.ndarray:
        """Composite indices whose Fock level is at most ``n_max - margin``."""
        if margin < 0 or margin >= self.n_max:
            raise InvalidDimensionError(f"edge margin {margin} incompatible with n_max={self.n_max}")
        return np.flatnonzero(self.fock_levels() <= self.n_max - margin)

    @classmethod
    def from_dim(cls, dim: int) -> "Basis":
        if dim % 2 or dim < 4:
            raise InvalidDimensionError(f"dimension {dim} is not a composite spin (x) Fock dimension")
        return cls(dim // 2 - 1)


def _check_n_max(n_max):
    if int(n_max) != n_max or n_max < 1:
        raise InvalidDimensionError(f"n_max must be an integer >= 1, got {n_max!r}")


def build_annihilation(n_max: int) -> np.ndarray:
    _check_n_max(n_max)
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def build_creation(n_max: int) -> np.ndarray:
    """Adjoint of the truncated annihilator; note ``a+ |n_max> = 0``."""
    return build_annihilation(n_max).conj().T.copy()


def build_number(n_max: int) -> np.ndarray:
    _check_n_max(n_max)
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def ladder_word(n_creators: int, n_annihilators: int, n_max: int) -> np.ndarray:
    """Normal-ordered monomial ``(a+)^p (a-)^q`` on the truncated space.

    Each element is the square root of an exact integer, so ``N = a+ a-``
    comes out diagonal with integer entries and ``a+`` matches
    ``build_creation`` bit for bit.
    """
    _check_n_max(n_max)
    p, q = n_creators, n_annihilators
    out = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for m in range(q, n_max + 1):
        target = m - q + p
        if target > n_max:
            continue
        out[target, m] = math.sqrt(math.perm(m, q) * math.perm(target, p))
    return out


def coherent_vector(alpha: complex, n_max: int) -> np.ndarray:
    """Truncated, renormalised Glauber state ``|alpha>`` on the Fock factor."""
    _check_n_max(n_max)
    mean = abs(alpha) ** 2
    tail = poisson.sf(n_max, mean) if mean > 0 else 0.0
    if tail >= COHERENT_TAIL_TOL:
        required = int(poisson.isf(COHERENT_TAIL_TOL, mean)) + 1
        raise TruncationError(
            f"n_max={n_max} leaves Poisson tail {tail:.3e} for |alpha|^2={mean:g}; "
            f"need n_max >= {required}",
            required_n_max=required,
        )
    n = np.arange(n_max + 1)
    if alpha == 0:
        vec = np.zeros(n_max + 1, dtype=complex)
        vec[0] = 1.0
        return vec
    log_mod = -0.5 * mean + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    vec = np.exp(log_mod) * np.exp(1j * np.angle(alpha) * n)
    return vec / np.linalg.norm(vec)


def pauli(kind: str) -> np.ndarray:
    """Two-level operators with ``|up> = |e>`` first.

    ``kind`` is one of ``"z"``, ``"plus"``, ``"minus"``, ``"x"``, ``"y"`` or
    ``"identity"``.
    """
    mats = {
        "identity": [[1, 0], [0, 1]],
        "z": [[1, 0], [0, -1]],
        "plus": [[0, 1], [0, 0]],
        "minus": [[0, 0], [1, 0]],
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
    }
    try:
        return np.array(mats[kind], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown Pauli operator {kind!r}") from None


def kron(spin_op: np.ndarray, fock_op: np.ndarray) -> np.ndarray:
    """Composite operator in the spin-major ordering."""
    spin_op = np.asarray(spin_op)
    fock_op = np.asarray(fock_op)
    if spin_op.shape != (2, 2):
        raise InvalidDimensionError(f"spin operator must be 2x2, got {spin_op.shape}")
    if fock_op.ndim != 2 or fock_op.shape[0] != fock_op.shape[1] or fock_op.shape[0] < 2:
        raise InvalidDimensionError(f"Fock operator must be square, got {fock_op.shape}")
    return np.kron(spin_op, fock_op)


def basis_state(basis: Basis, sigma: int, n: int) -> np.ndarray:
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.index(sigma, n)] = 1.0
    return vec


def _require_finite(m, what="matrix"):
    if not np.all(np.isfinite(m)):
        raise NumericFailure(f"{what} contains NaN or Inf")


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling and squaring, via scipy)."""
    m = np.asarray(m)
    _require_finite(m, "expm input")
    with np.errstate(over="raise", invalid="raise"):
        try:
            out = scipy.linalg.expm(m)
        except FloatingPointError as exc:
            raise NumericFailure(f"matrix exponential overflowed: {exc}") from exc
    _require_finite(out, "expm output")
    return out


def eig_general(m: np.ndarray, residual_tol: float = 1e-9):
    """Right eigenpairs of a general square matrix, sorted by real part.

    Returns ``(values, vectors)`` with unit-norm eigenvectors as columns.
    Every pair satisfies ``||M v - lambda v|| <= residual_tol * ||M||``.
    """
    m = np.asarray(m, dtype=complex)
    _require_finite(m, "eigensolver input")
    try:
        w, v = scipy.linalg.eig(m)
    except scipy.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver failed (cond={np.linalg.cond(m):.3e}): {exc}") from exc
    order = np.lexsort((w.imag, w.real))
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    scale = max(np.linalg.norm(m, 2), np.finfo(float).tiny)
    res = np.linalg.norm(m @ v - v * w, axis=0)
    if np.any(res > residual_tol * scale):
        raise NumericFailure(
            f"eigenpair residual {res.max():.3e} exceeds {residual_tol:g}*||M||; "
            f"cond(V)={np.linalg.cond(v):.3e}"
        )
    return w, v


def hermiticity_residual(m: np.ndarray) -> float:
    """``||M - M^dagger||_F / max(1, ||M||_F)``."""
    m = np.asarray(m)
    return float(np.linalg.norm(m - m.conj().T) / max(1.0, np.linalg.norm(m)))


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Phase-invariant overlap ``|<u|v>|^2 / (<u|u><v|v>)``."""
    num = abs(np.vdot(u, v)) ** 2
    return float(num / (np.vdot(u, u).real * np.vdot(v, v).real))
