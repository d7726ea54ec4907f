"""Metric operator, Hermitian counterpart and the eta inner product.

The similarity map acts on the bosonic factor only::

    rho = exp(eps (a- a- - a+ a+ + a+ a-)),   eta = rho^dagger rho

and is embedded as ``1_2 (x) rho`` on the composite space. Residuals are
evaluated on the interior block ``n <= n_max - margin`` because the
``a+ a+`` part of the exponent is corrupted by truncation near the top.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, ValidationError
from .fock import Basis, expm, ladder_word
from .params import ModelParams


@dataclass(frozen=True)
class MetricBundle:
    rho: np.ndarray
    rho_inv: np.ndarray
    eta: np.ndarray
    min_eta_eigenvalue: float
    n_max: int
    epsilon: float

    @property
    def basis(self) -> Basis:
        return Basis(self.n_max)


def similarity_generator(n_max: int) -> np.ndarray:
    """``a- a- - a+ a+ + a+ a-`` on the Fock factor."""
    return ladder_word(0, 2, n_max) - ladder_word(2, 0, n_max) + ladder_word(1, 1, n_max)


def build_rho(params: ModelParams, n_max: int) -> MetricBundle:
    eps = params.epsilon
    if eps * n_max > 0.2:
        warnings.warn(
            f"eps * n_max = {eps * n_max:.3g} > 0.2; the first-order picture of rho is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    G = similarity_generator(n_max)
    rho_f = expm(eps * G)
    rho_inv_f = expm(-eps * G)
    ident2 = np.eye(2)
    rho = np.kron(ident2, rho_f)
    rho_inv = np.kron(ident2, rho_inv_f)
    eta = rho.conj().T @ rho
    eta = 0.5 * (eta + eta.conj().T)
    min_eig = float(np.linalg.eigvalsh(eta).min())
    if not min_eig > 0:
        raise ValidationError(f"metric is not positive definite: min eigenvalue {min_eig:.3e}")
    return MetricBundle(rho, rho_inv, eta, min_eig, n_max, eps)


def _check_dim(M, bundle):
    if M.shape != bundle.rho.shape:
        raise InvalidDimensionError(f"operator shape {M.shape} does not match metric {bundle.rho.shape}")


def hermitize(H: np.ndarray, bundle: MetricBundle) -> np.ndarray:
    """``rho H rho^-1``."""
    _check_dim(H, bundle)
    return bundle.rho @ H @ bundle.rho_inv


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.conj().T)


def interior_block(M: np.ndarray, margin: int) -> np.ndarray:
    idx = Basis.from_dim(M.shape[0]).interior(margin)
    return M[np.ix_(idx, idx)]


def interior_hermiticity_residual(M: np.ndarray, margin: int = 10) -> float:
    block = interior_block(M, margin)
    return float(np.linalg.norm(block - block.conj().T) / max(1.0, np.linalg.norm(block)))


def quasi_residual(H: np.ndarray, bundle: MetricBundle, margin: int = 10, eta=None) -> float:
    """``||H^dagger eta - eta H||_F / ||H||_F`` on the interior block.

    Pass ``eta`` to override the bundle's metric (e.g. the identity).
    """
    _check_dim(H, bundle)
    eta = bundle.eta if eta is None else eta
    R = H.conj().T @ eta - eta @ H
    if margin:
        R, Hb = interior_block(R, margin), interior_block(H, margin)
    else:
        Hb = H
    return float(np.linalg.norm(R) / np.linalg.norm(Hb))


def eta_inner(phi: np.ndarray, psi: np.ndarray, bundle: MetricBundle) -> complex:
    """``<phi, eta psi>``."""
    if phi.shape != psi.shape or phi.shape[0] != bundle.eta.shape[0]:
        raise InvalidDimensionError("state dimensions do not match the metric")
    return complex(np.vdot(phi, bundle.eta @ psi))


def expectation_equiv(H: np.ndarray, bundle: MetricBundle, phi: np.ndarray):
    """Both sides of ``<Phi| eta H |Phi> = <Psi| h |Psi>`` with ``Psi = rho Phi``.

    Returns ``(lhs, rhs, diff)``.
    """
    h = hermitize(H, bundle)
    lhs = complex(np.vdot(phi, bundle.eta @ (H @ phi)))
    psi = bundle.rho @ phi
    rhs = complex(np.vdot(psi, h @ psi))
    return lhs, rhs, lhs - rhs
