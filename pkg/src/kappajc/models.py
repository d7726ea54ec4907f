"""Hamiltonians of the JC, AJC and kappa-deformed models.

All matrices use the spin-major composite basis of :mod:`kappajc.fock`.
Only one chiral mode enters any Hamiltonian; the opposite-chirality mode
is never coupled and is treated as frozen in its vacuum, so the model space
is one bosonic mode times one spin-1/2.
"""

from __future__ import annotations

import numpy as np

from .fock import build_annihilation, build_creation, build_number, kron, pauli
from .params import ModelParams
from .terms import TermSum


def build_jc(params: ModelParams, n_max: int) -> np.ndarray:
    """Undeformed JC Hamiltonian ``hbar (g a+ s- + g* a- s+) + delta sz``."""
    a, ad = build_annihilation(n_max), build_creation(n_max)
    ident = np.eye(n_max + 1, dtype=complex)
    g = params.g
    return (
        params.hbar * g * kron(pauli("minus"), ad)
        + params.hbar * np.conj(g) * kron(pauli("plus"), a)
        + params.delta * kron(pauli("z"), ident)
    )


def build_ajc(params: ModelParams, n_max: int) -> np.ndarray:
    """Undeformed AJC Hamiltonian ``hbar (g a+ s+ + g* a- s-) + delta sz``."""
    a, ad = build_annihilation(n_max), build_creation(n_max)
    ident = np.eye(n_max + 1, dtype=complex)
    g = params.g
    return (
        params.hbar * g * kron(pauli("plus"), ad)
        + params.hbar * np.conj(g) * kron(pauli("minus"), a)
        + params.delta * kron(pauli("z"), ident)
    )


def build_undeformed(params: ModelParams, n_max: int) -> np.ndarray:
    return build_jc(params, n_max) if params.branch == "jc" else build_ajc(params, n_max)


def terms_kappa(params: ModelParams) -> TermSum:
    """Deformed Hamiltonian as a canonical :class:`TermSum`.

    JC branch::

        hbar (g mu- a+ s- + g* mu+ a- s+) + delta_eps sz + C (2N + 1)

    The AJC branch swaps ``s+ <-> s-`` and ``mu+ <-> mu-`` and uses the
    opposite chirality label.
    """
    chir = params.mode_chirality
    up, down = ("+", chir), ("-", chir)
    g, hbar = params.g, params.hbar
    if params.branch == "jc":
        raise_spin, lower_spin = "-", "+"
        mu_raise, mu_lower = params.mu_minus, params.mu_plus
    else:
        raise_spin, lower_spin = "+", "-"
        mu_raise, mu_lower = params.mu_plus, params.mu_minus
    C = params.identity_coeff
    return TermSum(
        [
            (hbar * g * mu_raise, raise_spin, (up,)),
            (hbar * np.conj(g) * mu_lower, lower_spin, (down,)),
            (params.delta_eps, "z", ()),
            (2 * C, "1", (up, down)),
            (C, "1", ()),
        ]
    )


def build_kappa(params: ModelParams, n_max: int) -> np.ndarray:
    """Matrix of the deformed (non-Hermitian for ``epsilon > 0``) Hamiltonian.

    Built from :func:`terms_kappa`, so symbolic and matrix forms agree
    entrywise. At ``epsilon = 0`` this equals :func:`build_jc` /
    :func:`build_ajc` exactly.
    """
    return terms_kappa(params).to_matrix(n_max)


def build_hermitian_printed(params: ModelParams, n_max: int) -> np.ndarray:
    """Closed-form Hermitian counterpart as commonly quoted (JC branch only)::

        hbar (g s- a+ + g* s+ a-) + (1 - 2 eps xi) delta sz
          + eps hbar (g s- a- + g* s+ a+) + mc^2 eps xi (2N + 1)

    Kept for comparison with the numeric similarity transform; see
    :mod:`kappajc.audit`.
    """
    if params.branch != "jc":
        raise ValueError("the closed-form Hermitian counterpart is only available for the JC branch")
    a, ad, num = build_annihilation(n_max), build_creation(n_max), build_number(n_max)
    ident = np.eye(n_max + 1, dtype=complex)
    g, hbar, eps, xi = params.g, params.hbar, params.epsilon, params.xi
    sm, sp = pauli("minus"), pauli("plus")
    return (
        hbar * g * kron(sm, ad)
        + hbar * np.conj(g) * kron(sp, a)
        + (1 - 2 * eps * xi) * params.delta * kron(pauli("z"), ident)
        + eps * hbar * (g * kron(sm, a) + np.conj(g) * kron(sp, ad))
        + params.rest_energy * eps * xi * kron(np.eye(2), 2 * num + ident)
    )
