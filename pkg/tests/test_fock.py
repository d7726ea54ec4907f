import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kappajc.errors import InvalidDimensionError, NumericFailure, TruncationError
from kappajc.fock import (
    DOWN,
    UP,
    Basis,
    basis_state,
    build_annihilation,
    build_creation,
    build_number,
    coherent_vector,
    eig_general,
    expm,
    fidelity,
    hermiticity_residual,
    kron,
    ladder_word,
    pauli,
)


def ket(n, n_max):
    v = np.zeros(n_max + 1, dtype=complex)
    v[n] = 1
    return v


@given(st.integers(1, 40), st.data())
def test_basis_index_round_trip(n_max, data):
    b = Basis(n_max)
    k = data.draw(st.integers(0, b.dim - 1))
    assert b.index(*b.unpack(k)) == k
    assert b.dim == 2 * (n_max + 1)


def test_basis_rejects_bad_sizes():
    with pytest.raises(InvalidDimensionError):
        Basis(0)
    with pytest.raises(IndexError):
        Basis(4).index(UP, 5)
    with pytest.raises(InvalidDimensionError):
        Basis(4).interior(4)


def test_interior_keeps_low_levels_of_both_spins():
    b = Basis(12)
    idx = b.interior(10)
    assert [b.unpack(k) for k in idx] == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


def test_annihilation_action():
    a = build_annihilation(3)
    assert np.allclose(a @ ket(3, 3), math.sqrt(3) * ket(2, 3))
    assert np.allclose(a @ ket(0, 3), 0)
    with pytest.raises(InvalidDimensionError):
        build_annihilation(0)


def test_number_from_ladders():
    a, ad = build_annihilation(8), build_creation(8)
    assert (ad @ a)[4, 4] == pytest.approx(4)
    assert np.allclose(ad @ a, build_number(8), atol=1e-14, rtol=0)
    assert np.array_equal(ladder_word(1, 1, 8), build_number(8))


def test_creation_and_truncated_commutator():
    n_max = 6
    a, ad = build_annihilation(n_max), build_creation(n_max)
    assert np.allclose(ad @ ket(0, n_max), ket(1, n_max))
    assert ad[2, 1] == pytest.approx(math.sqrt(2))
    comm = a @ ad - ad @ a
    assert np.allclose(comm[:n_max, :n_max], np.eye(n_max))
    assert comm[n_max, n_max] == pytest.approx(-n_max)


def test_ladder_word_matches_products():
    n_max = 10
    a, ad = build_annihilation(n_max), build_creation(n_max)
    assert np.array_equal(ladder_word(1, 0, n_max), ad)
    assert np.array_equal(ladder_word(0, 1, n_max), a)
    assert np.allclose(ladder_word(2, 0, n_max), ad @ ad)
    assert np.allclose(ladder_word(0, 2, n_max), a @ a)
    assert np.allclose(ladder_word(2, 1, n_max)[: n_max - 1], (ad @ ad @ a)[: n_max - 1])


def test_coherent_vector_mean_and_amplitude():
    v = coherent_vector(5.0, 100)
    p = np.abs(v) ** 2
    assert np.linalg.norm(v) == pytest.approx(1, abs=1e-12)
    assert np.dot(np.arange(101), p) == pytest.approx(25.0, abs=1e-9)
    expected = math.exp(-12.5) * 5**25 / math.sqrt(math.factorial(25))
    assert abs(v[25]) == pytest.approx(expected, rel=1e-10)
    assert p[25] == pytest.approx(0.0795, abs=5e-4)


def test_coherent_vacuum_and_truncation():
    assert np.array_equal(coherent_vector(0, 5), ket(0, 5))
    with pytest.raises(TruncationError) as info:
        coherent_vector(5.0, 40)
    assert info.value.required_n_max > 40
    coherent_vector(5.0, info.value.required_n_max)


def test_pauli_algebra():
    sp, sm, sz = pauli("plus"), pauli("minus"), pauli("z")
    assert np.array_equal(sp @ sm - sm @ sp, sz)
    assert np.array_equal(sm @ np.array([1, 0]), np.array([0, 1]))
    assert np.array_equal(sz @ sz, np.eye(2))
    assert np.array_equal(pauli("x"), sp + sm)
    with pytest.raises(ValueError):
        pauli("w")


def test_kron_ordering():
    n_max = 5
    b = Basis(n_max)
    N = kron(pauli("identity"), build_number(n_max))
    psi = basis_state(b, DOWN, 3)
    assert np.allclose(N @ psi, 3 * psi)
    op = kron(pauli("minus"), build_creation(n_max))
    assert np.allclose(op @ basis_state(b, UP, 2), math.sqrt(3) * basis_state(b, DOWN, 3))
    assert np.trace(kron(pauli("z"), np.eye(n_max + 1))) == 0
    with pytest.raises(InvalidDimensionError):
        kron(np.eye(3), np.eye(3))


def test_expm_identities():
    assert np.allclose(expm(np.zeros((4, 4))), np.eye(4))
    assert np.allclose(expm(np.diag([1j * np.pi, -1j * np.pi])), -np.eye(2))
    rng = np.random.default_rng(1)
    M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    M *= 10 / np.linalg.norm(M, 2)
    assert np.linalg.norm(expm(M) @ expm(-M) - np.eye(6)) <= 1e-10
    assert np.allclose(expm(M.conj().T), expm(M).conj().T, atol=1e-10)
    with pytest.raises(NumericFailure):
        expm(np.array([[np.nan]]))
    with pytest.raises(NumericFailure):
        expm(np.array([[1e4]]))


def test_eig_general_sorted_and_accurate():
    w, v = eig_general(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])
    block = np.array([[1, -2j], [2j, -1]])
    w, _ = eig_general(block)
    assert np.allclose(w, [-math.sqrt(5), math.sqrt(5)])
    eps = 5e-4
    deformed = np.array([[1 - 4 * eps, -2j * (1 + eps)], [2j * (1 - eps), -1 - 4 * eps]])
    w, _ = eig_general(deformed)
    assert w[1] == pytest.approx(math.sqrt(5) - 2e-3, abs=1e-6)
    assert w[0] == pytest.approx(-math.sqrt(5) - 2e-3, abs=1e-6)


def test_eig_general_hermitian_is_real():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    w, v = eig_general(A + A.conj().T)
    assert np.max(np.abs(w.imag)) <= 1e-10
    assert np.allclose(np.linalg.norm(v, axis=0), 1)


def test_hermiticity_residual_and_fidelity():
    assert hermiticity_residual(np.array([[1, 1j], [-1j, 2]])) <= 1e-15
    assert hermiticity_residual(np.array([[0, 1], [0, 0]])) > 0
    u = np.array([1, 1j]) / math.sqrt(2)
    assert fidelity(u, np.exp(0.7j) * u) == pytest.approx(1)
    assert fidelity(np.array([1, 0]), np.array([0, 1])) == 0


@settings(max_examples=30)
@given(st.integers(2, 30))
def test_ladder_identities_on_interior(n_max):
    a, ad = build_annihilation(n_max), build_creation(n_max)
    k = n_max - 1
    assert np.allclose((a @ ad - ad @ a)[:k, :k], np.eye(k), atol=1e-13)
    assert np.allclose(ad @ a, build_number(n_max), atol=1e-13, rtol=0)
