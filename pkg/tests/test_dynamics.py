import math
import warnings

import numpy as np
import pytest

from kappajc.errors import EdgeClippingWarning, InvalidDimensionError, TruncationError, ValidationError
from kappajc.fock import Basis, UP, eig_general, fidelity
from kappajc.dynamics import (
    InitialState,
    Propagator,
    TimeSeries,
    beat_frequency,
    collapse_revival_metrics,
    default_time_grid,
    delta_series,
    evolve_closed,
    evolve_numeric,
    fg,
    hermitian_counterpart,
    observables,
    plateau_metrics,
    printed_series,
    revival_time,
    simulate,
    zitter,
)
from kappajc.models import build_jc
from kappajc.params import ModelParams

P = ModelParams.from_xi(1.0)
P0 = P.with_(epsilon=0.0)


def test_observables():
    Sz, Lz, Jz = observables(8)
    b = Basis(8)
    k = b.index(UP, 3)
    assert Jz[k, k] == 3.5
    H = build_jc(P, 8)
    assert np.max(np.abs(H @ Jz - Jz @ H)) <= 1e-14
    assert np.array_equal(Sz + Lz, Jz)
    assert np.array_equal(observables(8, hbar=2.0)[0], 2 * Sz)


def test_commutator_with_counterpart_is_nonzero():
    h, _ = hermitian_counterpart(P, 30)
    _, _, Jz = observables(30)
    assert np.linalg.norm(h @ Jz - Jz @ h) > 1e-3
    h0, _ = hermitian_counterpart(P0, 30)
    assert np.linalg.norm(h0 @ Jz - Jz @ h0) <= 1e-13


def test_zitter():
    f = zitter(0, P0)
    assert f.omega_n == pytest.approx(math.sqrt(5))
    assert f.phi_eps_n == 0 and f.omega_eps_plus == f.omega_n and f.omega_eps_minus == -f.omega_n
    f = zitter(0, P)
    assert f.phi_eps_n == pytest.approx(2e-3)
    assert zitter(3, P.with_(epsilon=1e-3)).phi_eps_n == pytest.approx(2 * zitter(3, P).phi_eps_n)
    assert beat_frequency(P) == pytest.approx(-4e-3)
    assert zitter(4, P).phi_eps_n - zitter(6, P).phi_eps_n == pytest.approx(beat_frequency(P))
    with pytest.raises(ValueError):
        zitter(-1, P)


def test_fg():
    f, g = fg(0, 0.0, P)
    assert (f, g) == (1, 0)
    _, g = fg(0, math.pi / (2 * math.sqrt(5)), P)
    assert abs(g) == pytest.approx(0.8944272, abs=1e-7)
    rng = np.random.default_rng(3)
    ns = rng.integers(0, 60, size=10_000)
    ts = rng.uniform(0, 100, size=10_000)
    xis = rng.uniform(0.01, 3, size=10_000)
    worst = max(abs(abs(f) ** 2 + g**2 - 1) for f, g in (fg(int(n), t, P.with_(xi=x)) for n, t, x in zip(ns, ts, xis)))
    assert worst <= 1e-12


def test_evolve_closed_initial_and_undeformed():
    n_max = 20
    psi0 = evolve_closed(4, 0.0, P, n_max)
    target = InitialState.fock(4).vector(n_max)
    assert np.allclose(psi0, target, atol=1e-15)
    t = np.linspace(0, 5, 7)
    closed = evolve_closed(4, t, P0, n_max)
    numeric = evolve_numeric(target, build_jc(P0, n_max), t)
    assert np.allclose(closed, numeric, atol=1e-12)
    assert closed.shape == (7, 2 * (n_max + 1))


def test_evolve_closed_vs_numeric_fidelity():
    n_max = 30
    h, _ = hermitian_counterpart(P, n_max)
    prop = Propagator(h)
    t = np.linspace(0, 40, 150)
    num = prop.evolve(InitialState.fock(5).vector(n_max), t)
    closed = evolve_closed(5, t, P, n_max)
    assert min(fidelity(closed[i], num[i]) for i in range(t.size)) >= 1 - 1e-3
    norms = np.linalg.norm(closed, axis=1)
    assert np.max(np.abs(norms - 1)) <= 10 * (P.epsilon * 7) ** 2


def test_evolve_closed_clips_and_validates():
    with pytest.warns(EdgeClippingWarning):
        evolve_closed(6, 1.0, P, 8)
    with pytest.raises(ValueError):
        evolve_closed(2, 1.0, P.with_(branch="ajc"), 10)
    with pytest.raises(ValueError):
        evolve_closed(2, 1.0, P, 10, satellite_sign=0)


def test_evolve_numeric_basics():
    n_max = 12
    H = build_jc(P0, n_max)
    psi0 = InitialState.fock(0).vector(n_max)
    assert np.allclose(evolve_numeric(psi0, H, 0.0), psi0)
    t = np.linspace(0, 6, 50)
    states = evolve_numeric(psi0, H, t)
    Sz, _, _ = observables(n_max)
    sz = np.einsum("ti,ij,tj->t", states.conj(), Sz, states).real
    assert np.allclose(sz, 0.5 * (1 - 2 * 0.8 * np.sin(math.sqrt(5) * t) ** 2), atol=1e-12)
    w, V = eig_general(H)
    out = evolve_numeric(V[:, 3], H, t)
    assert np.allclose(np.abs(out @ V[:, 3].conj()), 1)
    with pytest.raises(ValidationError):
        evolve_numeric(psi0, H + np.triu(np.ones_like(H), 1), t)


def test_unitarity_and_energy_conservation():
    n_max = 60
    h, _ = hermitian_counterpart(P, n_max)
    psi0 = InitialState.coherent(9).vector(n_max)
    t = np.linspace(0, 50, 200)
    states = Propagator(h).evolve(psi0, t)
    assert np.max(np.abs(np.linalg.norm(states, axis=1) - 1)) <= 1e-10
    energy = np.einsum("ti,ij,tj->t", states.conj(), h, states).real
    assert np.max(np.abs(energy - energy[0])) <= 1e-9 * abs(energy[0])


def test_initial_state_validation():
    with pytest.raises(ValidationError):
        InitialState("fock", n=-1)
    with pytest.raises(ValidationError):
        InitialState("squeezed", mean=1.0)
    with pytest.raises(ValidationError):
        InitialState.coherent(-2)
    assert InitialState.coherent(25).required_n_max() == 75
    assert InitialState.coherent(25).default_n_max() == 100


def test_simulate_guards():
    with pytest.raises(TruncationError):
        simulate(P, InitialState.coherent(25), np.linspace(0, 1, 5), n_max=60)
    with pytest.raises(ValidationError):
        simulate(P, InitialState.coherent(4), np.linspace(0, 1, 5), method="magic")
    with pytest.raises(ValidationError):
        simulate(P, InitialState.fock(2), np.linspace(0, 1, 5), method="series")


def test_time_series_validation():
    with pytest.raises(ValidationError):
        TimeSeries(np.array([0, 1, 1.0]), np.zeros(3), np.zeros(3), np.zeros(3))
    with pytest.raises(ValidationError):
        TimeSeries(np.array([0, 1.0]), np.array([0, np.nan]), np.zeros(2), np.zeros(2))


@pytest.mark.parametrize("method", ["numeric", "closed"])
def test_jz_is_sum(method):
    ts = simulate(P, InitialState.fock(3), method=method)
    assert np.max(np.abs(ts.Jz - ts.Lz - ts.Sz)) <= 1e-12
    assert ts.meta["method"] == method


def test_jz_conserved_at_zero_eps_fock():
    ts = simulate(P0, InitialState.fock(5))
    assert np.max(np.abs(ts.Jz - 5.5)) <= 1e-8


def test_delta_series():
    ts = simulate(P, InitialState.fock(2))
    d = delta_series(ts, ts)
    assert not d.Sz.any() and not d.Lz.any() and not d.Jz.any()
    other = simulate(P, InitialState.fock(2), np.linspace(0, 1, 10))
    with pytest.raises(InvalidDimensionError):
        delta_series(ts, other)


def test_revival_time_and_grids():
    assert revival_time(25, P) == pytest.approx(math.pi * math.sqrt(101) / 2)
    grid = default_time_grid(P, InitialState.coherent(25))
    assert grid.size == 3000 and grid[-1] == pytest.approx(6 * revival_time(25, P))
    grid = default_time_grid(P, InitialState.fock(0))
    assert grid[-1] == pytest.approx(3 * 2 * math.pi / math.sqrt(5))


def test_series_reduces_to_jc_sum_at_zero_eps():
    t = np.linspace(0, 20, 400)
    ser = printed_series(P0, 4.0, t)
    num = simulate(P0, InitialState.coherent(4.0), t, n_max=40)
    assert np.max(np.abs(ser.Sz - num.Sz)) <= 1e-10
    assert np.max(np.abs(ser.Lz - num.Lz)) <= 1e-10
    assert np.allclose(ser.Jz, 4.5)
    with pytest.raises(ValueError):
        printed_series(P, 4.0, t, factorial="n")


def test_closed_method_coherent_runs():
    t = np.linspace(0, 10, 50)
    with warnings.catch_warnings():
        warnings.simplefilter("error", EdgeClippingWarning)
        ts = simulate(P, InitialState.coherent(4.0), t, method="closed", n_max=40)
    num = simulate(P, InitialState.coherent(4.0), t, n_max=40)
    assert np.max(np.abs(ts.Sz - num.Sz)) <= 5e-3


def test_plateau_metrics():
    t = np.linspace(0, 10, 600)
    m = plateau_metrics(1 - np.exp(-t), t)
    assert m["late_mean"] == pytest.approx(1, abs=2e-3)
    assert m["late_spread"] < m["early_spread"]


def test_collapse_revival_small_run():
    t = np.linspace(0, 1.3 * revival_time(16, P), 1500)
    ts = simulate(P0, InitialState.coherent(16), t)
    m = collapse_revival_metrics(ts, P0, 16)
    assert m["collapse_ratio"] <= 0.1
    assert m["revival_ratio"] >= 0.4
    with pytest.raises(ValidationError):
        collapse_revival_metrics(simulate(P0, InitialState.coherent(16), np.linspace(0, 1, 10)), P0, 16)
