"""Time evolution, angular-momentum observables and collapse/revival.

Numeric evolution propagates under the Hermitian counterpart
``h = rho H rho^-1`` (its Hermitian part, see :func:`hermitian_counterpart`)
and is the reference for everything else. ``method="closed"`` evaluates the
first-order evolved state level by level; ``method="series"`` evaluates the
Poisson-weighted expectation series for a coherent start term by term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import EdgeClippingWarning, InvalidDimensionError, TruncationError, ValidationError
from .fock import DOWN, UP, Basis, build_number, coherent_vector, hermiticity_residual, kron, pauli
from .metric import build_rho, hermitian_part, hermitize
from .models import build_kappa
from .params import ModelParams
from .spectra import alpha_beta, c_coeff

METHODS = ("numeric", "closed", "series")
SERIES_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FrequencySet:
    n: int
    omega_n: float
    phi_eps_n: float
    omega_eps_plus: float
    omega_eps_minus: float


def zitter(n: int, params: ModelParams) -> FrequencySet:
    """Zitterbewegung frequencies of level ``n`` (JC tower)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    omega = params.rest_energy * math.sqrt(1 + 4 * params.xi * (n + 1)) / params.hbar
    phi = 4 * params.rest_energy * params.epsilon * params.xi * (n + 1) / params.hbar
    return FrequencySet(n, omega, phi, omega - phi, -omega - phi)


def beat_frequency(params: ModelParams) -> float:
    """``phi_n - phi_{n+2} = -8 mc^2 xi eps / hbar`` (independent of ``n``)."""
    return -8 * params.rest_energy * params.xi * params.epsilon / params.hbar


def observables(n_max: int, hbar: float = 1.0):
    """``(Sz, Lz, Jz)`` on the composite basis; the uncoupled mode stays empty."""
    ident = np.eye(n_max + 1, dtype=complex)
    Sz = 0.5 * hbar * kron(pauli("z"), ident)
    Lz = hbar * kron(pauli("identity"), build_number(n_max))
    return Sz, Lz, Sz + Lz


def fg(n: int, t, params: ModelParams):
    """Amplitudes on ``|n,up>`` and ``|n+1,down>`` of the undeformed evolution."""
    t = np.asarray(t, dtype=float)
    w = zitter(n, params).omega_n
    root = math.sqrt(1 + 4 * params.xi * (n + 1))
    alpha, beta = alpha_beta(n, params)
    f = np.cos(w * t) - 1j * np.sin(w * t) / root
    g = 2 * np.sin(w * t) * alpha * beta
    return f, g


def evolve_closed(n: int, t, params: ModelParams, n_max: int, satellite_sign: int = 1) -> np.ndarray:
    """First-order evolved state of ``|n, up>`` written in the spin basis.

    Scalar ``t`` gives shape ``(dim,)``; an array gives ``(len(t), dim)``.
    The ``|n+3, down>`` satellite carries the sign found in the quoted
    formula (``+eps c_{n+3} g_n``); ``satellite_sign=-1`` gives the sign
    that follows from applying the similarity map to the initial state.
    Levels outside the basis are dropped with an :class:`EdgeClippingWarning`.
    """
    if satellite_sign not in (1, -1):
        raise ValueError(f"satellite_sign must be +1 or -1, got {satellite_sign!r}")
    if params.branch != "jc":
        raise ValueError("closed-form evolution is available for the JC branch only")
    basis = Basis(n_max)
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    eps = params.epsilon
    out = np.zeros((t.size, basis.dim), dtype=complex)
    clipped = []

    def put(sigma, level, amp):
        if not np.any(amp):
            return
        if 0 <= level <= n_max:
            out[:, basis.index(sigma, level)] += amp
        else:
            clipped.append((sigma, level))

    def phase(m):
        return np.exp(1j * zitter(m, params).phi_eps_n * t)

    f, g = fg(n, t, params)
    ph = phase(n)
    put(UP, n, ph * f)
    put(DOWN, n + 1, ph * g)
    put(UP, n - 2, eps * ph * c_coeff(n) * f)
    put(DOWN, n - 1, eps * ph * c_coeff(n + 1) * g)
    put(UP, n + 2, -eps * ph * c_coeff(n + 2) * f)
    put(DOWN, n + 3, satellite_sign * eps * ph * c_coeff(n + 3) * g)
    if n >= 2 and c_coeff(n):
        f2, g2 = fg(n - 2, t, params)
        put(UP, n - 2, -eps * c_coeff(n) * phase(n - 2) * f2)
        put(DOWN, n - 1, -eps * c_coeff(n) * phase(n - 2) * g2)
    f2, g2 = fg(n + 2, t, params)
    put(UP, n + 2, eps * c_coeff(n + 2) * phase(n + 2) * f2)
    put(DOWN, n + 3, eps * c_coeff(n + 2) * phase(n + 2) * g2)
    if clipped:
        warnings.warn(f"dropped components outside the basis: {sorted(set(clipped))}", EdgeClippingWarning, stacklevel=2)
    return out[0] if scalar else out


class Propagator:
    """``exp(-i h t / hbar)`` by one spectral decomposition of Hermitian ``h``."""

    def __init__(self, h: np.ndarray, hbar: float = 1.0, tol: float = 1e-8):
        h = np.asarray(h, dtype=complex)
        res = hermiticity_residual(h)
        if res > tol:
            raise ValidationError(
                f"propagator needs a Hermitian generator (residual {res:.3e} > {tol:g}); hermitize first"
            )
        self.h = h
        self.hbar = hbar
        self.energies, self.vectors = np.linalg.eigh(hermitian_part(h))

    def evolve(self, psi0: np.ndarray, t) -> np.ndarray:
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        coeffs = self.vectors.conj().T @ np.asarray(psi0, dtype=complex)
        phases = np.exp(-1j * np.outer(t, self.energies) / self.hbar)
        states = (phases * coeffs) @ self.vectors.T
        return states[0] if scalar else states


def evolve_numeric(psi0: np.ndarray, h: np.ndarray, t, hbar: float = 1.0) -> np.ndarray:
    return Propagator(h, hbar).evolve(psi0, t)


def hermitian_counterpart(params: ModelParams, n_max: int) -> tuple[np.ndarray, float]:
    """Hermitian part of ``rho H rho^-1`` and the discarded residual.

    The similarity transform is Hermitian only to ``O(eps^2)`` (and worse at
    the truncation edge); its Hermitian part is used as the generator.
    """
    h = hermitize(build_kappa(params, n_max), build_rho(params, n_max))
    return hermitian_part(h), hermiticity_residual(h)


@dataclass(frozen=True)
class InitialState:
    """``kind="fock"`` starts in ``|n, up>``; ``kind="coherent"`` in ``|alpha, up>``."""

    kind: str
    n: int | None = None
    mean: float | None = None

    def __post_init__(self):
        if self.kind == "fock":
            if self.n is None or self.n < 0 or int(self.n) != self.n:
                raise ValidationError(f"Fock start needs an integer n >= 0, got {self.n!r}")
        elif self.kind == "coherent":
            if self.mean is None or not self.mean >= 0:
                raise ValidationError(f"coherent start needs a mean photon number >= 0, got {self.mean!r}")
        else:
            raise ValidationError(f"unknown initial state kind {self.kind!r}")

    @classmethod
    def fock(cls, n: int) -> "InitialState":
        return cls("fock", n=n)

    @classmethod
    def coherent(cls, mean: float) -> "InitialState":
        return cls("coherent", mean=mean)

    def required_n_max(self) -> int:
        if self.kind == "fock":
            return self.n + 4
        return math.ceil(self.mean + 10 * math.sqrt(self.mean))

    def default_n_max(self) -> int:
        if self.kind == "fock":
            return max(40, self.n + 30)
        return max(100, self.required_n_max())

    def vector(self, n_max: int) -> np.ndarray:
        basis = Basis(n_max)
        psi = np.zeros(basis.dim, dtype=complex)
        if self.kind == "fock":
            psi[basis.index(UP, self.n)] = 1.0
        else:
            psi[: n_max + 1] = coherent_vector(math.sqrt(self.mean), n_max)
        return psi

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "mean": self.mean}


@dataclass
class TimeSeries:
    t: np.ndarray
    Sz: np.ndarray
    Lz: np.ndarray
    Jz: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or (self.t.size > 1 and np.any(np.diff(self.t) <= 0)):
            raise ValidationError("time grid must be one-dimensional and strictly increasing")
        for name in ("Sz", "Lz", "Jz"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.t.shape or not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} must be finite with the grid's shape")
            setattr(self, name, arr)


def revival_time(mean: float, params: ModelParams) -> float:
    """Revival time of the spin inversion for mean photon number ``mean``.

    Inversion oscillates at ``2 omega_n``, so revivals sit at
    ``2 pi / (2 (omega_{n+1} - omega_n)) ~ (pi / 2xi) sqrt(1 + 4 xi <n>) hbar / mc^2``.
    """
    return math.pi * math.sqrt(1 + 4 * params.xi * mean) / (2 * params.xi) * params.hbar / params.rest_energy


def default_time_grid(params: ModelParams, initial: InitialState) -> np.ndarray:
    """Six revival times (coherent) or three Rabi periods (Fock)."""
    if initial.kind == "coherent":
        return np.linspace(0.0, 6 * revival_time(initial.mean, params), 3000)
    period = 2 * math.pi / zitter(initial.n, params).omega_n
    return np.linspace(0.0, 3 * period, 600)


def _expectations(states, params, n_max):
    weights = np.abs(states) ** 2
    norms = weights.sum(axis=1)
    spin = np.concatenate([np.ones(n_max + 1), -np.ones(n_max + 1)])
    levels = Basis(n_max).fock_levels()
    Sz = 0.5 * params.hbar * (weights @ spin) / norms
    Lz = params.hbar * (weights @ levels) / norms
    return Sz, Lz, Sz + Lz


def _closed_states(params, initial, t, n_max):
    if initial.kind == "fock":
        return evolve_closed(initial.n, t, params, n_max)
    amps = coherent_vector(math.sqrt(initial.mean), n_max)
    out = np.zeros((np.size(t), 2 * (n_max + 1)), dtype=complex)
    for n, amp in enumerate(amps):
        if abs(amp) < 1e-16 or n + 3 > n_max:
            continue
        out += amp * evolve_closed(n, t, params, n_max)
    return out


def simulate(
    params: ModelParams,
    initial: InitialState,
    t=None,
    method: str = "numeric",
    n_max: int | None = None,
    factorial: str = "ns",
) -> TimeSeries:
    """Expectation values of ``Sz``, ``Lz``, ``Jz`` along a time grid."""
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")
    if t is None:
        t = default_time_grid(params, initial)
    t = np.asarray(t, dtype=float)
    if n_max is None:
        n_max = initial.default_n_max()
    if n_max < initial.required_n_max():
        raise TruncationError(
            f"n_max={n_max} too small for {initial.to_dict()}; need >= {initial.required_n_max()}",
            required_n_max=initial.required_n_max(),
        )
    meta = {
        "epsilon": params.epsilon,
        "xi": params.xi,
        "n_max": n_max,
        "method": method,
        "initial": initial.to_dict(),
    }
    if method == "series":
        if initial.kind != "coherent":
            raise ValidationError("the series method needs a coherent initial state")
        ts = printed_series(params, initial.mean, t, factorial=factorial)
        ts.meta.update(meta)
        return ts
    if method == "numeric":
        h, residual = hermitian_counterpart(params, n_max)
        states = Propagator(h, params.hbar).evolve(initial.vector(n_max), t)
        meta["discarded_antihermitian_residual"] = residual
    else:
        states = _closed_states(params, initial, t, n_max)
    return TimeSeries(t, *_expectations(states, params, n_max), meta=meta)


def delta_series(run_eps: TimeSeries, run_zero: TimeSeries) -> TimeSeries:
    if run_eps.t.shape != run_zero.t.shape or not np.array_equal(run_eps.t, run_zero.t):
        raise InvalidDimensionError("time grids differ")
    meta = {"kind": "delta", "deformed": run_eps.meta, "reference": run_zero.meta}
    return TimeSeries(
        run_eps.t, run_eps.Sz - run_zero.Sz, run_eps.Lz - run_zero.Lz, run_eps.Jz - run_zero.Jz, meta
    )


def printed_series(params: ModelParams, mean: float, t, factorial: str = "ns") -> TimeSeries:
    """Poisson-weighted expectation series for ``|alpha, up>``, term by term.

    The first-order weights read ``<n>^(n+1) e^-<n> / D``; ``factorial``
    picks ``D = n!`` (``"ns"``) or ``D = (n+1)!`` (``"ns+1"``, a plain
    Poisson weight at ``n + 1``). Sums stop once the Poisson tail drops
    below ``1e-12``.
    """
    if factorial not in ("ns", "ns+1"):
        raise ValueError(f"factorial must be 'ns' or 'ns+1', got {factorial!r}")
    t = np.asarray(t, dtype=float)
    xi, eps, hbar = params.xi, params.epsilon, params.hbar
    n_cut = int(poisson.isf(SERIES_TAIL_TOL, mean)) + 1 if mean > 0 else 0
    Phi = beat_frequency(params)

    def omega(n):
        return zitter(n, params).omega_n

    def S(n):
        k = 4 * xi * (n + 1)
        return k / (1 + k) * np.sin(omega(n) * t) ** 2

    Sz = np.full(t.shape, 0.5 * hbar)
    Lz = np.full(t.shape, hbar * mean)
    Jz = np.full(t.shape, hbar * (mean + 0.5))
    for n in range(n_cut + 1):
        log_mean = math.log(mean) if mean > 0 else -math.inf
        w0 = math.exp(n * log_mean - mean - gammaln(n + 1)) if mean > 0 else float(n == 0)
        denom = gammaln(n + 1) if factorial == "ns" else gammaln(n + 2)
        w1 = math.exp((n + 1) * log_mean - mean - denom) if mean > 0 else 0.0
        Sn, Sn2 = S(n), S(n + 2)
        Sz += -hbar * w0 * Sn + hbar * eps * w1 * (Sn - Sn2)
        Lz += hbar * w0 * Sn - hbar * eps * w1 * (Sn - Sn2)
        if w1:
            r1 = math.sqrt(1 + 4 * xi * (n + 1))
            r3 = math.sqrt(1 + 4 * xi * (n + 3))
            c0, s0 = np.cos(omega(n) * t), np.sin(omega(n) * t)
            c2, s2 = np.cos(omega(n + 2) * t), np.sin(omega(n + 2) * t)
            w = 2 * c0 * c2 + 2 * s0 * s2 / (r1 * r3)
            s = 2 * c2 * s0 / r1 - 2 * c0 * s2 / r3
            a0, _ = alpha_beta(n, params)
            a2, _ = alpha_beta(n + 2, params)
            p = 2 * a0 * a2 * s0 * s2
            norm = math.exp(0.5 * gammaln(n + 3))
            L = (
                4 * c_coeff(n + 2)
                - 2 * c_coeff(n + 2) * w * np.cos(Phi * t)
                - 2 * c_coeff(n + 2) * s * np.sin(Phi * t)
                - 2 * c_coeff(n + 3) * p * np.cos(Phi * t)
            ) / norm
            Lz += hbar * eps * w1 * L
            Jz += hbar * eps * w1 * L
    meta = {"method": "series", "factorial": factorial, "n_cut": n_cut, "epsilon": eps, "xi": xi}
    return TimeSeries(t, Sz, Lz, Jz, meta)


def inversion_baseline(params: ModelParams, mean: float) -> float:
    """Long-time average of ``<Sz>`` for ``|alpha, up>`` (undeformed)."""
    n_cut = int(poisson.isf(SERIES_TAIL_TOL, mean)) + 1 if mean > 0 else 0
    n = np.arange(n_cut + 1)
    k = 4 * params.xi * (n + 1)
    return float(params.hbar * (0.5 - np.sum(poisson.pmf(n, mean) * 0.5 * k / (1 + k))))


def collapse_revival_metrics(series: TimeSeries, params: ModelParams, mean: float) -> dict:
    """Envelope of ``<Sz>`` about its long-time mean in three windows.

    Windows in units of :func:`revival_time`: initial ``[0, 0.1]``,
    collapse ``[0.4, 0.6]``, revival ``[0.8, 1.2]``.
    """
    T = revival_time(mean, params)
    base = inversion_baseline(params, mean)
    dev = np.abs(series.Sz - base)

    def env(lo, hi):
        sel = (series.t >= lo * T) & (series.t <= hi * T)
        if not sel.any():
            raise ValidationError(f"time grid does not cover [{lo}, {hi}] x revival time")
        return float(dev[sel].max())

    initial, collapse, revival = env(0.0, 0.1), env(0.4, 0.6), env(0.8, 1.2)
    return {
        "revival_time": T,
        "baseline": base,
        "initial_envelope": initial,
        "collapse_envelope": collapse,
        "revival_envelope": revival,
        "collapse_ratio": collapse / initial,
        "revival_ratio": revival / initial,
    }


def plateau_metrics(values: np.ndarray, t: np.ndarray) -> dict:
    """Late-time level and residual wiggle of a saturating signal.

    ``late_mean`` averages the final third of the grid; ``late_spread`` is
    the standard deviation over the final sixth.
    """
    values = np.asarray(values)
    n = values.size
    late = values[2 * n // 3 :]
    tail = values[5 * n // 6 :]
    early = values[: max(n // 6, 1)]
    return {
        "initial_value": float(values[0]),
        "max_abs": float(np.max(np.abs(values))),
        "late_mean": float(late.mean()),
        "late_spread": float(tail.std()),
        "early_spread": float(early.std()),
        "t_start_late": float(t[2 * n // 3]),
    }
