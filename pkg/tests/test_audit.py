import json

import numpy as np
import pytest

from kappajc.audit import (
    commutator_audit,
    eigenstate_audit,
    evolved_state_audit,
    expectation_identity_check,
    hermitian_counterpart_audit,
    identity_coefficient_fit,
    run_audit,
    series_audit,
)
from kappajc.params import ModelParams

P = ModelParams.from_xi(1.0)


def test_identity_fit_selects_minus_two():
    out = identity_coefficient_fit(P)
    assert out["least_squares_in_units"] == pytest.approx(-2, abs=1e-6)
    assert out["best_candidate_in_units"] == -2
    errs = out["candidate_max_error"]
    assert errs["-2"] < 1e-5 < min(errs["-1"], errs["+1"], errs["+2"])


def test_identity_fit_ajc():
    out = identity_coefficient_fit(P.with_(branch="ajc"))
    assert out["consistent_is_minus_two"]


def test_commutator_coefficient():
    out = commutator_audit(P)
    assert out["pattern_overlap"] >= 0.999
    assert out["coefficient_over_eps_hbar2_g"][0] == pytest.approx(4, rel=1e-4)
    assert out["from_closed_form_h"]["coefficient_over_eps_hbar2_g"][0] == pytest.approx(2)


def test_hermitian_counterpart_factor():
    out = hermitian_counterpart_audit(P)
    assert out["counter_rotating_coeff_numeric_over_eps_hbar"] == pytest.approx(2, rel=1e-4)
    assert out["counter_rotating_coeff_closed_form_over_eps_hbar"] == pytest.approx(1)
    assert out["spectrum_error_numeric_h"] < 1e-5 < out["spectrum_error_closed_form_h"]
    assert "skipped" in hermitian_counterpart_audit(P.with_(branch="ajc"))


def test_eigenstate_satellite_uses_shifted_c():
    out = eigenstate_audit(P, n_top=4)
    assert out["max_fidelity_loss"] <= 1e-4
    for row in out["rows"]:
        if "n_minus_1_down_numeric" in row and row["n"] >= 2:
            num = row["n_minus_1_down_numeric"]
            assert abs(num - row["n_minus_1_down_with_c_n_plus_1"]) < abs(num - row["n_minus_1_down_with_c_n"])


def test_evolved_state_sign():
    out = evolved_state_audit(P, n_top=4, n_t=60)
    assert out["worst_fidelity_loss_mapped_sign"] < out["worst_fidelity_loss_quoted_sign"] <= 1e-3


def test_series_audit_small():
    t = np.linspace(0, 40, 400)
    out = series_audit(P, mean=9.0, t=t)
    for reading in ("ns", "ns+1"):
        assert out[reading]["series_dJz_max_abs"] < abs(out["numeric_dJz_late_mean"])
        assert out[reading]["max_dev_Sz"] >= 0


def test_expectation_identity_is_seeded():
    a = expectation_identity_check(P, 20, n_states=5, seed=4)
    b = expectation_identity_check(P, 20, n_states=5, seed=4)
    assert a == b
    assert a["max_relative_diff"] <= 1e-10


def test_run_audit_is_consistent_and_serialisable():
    report = run_audit(P)
    assert report["internally_consistent"]
    assert report["spectrum_by_convention"]["consistent"]["passed"]
    assert not report["spectrum_by_convention"]["printed"]["passed"]
    json.dumps(report, default=str)
