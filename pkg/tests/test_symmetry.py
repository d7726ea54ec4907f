import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kappajc.errors import RewriteError
from kappajc.models import terms_kappa
from kappajc.params import ModelParams
from kappajc.symmetry import (
    PRINTED_RULES,
    RULES,
    SYMBOLS,
    TransformRule,
    audit_symmetries,
    matrix_consistency,
    transform,
)
from kappajc.terms import TermSum

P = ModelParams.from_xi(1.0)

term_lists = st.lists(
    st.tuples(
        st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        st.sampled_from(("1", "z", "+", "-")),
        st.lists(st.tuples(st.sampled_from("+-"), st.sampled_from((1, -1))), max_size=3).map(tuple),
    ),
    max_size=4,
)


def test_time_reversal_flips_sigma_z():
    ts = TermSum([(0.7, "z", ())])
    assert transform(ts, RULES["T"]).coefficient("z") == -0.7
    assert transform(ts, PRINTED_RULES["T"]).coefficient("z") == -0.7


def test_antiunitary_rules_conjugate():
    ts = TermSum([(1j, "1", ())])
    assert transform(ts, RULES["T"]).coefficient("1") == -1j
    assert transform(ts, RULES["P"]).coefficient("1") == 1j


def test_pt_on_coupling_term():
    g = P.g
    ts = TermSum([(g, "-", (("+", 1),))])
    out = transform(ts, RULES["PT"])
    # a+ picks up -1 from T and +-1 from P, g -> g* = -g under conjugation
    assert out.coefficient("+", (("+", -1),)) == pytest.approx(-g)
    out = transform(ts, PRINTED_RULES["PT"])
    assert out.coefficient("+", (("+", -1),)) == pytest.approx(g)


@settings(max_examples=60)
@given(term_lists, st.sampled_from(sorted(RULES)), st.booleans())
def test_rules_are_involutions(terms, name, printed):
    rules = PRINTED_RULES if printed else RULES
    ts = TermSum(terms)
    assert transform(transform(ts, rules[name]), rules[name]).equals(ts)


def test_composition_matches_sequential_application():
    H = terms_kappa(P)
    for rules in (RULES, PRINTED_RULES):
        step = transform(transform(H, rules["T"]), rules["P"])
        assert step.equals(transform(H, rules["PT"]))


def test_unknown_symbol_raises():
    broken = TransformRule("broken", {})
    with pytest.raises(RewriteError):
        transform(TermSum([(1.0, "z", ())]), broken)


@pytest.mark.parametrize("branch", ["jc", "ajc"])
@pytest.mark.parametrize("eps", [0.0, 5e-4])
def test_verdicts(branch, eps):
    rep = audit_symmetries(P.with_(branch=branch, epsilon=eps))
    assert rep.verdicts == {"PT_invariant": False, "P_sigma_z_invariant": True, "T_sigma_x_flips_chirality": True}
    assert rep.involutions_hold and rep.as_expected
    assert all(gap <= 1e-12 for gap in rep.matrix_consistency.values())


def test_pt_flips_detuning_sign():
    rep = audit_symmetries(P)
    pt = transform(terms_kappa(P), RULES["PT"])
    assert pt.coefficient("z") == pytest.approx(-P.delta_eps)
    assert "-0.999*sz" in rep.transformed["PT"]


def test_quoted_table_fails_two_verdicts():
    rep = audit_symmetries(P, rules=PRINTED_RULES)
    assert rep.verdicts == {"PT_invariant": False, "P_sigma_z_invariant": False, "T_sigma_x_flips_chirality": False}
    assert not rep.as_expected


def test_matrix_consistency_for_every_rule():
    H = terms_kappa(P)
    extra = TermSum([(0.3j, "+", (("+", 1), ("-", -1))), (1.5, "z", (("+", -1), ("-", -1)))])
    for rules in (RULES, PRINTED_RULES):
        for name in ("P", "T", "PT", "P_sigma_z", "T_sigma_x"):
            assert matrix_consistency(H + extra, rules[name], n_max=5) <= 1e-12


def test_identity_coefficient_display():
    rep = audit_symmetries(P)
    info = rep.identity_coefficient
    assert info["after_PT"] == pytest.approx(P.identity_coeff)
    assert info["printed_display"] == pytest.approx(P.epsilon * P.xi)
    assert not info["display_matches_transform"]


def test_rule_tables_cover_all_symbols():
    for rules in (RULES, PRINTED_RULES):
        for rule in rules.values():
            assert set(rule.table) == set(SYMBOLS)
    assert not RULES["P"].is_identity()
    assert RULES["P"].then(RULES["P"]).is_identity()
    assert len(RULES) == 7
