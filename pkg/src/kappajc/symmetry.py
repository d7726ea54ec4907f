"""Parity / time-reversal rewrite engine and symmetry verdicts.

A :class:`TransformRule` maps each primitive symbol to ``factor * symbol'``
and may be antiunitary (complex-conjugating coefficients). Primitive
symbols are ``("a", kind, chirality)`` for ladder operators and
``("s", spin)`` for ``sz``, ``s+``, ``s-``.

Two tables are provided. ``PRINTED_RULES`` encodes the action list as it is
usually quoted: ``P a_s P^-1 = a_-s``, ``T a_s T^-1 = -a_s``,
``T sz T^-1 = -sz``, ``T s+- T^-1 = s-+``. With it, ``P sz`` does not leave
the deformed Hamiltonian invariant and ``T sx`` keeps the chirality. The
default ``RULES`` move the chirality flip onto ``T`` (``T a_s T^-1 = -a_-s``)
and give ``P`` the sign (``P a_s P^-1 = -a_s``), which is what 2D inversion
and antiunitary time reversal do to chiral quanta; with it the three
statements (PT broken, ``P sz`` invariant, ``T sx`` flips chirality) hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RewriteError
from .fock import pauli
from .params import ModelParams
from .models import terms_kappa
from .terms import TermSum

LADDER_SYMBOLS = tuple(("a", kind, chir) for kind in "+-" for chir in (1, -1))
SPIN_SYMBOLS = (("s", "z"), ("s", "+"), ("s", "-"))
SYMBOLS = LADDER_SYMBOLS + SPIN_SYMBOLS


@dataclass(frozen=True)
class TransformRule:
    name: str
    table: dict
    antiunitary: bool = False

    def apply_symbol(self, sym):
        try:
            return self.table[sym]
        except KeyError:
            raise RewriteError(f"rule {self.name!r} has no entry for symbol {sym!r}") from None

    def then(self, outer: "TransformRule", name: str | None = None) -> "TransformRule":
        """Rule equivalent to applying ``self`` first and ``outer`` second."""
        table = {}
        for sym in SYMBOLS:
            f1, mid = self.apply_symbol(sym)
            f2, out = outer.apply_symbol(mid)
            if outer.antiunitary:
                f1 = np.conj(f1)
            table[sym] = (f1 * f2, out)
        return TransformRule(name or f"{outer.name}{self.name}", table, self.antiunitary != outer.antiunitary)

    def is_identity(self) -> bool:
        return not self.antiunitary and all(self.table[s] == (1, s) for s in SYMBOLS)


def ladder_table(factor, flip_chirality):
    return {
        ("a", kind, chir): (factor, ("a", kind, -chir if flip_chirality else chir))
        for kind in "+-"
        for chir in (1, -1)
    }


def spin_table(z_factor, pm_factor, swap):
    return {
        ("s", "z"): (z_factor, ("s", "z")),
        ("s", "+"): (pm_factor, ("s", "-" if swap else "+")),
        ("s", "-"): (pm_factor, ("s", "+" if swap else "-")),
    }


def make_rules(parity: TransformRule, time_reversal: TransformRule) -> dict:
    """Complete rule set (``P``, ``T``, ``PT``, ``P_sigma_z``, ``T_sigma_x``)."""
    sz = TransformRule("sigma_z", {**ladder_table(1, False), **spin_table(1, -1, False)})
    sx = TransformRule("sigma_x", {**ladder_table(1, False), **spin_table(-1, 1, True)})
    return {
        "P": parity,
        "T": time_reversal,
        "sigma_z": sz,
        "sigma_x": sx,
        "PT": time_reversal.then(parity, "PT"),
        "P_sigma_z": sz.then(parity, "P_sigma_z"),
        "T_sigma_x": sx.then(time_reversal, "T_sigma_x"),
    }


PRINTED_RULES = make_rules(
    TransformRule("P", {**ladder_table(1, True), **spin_table(1, 1, False)}),
    TransformRule("T", {**ladder_table(-1, False), **spin_table(-1, 1, True)}, antiunitary=True),
)

RULES = make_rules(
    TransformRule("P", {**ladder_table(-1, False), **spin_table(1, 1, False)}),
    TransformRule("T", {**ladder_table(-1, True), **spin_table(-1, 1, True)}, antiunitary=True),
)


def transform(ts: TermSum, rule: TransformRule) -> TermSum:
    out = []
    for term in ts:
        coeff = np.conj(term.coeff) if rule.antiunitary else term.coeff
        spin = term.spin
        if spin != "1":
            f, (_, spin) = rule.apply_symbol(("s", spin))
            coeff = coeff * f
        word = []
        for kind, chir in term.word:
            f, (_, kind2, chir2) = rule.apply_symbol(("a", kind, chir))
            coeff = coeff * f
            word.append((kind2, chir2))
        out.append((coeff, spin, tuple(word)))
    return TermSum(out)


_SPIN_UNITARIES = {
    (1, 1, False): "identity",
    (1, -1, False): "z",
    (-1, 1, True): "x",
    (-1, -1, True): "y",
}


def rule_unitary(rule: TransformRule, n_max: int) -> np.ndarray:
    """Unitary ``U`` on spin (x) mode(+1) (x) mode(-1) implementing ``rule``.

    For antiunitary rules the operator is ``U K`` with ``K`` complex
    conjugation in the number basis.
    """
    factors = {rule.apply_symbol(s)[0] for s in LADDER_SYMBOLS}
    flips = {rule.apply_symbol(s)[1][2] != s[2] for s in LADDER_SYMBOLS}
    kinds_kept = all(rule.apply_symbol(s)[1][1] == s[1] for s in LADDER_SYMBOLS)
    if len(factors) != 1 or len(flips) != 1 or not kinds_kept or factors.pop() not in (1, -1):
        raise RewriteError(f"rule {rule.name!r} has no single-unitary ladder realisation")
    f = rule.apply_symbol(LADDER_SYMBOLS[0])[0]
    flip = flips.pop()
    levels = n_max + 1
    parity_1 = np.diag((-1.0) ** np.arange(levels))
    mode = np.kron(parity_1, parity_1) if f == -1 else np.eye(levels**2)
    if flip:
        swap = np.zeros((levels**2, levels**2))
        for i in range(levels):
            for j in range(levels):
                swap[j * levels + i, i * levels + j] = 1.0
        mode = swap @ mode
    z_f, (_, z_to) = rule.apply_symbol(("s", "z"))
    p_f, (_, p_to) = rule.apply_symbol(("s", "+"))
    m_f, (_, m_to) = rule.apply_symbol(("s", "-"))
    key = (z_f, p_f, p_to == "-")
    if z_to != "z" or m_f != p_f or (m_to == "+") != (p_to == "-") or key not in _SPIN_UNITARIES:
        raise RewriteError(f"rule {rule.name!r} has no single-unitary spin realisation")
    return np.kron(pauli(_SPIN_UNITARIES[key]), mode)


def transform_matrix(M: np.ndarray, rule: TransformRule, n_max: int) -> np.ndarray:
    U = rule_unitary(rule, n_max)
    inner = np.conj(M) if rule.antiunitary else M
    return U @ inner @ U.conj().T


def matrix_consistency(ts: TermSum, rule: TransformRule, n_max: int = 12) -> float:
    """Max entrywise gap between the symbolic and the matrix transform."""
    direct = transform_matrix(ts.to_matrix_two_mode(n_max), rule, n_max)
    symbolic = transform(ts, rule).to_matrix_two_mode(n_max)
    return float(np.max(np.abs(direct - symbolic)))


@dataclass
class SymmetryReport:
    pt_invariant: bool
    p_sigma_z_invariant: bool
    t_sigma_x_flips_chirality: bool
    involutions_hold: bool
    matrix_consistency: dict
    transformed: dict
    identity_coefficient: dict
    tolerance: float = 1e-12
    notes: list = field(default_factory=list)

    @property
    def verdicts(self) -> dict:
        return {
            "PT_invariant": self.pt_invariant,
            "P_sigma_z_invariant": self.p_sigma_z_invariant,
            "T_sigma_x_flips_chirality": self.t_sigma_x_flips_chirality,
        }

    @property
    def as_expected(self) -> bool:
        return (
            not self.pt_invariant
            and self.p_sigma_z_invariant
            and self.t_sigma_x_flips_chirality
            and self.involutions_hold
        )

    def to_dict(self) -> dict:
        return {
            "verdicts": self.verdicts,
            "as_expected": self.as_expected,
            "involutions_hold": self.involutions_hold,
            "matrix_consistency_max_gap": self.matrix_consistency,
            "transformed": self.transformed,
            "identity_coefficient": self.identity_coefficient,
            "tolerance": self.tolerance,
            "notes": self.notes,
        }


def audit_symmetries(
    params: ModelParams, rules: dict | None = None, tol: float = 1e-12, matrix_n_max: int = 12
) -> SymmetryReport:
    rules = RULES if rules is None else rules
    H = terms_kappa(params)
    H_flipped = terms_kappa(params.with_(s=-params.s))
    pt = transform(H, rules["PT"])
    psz = transform(H, rules["P_sigma_z"])
    tsx = transform(H, rules["T_sigma_x"])

    samples = [H, H_flipped, pt, TermSum([(1.0, "+", (("+", 1), ("-", -1))), (2j, "z", (("-", 1), ("-", 1)))])]
    involutions = all(transform(transform(x, r), r).equals(x, tol) for r in rules.values() for x in samples)

    consistency = {}
    for name in ("P", "T", "PT", "P_sigma_z", "T_sigma_x"):
        try:
            consistency[name] = matrix_consistency(H, rules[name], matrix_n_max)
        except RewriteError as exc:
            consistency[name] = str(exc)

    C = params.identity_coeff
    display = params.rest_energy * params.epsilon * params.xi
    C_after = pt.coefficient("1").real
    identity = {
        "input": C,
        "after_PT": C_after,
        "printed_display": display,
        "display_matches_transform": abs(C_after - display) <= tol,
        "input_needed_for_display": display,
    }
    return SymmetryReport(
        pt_invariant=pt.equals(H, tol),
        p_sigma_z_invariant=psz.equals(H, tol),
        t_sigma_x_flips_chirality=tsx.equals(H_flipped, tol) and not H_flipped.equals(H, tol),
        involutions_hold=involutions,
        matrix_consistency=consistency,
        transformed={"H": str(H), "PT": str(pt), "P_sigma_z": str(psz), "T_sigma_x": str(tsx), "H_flipped": str(H_flipped)},
        identity_coefficient=identity,
        tolerance=tol,
    )
