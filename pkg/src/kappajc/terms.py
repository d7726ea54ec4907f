"""Symbolic operator sums: coefficient x spin operator x bosonic word.

A ladder symbol is ``(kind, chirality)`` with ``kind`` ``"+"`` (creation) or
``"-"`` (annihilation) and ``chirality`` in ``{+1, -1}``. Spin factors are
``"1"``, ``"z"``, ``"+"`` and ``"-"``.

Canonical form: every word is normal ordered (creators left of
annihilators, each group sorted by chirality, ``+1`` first), duplicate
``(spin, word)`` pairs are merged and exact zeros are dropped. Ordering
uses the single-mode commutator ``[a-_c, a+_c] = 1``; different chiralities
commute.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .fock import kron, ladder_word, pauli

SPINS = ("1", "z", "+", "-")
_SPIN_MATRIX = {"1": "identity", "z": "z", "+": "plus", "-": "minus"}

Symbol = tuple  # (kind, chirality)
Word = tuple  # tuple[Symbol, ...]


def _sort_key(sym):
    kind, chir = sym
    return (0 if kind == "+" else 1, -chir)


def normal_order(word) -> dict:
    """Expand a ladder word into ``{normal-ordered word: integer weight}``."""
    word = tuple(word)
    for sym in word:
        if sym[0] not in "+-" or sym[1] not in (1, -1):
            raise ValueError(f"bad ladder symbol {sym!r}")
    for i in range(len(word) - 1):
        left, right = word[i], word[i + 1]
        if _sort_key(left) <= _sort_key(right):
            continue
        swapped = word[:i] + (right, left) + word[i + 2 :]
        out = defaultdict(int)
        for w, k in normal_order(swapped).items():
            out[w] += k
        if left == ("-", right[1]) and right[0] == "+":
            for w, k in normal_order(word[:i] + word[i + 2 :]).items():
                out[w] += k
        return {w: k for w, k in out.items() if k}
    return {word: 1}


@dataclass(frozen=True)
class Term:
    coeff: complex
    spin: str
    word: Word


def _fmt_coeff(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:+.6g}"
    if z.real == 0:
        return f"{z.imag:+.6g}i"
    return f"({z.real:.6g}{z.imag:+.6g}i)"


def _fmt_word(word) -> str:
    if len(word) == 2 and word[0][0] == "+" and word[1] == ("-", word[0][1]):
        return f"N[{word[0][1]:+d}]"
    return "*".join(f"a{kind}[{chir:+d}]" for kind, chir in word)


class TermSum:
    """Immutable canonical operator sum."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc = defaultdict(complex)
        for t in terms:
            if isinstance(t, Term):
                coeff, spin, word = t.coeff, t.spin, t.word
            else:
                coeff, spin, word = t
            if spin not in SPINS:
                raise ValueError(f"unknown spin factor {spin!r}")
            for w, k in normal_order(word).items():
                acc[(spin, w)] += k * complex(coeff)
        items = sorted(
            ((key, c) for key, c in acc.items() if c != 0),
            key=lambda kv: (SPINS.index(kv[0][0]), len(kv[0][1]), [_sort_key(s) for s in kv[0][1]]),
        )
        self._terms = tuple(Term(c, spin, w) for (spin, w), c in items)

    @property
    def terms(self) -> tuple:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def as_dict(self) -> dict:
        return {(t.spin, t.word): t.coeff for t in self._terms}

    def canonical(self) -> "TermSum":
        return TermSum(self._terms)

    def __add__(self, other):
        return TermSum(self._terms + other._terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "TermSum":
        return TermSum((t.coeff * factor, t.spin, t.word) for t in self._terms)

    def equals(self, other: "TermSum", tol: float = 1e-12) -> bool:
        a, b = self.as_dict(), other.as_dict()
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= tol for k in set(a) | set(b))

    def chiralities(self) -> set:
        return {chir for t in self._terms for _, chir in t.word}

    def coefficient(self, spin: str, word=()) -> complex:
        return self.as_dict().get((spin, tuple(word)), 0j)

    def to_matrix(self, n_max: int) -> np.ndarray:
        """Single-mode realisation on the spin-major composite basis.

        Chirality labels are ignored, so the sum must involve at most one.
        """
        if len(self.chiralities()) > 1:
            raise ValueError("single-mode realisation needs a single chirality")
        dim = 2 * (n_max + 1)
        out = np.zeros((dim, dim), dtype=complex)
        for t in self._terms:
            p = sum(1 for kind, _ in t.word if kind == "+")
            q = len(t.word) - p
            out += t.coeff * kron(pauli(_SPIN_MATRIX[t.spin]), ladder_word(p, q, n_max))
        return out

    def to_matrix_two_mode(self, n_max: int) -> np.ndarray:
        """Realisation on spin (x) mode(+1) (x) mode(-1), each mode cut at ``n_max``."""
        levels = n_max + 1
        out = np.zeros((2 * levels**2,) * 2, dtype=complex)
        ident = np.eye(levels)
        for t in self._terms:
            mats = {}
            for chir in (1, -1):
                syms = [k for k, c in t.word if c == chir]
                p = syms.count("+")
                mats[chir] = ladder_word(p, len(syms) - p, n_max) if syms else ident
            out += t.coeff * np.kron(pauli(_SPIN_MATRIX[t.spin]), np.kron(mats[1], mats[-1]))
        return out

    def __repr__(self):
        return f"TermSum({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        chunks = []
        for t in self._terms:
            ops = []
            if t.spin != "1":
                ops.append({"z": "sz", "+": "s+", "-": "s-"}[t.spin])
            if t.word:
                ops.append(_fmt_word(t.word))
            chunks.append(_fmt_coeff(t.coeff) + ("*" + "*".join(ops) if ops else ""))
        return " ".join(chunks)
