"""Mermin polynomials, their local-realistic bounds and quantum bounds.

A polynomial over ``n`` parties is a sum of signed monomials; each monomial
picks, for every party, either the unprimed observable ``A_i`` (flag 0) or the
primed one ``A_i'`` (flag 1).  Coefficients are kept as exact fractions.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import InvalidParameterError, UnsupportedError

PARTY_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
MAX_ENUMERATION_PARTIES = 6


@dataclass(frozen=True)
class MerminPolynomial:
    """Collected signed monomials, ordered lexicographically by choice vector.

    ``scale`` records a global multiplier applied after the recursion (the
    four-party polynomial is customarily reported as ``2 M_4``); it scales the
    quantum bound accordingly.
    """

    n: int
    terms: tuple
    scale: Fraction = Fraction(1)

    @classmethod
    def from_mapping(cls, n, mapping, scale=Fraction(1)):
        terms = tuple(
            (Fraction(c), tuple(int(f) for f in choice))
            for choice, c in sorted(mapping.items())
            if c != 0
        )
        for _, choice in terms:
            if len(choice) != n:
                raise InvalidParameterError(f"choice vector {choice} has length != {n}")
        return cls(n, terms, Fraction(scale))

    def as_dict(self) -> dict:
        return {choice: c for c, choice in self.terms}

    def prime_swap(self):
        """Exchange primed and unprimed observables on every party."""
        return MerminPolynomial.from_mapping(
            self.n, {tuple(1 - f for f in ch): c for c, ch in self.terms}, self.scale
        )

    def __mul__(self, factor):
        factor = Fraction(factor)
        return MerminPolynomial.from_mapping(
            self.n, {ch: c * factor for c, ch in self.terms}, self.scale * factor
        )

    __rmul__ = __mul__

    def evaluate(self, unprimed, primed) -> float:
        """Value under a deterministic assignment of ``A_i`` and ``A_i'``."""
        total = Fraction(0)
        for c, choice in self.terms:
            prod = 1
            for i, f in enumerate(choice):
                prod *= primed[i] if f else unprimed[i]
            total += c * prod
        return float(total)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for k, (c, choice) in enumerate(self.terms):
            mono = "".join(PARTY_LETTERS[i] + ("'" if f else "") for i, f in enumerate(choice))
            mag = abs(c)
            coef = "" if mag == 1 else f"{mag}"
            sign = "-" if c < 0 else "+"
            if k == 0:
                out.append(("-" if c < 0 else "") + coef + mono)
            else:
                out.append(f" {sign} {coef}{mono}")
        return "".join(out)

    @classmethod
    def parse(cls, text, n=None):
        """Parse expressions like ``"A'BC + AB'C + ABC' - A'B'C'"``."""
        tokens = re.findall(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*((?:[A-Z]'?)+)", text.replace(" ", ""))
        if not tokens:
            raise InvalidParameterError(f"cannot parse polynomial {text!r}")
        mapping = {}
        for sign, coef, mono in tokens:
            letters = re.findall(r"([A-Z])('?)", mono)
            parties = [PARTY_LETTERS.index(letter) for letter, _ in letters]
            if parties != list(range(len(parties))):
                raise InvalidParameterError(f"monomial {mono!r} must list parties in order")
            width = n if n is not None else len(parties)
            if len(parties) != width:
                raise InvalidParameterError(f"monomial {mono!r} does not cover {width} parties")
            choice = tuple(1 if prime else 0 for _, prime in letters)
            value = Fraction(coef) if coef else Fraction(1)
            mapping[choice] = mapping.get(choice, 0) + (-value if sign == "-" else value)
            n = width
        return cls.from_mapping(n, mapping)


def _times_party(poly: MerminPolynomial, plus_sign) -> dict:
    """``poly * (A_new + A_new')`` or ``poly * (A_new - A_new')`` as a mapping."""
    out = {}
    for c, choice in poly.terms:
        out[choice + (0,)] = out.get(choice + (0,), 0) + c
        out[choice + (1,)] = out.get(choice + (1,), 0) + (c if plus_sign else -c)
    return out


def build_mermin(n) -> MerminPolynomial:
    """Mermin polynomial ``M_n`` via the standard recursion from ``M_1 = 2 A_1``.

    ``M_n = (M_{n-1} (A_n + A_n') + M'_{n-1} (A_n - A_n')) / 2`` where the
    prime denotes swapping primed and unprimed observables everywhere.
    """
    if n < 1:
        raise InvalidParameterError(f"party count must be >= 1, got {n}")
    poly = MerminPolynomial.from_mapping(1, {(0,): 2})
    half = Fraction(1, 2)
    for k in range(2, n + 1):
        left = _times_party(poly, True)
        right = _times_party(poly.prime_swap(), False)
        mapping = {
            ch: half * (left.get(ch, 0) + right.get(ch, 0)) for ch in set(left) | set(right)
        }
        poly = MerminPolynomial.from_mapping(k, mapping)
    return poly


def classical_bound(poly: MerminPolynomial) -> float:
    """Max of ``|poly|`` over all ``4**n`` deterministic ``±1`` assignments."""
    n = poly.n
    if n > MAX_ENUMERATION_PARTIES:
        raise UnsupportedError(
            f"enumerating 4**{n} assignments is not supported (max n = {MAX_ENUMERATION_PARTIES})"
        )
    # rows: assignments; columns: (A_0, A_0', A_1, A_1', ...)
    values = np.array(list(itertools.product((-1, 1), repeat=2 * n)), dtype=np.int64)
    values = values.reshape(-1, n, 2)
    total = np.zeros(values.shape[0])
    for c, choice in poly.terms:
        prod = np.ones(values.shape[0], dtype=np.int64)
        for i, f in enumerate(choice):
            prod *= values[:, i, f]
        total += float(c) * prod
    return float(np.abs(total).max())


def quantum_bound(n) -> float:
    """Tsirelson-type bound ``2**((n + 1) / 2)`` on ``|<M_n>|``."""
    if n < 2:
        raise InvalidParameterError(f"quantum bound needs n >= 2, got {n}")
    return 2.0 ** ((n + 1) / 2)


@dataclass(frozen=True)
class BoundPair:
    classical: float
    quantum: float


def bounds(poly: MerminPolynomial) -> BoundPair:
    """Classical (enumerated) and quantum bounds for a possibly scaled ``M_n``."""
    return BoundPair(classical_bound(poly), float(poly.scale) * quantum_bound(poly.n))


def reduce_with_identity(poly: MerminPolynomial, fixed) -> MerminPolynomial:
    """Substitute ``A_i = A_i' = s`` for each ``i -> s`` in ``fixed`` (0-based).

    Fixed parties are dropped, so the result has ``n - len(fixed)`` parties.
    """
    for i, s in fixed.items():
        if not 0 <= i < poly.n:
            raise InvalidParameterError(f"party {i} out of range for n = {poly.n}")
        if s not in (1, -1):
            raise InvalidParameterError(f"fixed value must be +1 or -1, got {s}")
    keep = [i for i in range(poly.n) if i not in fixed]
    mapping = {}
    for c, choice in poly.terms:
        sign = math.prod(fixed.values()) if fixed else 1
        reduced = tuple(choice[i] for i in keep)
        mapping[reduced] = mapping.get(reduced, 0) + c * sign
    return MerminPolynomial.from_mapping(len(keep), mapping, poly.scale)
