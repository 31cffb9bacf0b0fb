import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mermin_cv.exceptions import InvalidParameterError, UnsupportedError
from mermin_cv.mermin import (
    MerminPolynomial,
    bounds,
    build_mermin,
    classical_bound,
    quantum_bound,
    reduce_with_identity,
)

M2 = "AB + A'B + AB' - A'B'"
M3 = "A'BC + AB'C + ABC' - A'B'C'"
M4_DOUBLED = """
    -ABCD
    + A'BCD + AB'CD + ABC'D + ABCD'
    + A'B'CD + A'BC'D + A'BCD' + AB'C'D + AB'CD' + ABC'D'
    - A'B'C'D - A'B'CD' - A'BC'D' - AB'C'D'
    - A'B'C'D'
"""


def test_m1_base():
    assert build_mermin(1).as_dict() == {(0,): 2}


def test_m2_is_chsh():
    assert build_mermin(2) == MerminPolynomial.parse(M2)


def test_m3_matches_expansion():
    assert build_mermin(3) == MerminPolynomial.parse(M3)


def test_doubled_m4_matches_expansion():
    doubled = 2 * build_mermin(4)
    expected = MerminPolynomial.parse(M4_DOUBLED.replace("\n", " "))
    assert doubled.as_dict() == expected.as_dict()
    assert len(doubled.terms) == 16
    assert all(abs(c) == 1 for c, _ in doubled.terms)


def test_terms_sorted_and_unique():
    for n in range(1, 7):
        poly = build_mermin(n)
        choices = [ch for _, ch in poly.terms]
        assert choices == sorted(set(choices))


@pytest.mark.parametrize(
    "n,magnitude,count",
    [(2, 1, 4), (3, 1, 4), (4, Fraction(1, 2), 16), (5, Fraction(1, 2), 16), (6, Fraction(1, 4), 64)],
)
def test_coefficient_magnitudes(n, magnitude, count):
    poly = build_mermin(n)
    assert {abs(c) for c, _ in poly.terms} == {magnitude}
    assert len(poly.terms) == count


@given(st.integers(1, 6))
def test_prime_swap_involution(n):
    poly = build_mermin(n)
    assert poly.prime_swap().prime_swap() == poly


def brute_classical(poly):
    best = 0.0
    for vals in itertools.product((-1, 1), repeat=2 * poly.n):
        best = max(best, abs(poly.evaluate(vals[0::2], vals[1::2])))
    return best


@pytest.mark.parametrize(
    "poly,expected",
    [(build_mermin(2), 2), (build_mermin(3), 2), (2 * build_mermin(4), 4)],
)
def test_classical_bounds(poly, expected):
    assert classical_bound(poly) == expected
    assert brute_classical(poly) == expected


def test_classical_bound_enumeration_limit():
    with pytest.raises(UnsupportedError):
        classical_bound(build_mermin(7))


def test_quantum_bounds():
    assert quantum_bound(2) == pytest.approx(2 * math.sqrt(2))
    assert quantum_bound(3) == 4
    assert 2 * quantum_bound(4) == pytest.approx(8 * math.sqrt(2))
    assert bounds(2 * build_mermin(4)).quantum == pytest.approx(8 * math.sqrt(2))
    with pytest.raises(InvalidParameterError):
        quantum_bound(1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_bound_ordering(n):
    assert classical_bound(build_mermin(n)) < quantum_bound(n)


def test_reduce_m3_to_m2():
    assert reduce_with_identity(build_mermin(3), {2: 1}) == build_mermin(2)


def test_reduce_m2_to_2a():
    assert reduce_with_identity(build_mermin(2), {1: 1}).as_dict() == {(0,): 2}


def test_reduce_m4_to_m3():
    assert reduce_with_identity(build_mermin(4), {3: 1}).as_dict() == build_mermin(3).as_dict()


def test_reduce_validates():
    with pytest.raises(InvalidParameterError):
        reduce_with_identity(build_mermin(3), {3: 1})
    with pytest.raises(InvalidParameterError):
        reduce_with_identity(build_mermin(3), {0: 2})


def test_str_round_trip():
    poly = 2 * build_mermin(4)
    assert MerminPolynomial.parse(str(poly)).as_dict() == poly.as_dict()
    assert MerminPolynomial.parse(str(build_mermin(4))).as_dict() == build_mermin(4).as_dict()
    assert build_mermin(4).terms[0][0] == Fraction(-1, 2)
