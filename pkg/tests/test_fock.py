import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mermin_cv.exceptions import (
    DegenerateStateError,
    InvalidParameterError,
    ShapeError,
    TruncationError,
)
from mermin_cv.fock import (
    EntangledStateSpec,
    SparseKet,
    adaptive_cutoff,
    branch_kets,
    build_entangled_state,
    coherent_coefficients,
    inner_product,
    two_mode_squeezed_ket,
)

unit = st.floats(min_value=0.01, max_value=0.95)


def test_coherent_vacuum():
    coeffs, tail = coherent_coefficients(0.0, 4)
    np.testing.assert_array_equal(coeffs, [1.0, 0.0, 0.0, 0.0])
    assert tail == 0.0


def test_coherent_normalization_and_ratio():
    coeffs, tail = coherent_coefficients(0.4, 32)
    # direct summation of the closed form
    direct = sum(math.exp(-0.16) * 0.16**n / math.factorial(n) for n in range(32))
    assert abs(np.sum(coeffs**2) - 1) < 1e-12
    assert abs(np.sum(coeffs**2) - direct) < 1e-15
    assert coeffs[1] / coeffs[0] == pytest.approx(0.4, rel=1e-15)
    assert tail < 1e-40


def test_coherent_tail_matches_complement():
    coeffs, tail = coherent_coefficients(0.9, 6)
    assert tail == pytest.approx(1 - np.sum(coeffs**2), rel=1e-9)


@pytest.mark.parametrize("bad", [math.nan, math.inf, 0.3 + 0.1j])
def test_coherent_rejects_bad_alpha(bad):
    with pytest.raises(InvalidParameterError):
        coherent_coefficients(bad, 4)


@pytest.mark.parametrize("cutoff", [0, 3, 7, 2.0])
def test_cutoff_must_be_even_integer(cutoff):
    with pytest.raises(InvalidParameterError):
        coherent_coefficients(0.3, cutoff)


def test_two_mode_squeezed_small():
    ket = two_mode_squeezed_ket(0.5, 4)
    r = math.sqrt(0.75)
    expected = {(0, 0): r, (1, 1): r * 0.5, (2, 2): r * 0.25, (3, 3): r * 0.125}
    assert set(ket.amplitudes) == set(expected)
    for idx, amp in expected.items():
        assert ket[idx] == pytest.approx(amp, abs=1e-16)
    assert (0, 1) not in ket
    assert ket.tail_mass == pytest.approx(0.5**8)


def test_two_mode_squeezed_norm_high_eta():
    spec = EntangledStateSpec.squeezed_squeezed(0.9, 0.9 - 1e-3)
    cutoff = adaptive_cutoff(spec)
    ket = two_mode_squeezed_ket(0.9, cutoff)
    # geometric series: 1 - eta^(2N)
    assert abs(ket.norm_squared() - 1) < 1e-12
    assert abs(ket.norm_squared() - (1 - 0.9 ** (2 * cutoff))) < 1e-14


@pytest.mark.parametrize("eta", [0.0, 1.0, -0.2, 1.3])
def test_two_mode_squeezed_domain(eta):
    with pytest.raises(InvalidParameterError):
        two_mode_squeezed_ket(eta, 4)


def test_basis_orthogonality():
    a = SparseKet.basis((0, 0), 4)
    b = SparseKet.basis((1, 1), 4)
    assert inner_product(a, b) == 0
    assert inner_product(a, a) == 1


def test_inner_product_shape_mismatch():
    with pytest.raises(ShapeError):
        inner_product(SparseKet.basis((0, 0), 4), SparseKet.basis((0, 0), 6))
    with pytest.raises(ShapeError):
        inner_product(SparseKet.basis((0, 0), 4), SparseKet.basis((0, 0, 0), 4))


def test_squeezed_overlap_geometric_sum():
    bra = two_mode_squeezed_ket(0.3, 40)
    ket = two_mode_squeezed_ket(0.5, 40)
    expected = math.sqrt(1 - 0.09) * math.sqrt(1 - 0.25) / (1 - 0.15)
    assert abs(inner_product(bra, ket) - expected) < 1e-10


@given(unit, unit)
@settings(max_examples=40, deadline=None)
def test_overlap_oracle_property(eta, alpha):
    n = 2 * math.ceil(math.log(1e-14) / (2 * math.log(max(eta, alpha))) / 2 + 1)
    got = inner_product(two_mode_squeezed_ket(eta, n), two_mode_squeezed_ket(alpha, n))
    want = math.sqrt(1 - eta**2) * math.sqrt(1 - alpha**2) / (1 - eta * alpha)
    assert abs(got - want) < 1e-10


def test_inner_product_conjugate_symmetric():
    a = SparseKet.from_dict(2, 4, {(0, 1): 1 + 2j, (3, 2): -0.5j})
    b = SparseKet.from_dict(2, 4, {(0, 1): 0.3, (3, 2): 1j, (1, 1): 2})
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))


def test_cutoff_monotonicity():
    small = two_mode_squeezed_ket(0.7, 10)
    large = two_mode_squeezed_ket(0.7, 20)
    for idx, amp in small.amplitudes.items():
        assert large[idx] == amp
    coh_small, _ = coherent_coefficients(0.6, 8)
    coh_large, _ = coherent_coefficients(0.6, 16)
    np.testing.assert_array_equal(coh_small, coh_large[:8])


def test_prune_threshold():
    ket = SparseKet.from_dict(1, 4, {(0,): 1.0, (1,): 1e-17, (2,): 2e-16})
    assert len(ket) == 2
    assert (1,) not in ket


def test_sc_state_normalized():
    ket = build_entangled_state(EntangledStateSpec.squeezed_coherent(0.4, 0.41, math.pi))
    assert abs(ket.norm_squared() - 1) < 1e-10
    assert abs(inner_product(ket, ket) - 1) < 1e-10


def test_sc_degenerate():
    with pytest.raises(DegenerateStateError):
        build_entangled_state(EntangledStateSpec.squeezed_coherent(0.4, 0.4, math.pi))


def test_ss_branch_overlap_matches_normalization_term():
    eta, sigma, phi = 0.4, 0.41, math.pi
    spec = EntangledStateSpec.squeezed_squeezed(eta, sigma, phi)
    first, second = branch_kets(spec, adaptive_cutoff(spec))
    overlap = np.exp(1j * phi) * inner_product(first, second)
    expected = -(1 - eta**2) * (1 - sigma**2) / (1 - eta * sigma) ** 2
    assert abs(overlap - expected) < 1e-10


def test_sc_branch_overlap_matches_normalization_term():
    alpha, eta = 0.3, 0.7
    spec = EntangledStateSpec.squeezed_coherent(alpha, eta, 0.0)
    first, second = branch_kets(spec, adaptive_cutoff(spec))
    expected = (
        math.sqrt(1 - alpha**2) * math.sqrt(1 - eta**2) / (1 - alpha * eta)
        * math.exp(-0.5 * (alpha - eta) ** 2)
    )
    assert abs(inner_product(first, second) - expected) < 1e-10


def test_truncation_error_carries_tail():
    spec = EntangledStateSpec.squeezed_squeezed(0.9, 0.5)
    with pytest.raises(TruncationError) as info:
        build_entangled_state(spec, cutoff=2)
    assert info.value.tail_mass > 0.5
    assert info.value.cutoff == 2


def test_adaptive_cutoff_high_eta():
    spec = EntangledStateSpec.squeezed_squeezed(0.95, 0.949)
    cutoff = adaptive_cutoff(spec)
    assert cutoff % 2 == 0
    assert 0.95 ** (2 * cutoff) < 1e-12
    assert 0.95 ** (2 * (cutoff - 2)) >= 1e-12 / 2
    ket = build_entangled_state(spec)
    assert abs(ket.norm_squared() - 1) < 1e-10


@pytest.mark.parametrize(
    "args",
    [
        ("sc", 0.0, 0.5),
        ("sc", 0.5, 1.0),
        ("ss", 0.5, -0.1),
        ("ss", math.nan, 0.5),
    ],
)
def test_spec_domain(args):
    with pytest.raises(InvalidParameterError):
        EntangledStateSpec.from_params(*args)


@given(unit, unit, st.floats(min_value=0, max_value=2 * math.pi))
@settings(max_examples=30, deadline=None)
def test_norm_and_support_properties(p1, p2, phi):
    for kind, pattern in (("sc", lambda i: i[0] == i[1]), ("ss", lambda i: i[0] == i[1] and i[2] == i[3])):
        spec = EntangledStateSpec.from_params(kind, p1, p2, phi)
        try:
            ket = build_entangled_state(spec)
        except DegenerateStateError:
            continue
        assert abs(ket.norm_squared() - 1) < 1e-10
        idx = ket.indices
        if kind == "sc":
            assert np.all(idx[:, 0] == idx[:, 1])
        else:
            assert np.all(idx[:, 0] == idx[:, 1]) and np.all(idx[:, 2] == idx[:, 3])


def test_kets_are_immutable():
    ket = two_mode_squeezed_ket(0.5, 4)
    with pytest.raises(ValueError):
        ket.amps[0] = 0
