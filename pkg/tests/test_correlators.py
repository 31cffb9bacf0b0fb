import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mermin_cv.correlators import (
    PRESETS,
    CorrelatorMethod,
    MeasurementAngles,
    analytic_correlator,
    correlator_oracle,
    correlator_sc_setup2,
    correlator_ss_setup2,
    get_preset,
    mermin_expectation,
    mermin_values,
    standard_polynomial,
)
from mermin_cv.exceptions import DegenerateStateError, InvalidParameterError, TruncationError
from mermin_cv.fock import EntangledStateSpec, StateKind
from mermin_cv.mermin import build_mermin

unit = st.floats(min_value=0.02, max_value=0.9)
angle = st.floats(min_value=-math.pi, max_value=math.pi)
kinds = st.sampled_from(list(StateKind))
setups = st.sampled_from([1, 2])


def _value(kind, setup, p1, p2, phi, angles):
    spec = EntangledStateSpec.from_params(kind, p1, p2, phi)
    return analytic_correlator(spec, setup, angles).value


def _nondegenerate(p1, p2, phi):
    return abs(p1 - p2) > 0.02 or abs(math.cos(phi / 2)) > 0.1


@given(unit, angle, angle, angle, angle)
@settings(max_examples=60, deadline=None)
def test_ss_equal_params_product_state(eta, a, b, c, d):
    # eta = sigma, phi = 0 collapses to a product of two-mode squeezed vacua,
    # each contributing 2 eta / (1 + eta^2) cos(angle sum)
    pair = 2 * eta / (1 + eta**2)
    expected = pair**2 * math.cos(a + b) * math.cos(c + d)
    assert correlator_ss_setup2(eta, eta, 0.0, a, b, c, d).value == pytest.approx(expected, abs=1e-13)


def test_ss_equal_params_frozen():
    # eta = 1/2: (4/5)^2 cos^2(a + b) with c + d = -(a + b)
    value = correlator_ss_setup2(0.5, 0.5, 0.0, 0.4, 0.1, -0.4, -0.1).value
    assert value == pytest.approx(16 / 25 * math.cos(0.5) ** 2, abs=1e-14)
    spec = EntangledStateSpec.squeezed_squeezed(0.5, 0.5, 0.0)
    got = correlator_oracle(spec, 2, (0.4, 0.1, -0.4, -0.1)).value
    assert got == pytest.approx(16 / 25 * math.cos(0.5) ** 2, abs=1e-10)


def test_sc_setup2_reports_series():
    res = correlator_sc_setup2(0.4, 0.41, math.pi, 0.0, -math.pi / 4, math.pi / 4)
    assert res.method is CorrelatorMethod.SERIES
    assert 0 < res.truncation_used < 500
    assert res.tail_estimate < 1e-12


@given(kinds, setups, unit, unit, st.floats(0, 2 * math.pi), st.lists(angle, min_size=4, max_size=4))
@settings(max_examples=80, deadline=None)
def test_oracle_equivalence(kind, setup, p1, p2, phi, raw):
    assume(_nondegenerate(p1, p2, phi))
    angles = tuple(raw[: StateKind(kind).num_modes])
    spec = EntangledStateSpec.from_params(kind, p1, p2, phi)
    exact = analytic_correlator(spec, setup, angles).value
    approx = correlator_oracle(spec, setup, angles).value
    assert abs(exact - approx) < 1e-8


@given(kinds, setups, unit, unit, st.floats(0, 2 * math.pi), st.lists(angle, min_size=4, max_size=4))
@settings(max_examples=150, deadline=None)
def test_product_correlator_bounded(kind, setup, p1, p2, phi, raw):
    assume(_nondegenerate(p1, p2, phi))
    angles = raw[: StateKind(kind).num_modes]
    assert abs(_value(kind, setup, p1, p2, phi, angles)) <= 1 + 1e-12


@given(kinds, setups, unit, unit, st.floats(0, 2 * math.pi), st.lists(angle, min_size=4, max_size=4))
@settings(max_examples=100, deadline=None)
def test_branch_swap_symmetry(kind, setup, p1, p2, phi, raw):
    # exchanging the branches maps (p1, p2, phi) to (p2, p1, -phi)
    assume(_nondegenerate(p1, p2, phi))
    angles = raw[: StateKind(kind).num_modes]
    lhs = _value(kind, setup, p1, p2, phi, angles)
    rhs = _value(kind, setup, p2, p1, -phi % (2 * math.pi), angles)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(kinds, setups, unit, unit, st.floats(0, 2 * math.pi), st.lists(angle, min_size=4, max_size=4))
@settings(max_examples=100, deadline=None)
def test_conjugation_symmetry(kind, setup, p1, p2, phi, raw):
    assume(_nondegenerate(p1, p2, phi))
    angles = raw[: StateKind(kind).num_modes]
    lhs = _value(kind, setup, p1, p2, phi, angles)
    rhs = _value(kind, setup, p1, p2, -phi % (2 * math.pi), [-x for x in angles])
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(kinds, setups, unit, unit, st.floats(0, 2 * math.pi), st.lists(angle, min_size=4, max_size=4),
       st.integers(0, 3))
@settings(max_examples=100, deadline=None)
def test_angle_periodicity(kind, setup, p1, p2, phi, raw, which):
    assume(_nondegenerate(p1, p2, phi))
    n = StateKind(kind).num_modes
    angles = list(raw[:n])
    shifted = list(angles)
    shifted[which % n] += 2 * math.pi
    lhs = _value(kind, setup, p1, p2, phi, angles)
    assert lhs == pytest.approx(_value(kind, setup, p1, p2, phi, shifted), abs=1e-12)
    assert lhs == pytest.approx(_value(kind, setup, p1, p2, phi + 2 * math.pi, angles), abs=1e-12)


@given(unit, unit, st.lists(angle, min_size=4, max_size=4))
@settings(max_examples=50, deadline=None)
def test_setup1_global_angle_shift(p1, p2, angles):
    # a common rotation of all qubit-block measurements cancels within each branch
    spec = EntangledStateSpec.squeezed_squeezed(p1, p2, 0.0)
    base = analytic_correlator(spec, 1, angles).value
    shifted = [angles[0] + 0.3, angles[1] - 0.3, angles[2], angles[3]]
    assert base == pytest.approx(analytic_correlator(spec, 1, shifted).value, abs=1e-12)


def test_vectorized_matches_scalar():
    kind, setup = StateKind.SQUEEZED_COHERENT, 2
    preset = get_preset("sc-pi")
    poly = standard_polynomial(kind)
    p1 = np.array([0.1, 0.4, 0.7])
    p2 = np.array([0.7, 0.41, 0.2])
    vec = mermin_values(kind, setup, p1, p2, preset.phi, poly, preset.angles)
    for x, y, v in zip(p1, p2, vec):
        spec = EntangledStateSpec.from_params(kind, x, y, preset.phi)
        assert mermin_expectation(spec, setup, poly, preset.angles).value == pytest.approx(v, abs=1e-14)


def test_vectorized_nan_on_degenerate():
    preset = get_preset("ss-pi")
    vals = mermin_values("ss", 1, [0.3, 0.3], [0.3, 0.4], math.pi, 2 * build_mermin(4), preset.angles)
    assert math.isnan(vals[0]) and not math.isnan(vals[1])


@pytest.mark.parametrize("kind,p", [("sc", 0.5), ("ss", 0.7)])
def test_degenerate_raises(kind, p):
    spec = EntangledStateSpec.from_params(kind, p, p, math.pi)
    n = spec.num_modes
    with pytest.raises(DegenerateStateError) as info:
        analytic_correlator(spec, 1, (0.0,) * n)
    assert info.value.norm_squared < 1e-12
    with pytest.raises(DegenerateStateError):
        correlator_oracle(spec, 1, (0.0,) * n)


def test_oracle_truncation_error():
    spec = EntangledStateSpec.squeezed_coherent(0.9, 0.8, 0.0)
    with pytest.raises(TruncationError):
        correlator_oracle(spec, 2, (0.0, 0.0, 0.0), cutoff=2)


def test_mermin_oracle_and_analytic_agree():
    spec = EntangledStateSpec.squeezed_squeezed(0.6, 0.9, 0.0)
    preset = get_preset("ss-zero")
    poly = standard_polynomial("ss")
    a = mermin_expectation(spec, 2, poly, preset.angles).value
    o = mermin_expectation(spec, 2, poly, preset.angles, method="oracle")
    assert o.method is CorrelatorMethod.FOCK_ORACLE
    assert abs(a - o.value) < 1e-8


def test_arity_mismatch():
    spec = EntangledStateSpec.squeezed_coherent(0.3, 0.5)
    with pytest.raises(InvalidParameterError):
        analytic_correlator(spec, 1, (0.0, 0.0))
    with pytest.raises(InvalidParameterError):
        mermin_expectation(spec, 1, build_mermin(4), get_preset("sc-pi").angles)


def test_presets():
    assert set(PRESETS) == {"sc-pi", "sc-zero", "ss-pi", "ss-zero"}
    for preset in PRESETS.values():
        assert len(preset.angles) == preset.kind.num_modes
    with pytest.raises(InvalidParameterError):
        get_preset("ss-half")


def test_measurement_angles_select():
    angles = MeasurementAngles(((1, 2), (3, 4), (5, 6)))
    assert angles.select((0, 1, 0)) == (1.0, 4.0, 5.0)
    with pytest.raises(InvalidParameterError):
        angles.select((0, 1))
    with pytest.raises(InvalidParameterError):
        MeasurementAngles(())
