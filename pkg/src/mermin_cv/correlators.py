"""Product correlators ``<A_1 ... A_n>`` and Mermin expectations.

Two independent routes are provided.  The analytic route evaluates closed
forms (and, for the squeezed-coherent state in the full-pseudospin setup, a
rapidly convergent series); these functions broadcast over numpy arrays so
whole parameter grids are evaluated at once.  The oracle route builds the
state on a truncated Fock space and applies the Bell operators directly.

Parameter conventions follow the state families: squeezed-coherent states take
``(alpha, eta)``, squeezed-squeezed states take ``(eta, sigma)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exceptions import ConsistencyError, DegenerateStateError, InvalidParameterError
from .fock import (
    DEGENERATE_NORM2,
    TAIL_TOLERANCE,
    EntangledStateSpec,
    StateKind,
    build_entangled_state,
)
from .mermin import MerminPolynomial, build_mermin
from .operators import SetupKind, product_expectation

SERIES_REL_TOL = 1e-15
SERIES_MAX_TERMS = 500
IMAG_TOL = 1e-10


class CorrelatorMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    SERIES = "series"
    FOCK_ORACLE = "fock_oracle"


class EvaluationMethod(enum.Enum):
    ANALYTIC = "analytic"
    ORACLE = "oracle"


@dataclass(frozen=True)
class CorrelatorResult:
    """A real expectation value with provenance.

    ``truncation_used`` is the number of series terms (series), the Fock
    cutoff (oracle) or 0 (closed form); ``tail_estimate`` bounds the neglected
    contribution.
    """

    value: float
    method: CorrelatorMethod
    truncation_used: int = 0
    tail_estimate: float = 0.0


@dataclass(frozen=True)
class AnalyticIntermediates:
    k1: float | None = None
    k2: float | None = None
    n_sc: float | None = None
    omega_ss: float | None = None


@dataclass(frozen=True)
class MeasurementAngles:
    """Per-party ``(unprimed, primed)`` measurement angles in radians."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((float(u), float(p)) for u, p in self.pairs)
        if not pairs:
            raise InvalidParameterError("at least one angle pair is required")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def select(self, choice) -> tuple:
        """Angles for one monomial: primed where the choice flag is set."""
        if len(choice) != len(self.pairs):
            raise InvalidParameterError(
                f"choice vector of length {len(choice)} for {len(self.pairs)} parties"
            )
        return tuple(pair[f] for pair, f in zip(self.pairs, choice))


@dataclass(frozen=True)
class AnglePreset:
    name: str
    kind: StateKind
    phi: float
    angles: MeasurementAngles


_PI = math.pi
PRESETS = {
    p.name: p
    for p in (
        AnglePreset(
            "sc-pi",
            StateKind.SQUEEZED_COHERENT,
            _PI,
            MeasurementAngles(((0, _PI / 2), (-_PI / 4, _PI / 4), (_PI / 4, -_PI / 4))),
        ),
        AnglePreset(
            "sc-zero",
            StateKind.SQUEEZED_COHERENT,
            0.0,
            MeasurementAngles(((-_PI / 4, _PI / 2), (-_PI / 4, _PI / 4), (0, _PI / 4))),
        ),
        AnglePreset(
            "ss-pi",
            StateKind.SQUEEZED_SQUEEZED,
            _PI,
            MeasurementAngles(
                ((0, _PI / 2), (-_PI / 4, _PI / 4), (_PI / 4, -_PI / 4), (_PI / 4, -_PI / 4))
            ),
        ),
        AnglePreset(
            "ss-zero",
            StateKind.SQUEEZED_SQUEEZED,
            0.0,
            MeasurementAngles(
                ((-_PI / 4, _PI / 2), (-_PI / 4, _PI / 4), (-_PI / 2, 0), (_PI / 4, 3 * _PI / 4))
            ),
        ),
    )
}


def get_preset(name) -> AnglePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None


def standard_polynomial(kind) -> MerminPolynomial:
    """``M_3`` for squeezed-coherent states, ``2 M_4`` for squeezed-squeezed."""
    if StateKind(kind) is StateKind.SQUEEZED_COHERENT:
        return build_mermin(3)
    return 2 * build_mermin(4)


# -- analytic intermediates -------------------------------------------------


def _k_factors(alpha, eta):
    k1 = np.sqrt(1 - eta**2) * np.exp(-(alpha**2) / 2)
    k2 = np.sqrt(1 - alpha**2) * np.exp(-(eta**2) / 2)
    return k1, k2


def _norm2_from_log_overlap(log_overlap, phi):
    # 2 (1 + cos(phi) e^L) rewritten so the phi = pi, L -> 0 cancellation is exact
    return 2 * (2 * np.cos(phi / 2) ** 2 + np.cos(phi) * np.expm1(log_overlap))


def _sc_norm2(alpha, eta, phi):
    """Unnormalized norm^2 of the squeezed-coherent superposition."""
    log_overlap = (
        0.5 * np.log1p(-(alpha**2))
        + 0.5 * np.log1p(-(eta**2))
        - np.log1p(-alpha * eta)
        - 0.5 * (alpha - eta) ** 2
    )
    return _norm2_from_log_overlap(log_overlap, phi)


def _ss_norm2(eta, sigma, phi):
    log_overlap = np.log1p(-(eta**2)) + np.log1p(-(sigma**2)) - 2 * np.log1p(-eta * sigma)
    return _norm2_from_log_overlap(log_overlap, phi)


def _mask_degenerate(norm2):
    return np.where(norm2 < DEGENERATE_NORM2, np.nan, norm2)


def analytic_intermediates(spec: EntangledStateSpec) -> AnalyticIntermediates:
    if spec.kind is StateKind.SQUEEZED_COHERENT:
        alpha, eta = spec.params
        norm2 = float(_sc_norm2(alpha, eta, spec.phi))
        _raise_if_degenerate(norm2)
        k1, k2 = _k_factors(alpha, eta)
        return AnalyticIntermediates(k1=float(k1), k2=float(k2), n_sc=1 / math.sqrt(norm2))
    eta, sigma = spec.params
    norm2 = float(_ss_norm2(eta, sigma, spec.phi))
    _raise_if_degenerate(norm2)
    return AnalyticIntermediates(omega_ss=2 * (1 - eta**2) * (1 - sigma**2) / norm2)


def _raise_if_degenerate(norm2):
    if norm2 < DEGENERATE_NORM2:
        raise DegenerateStateError(
            f"the two branches cancel (unnormalized norm^2 = {norm2:.3g}); this happens "
            "when the parameters coincide (alpha = eta or eta = sigma) and phi = pi",
            norm2,
        )


# -- vectorized closed forms --------------------------------------------------


def sc_setup1_values(alpha, eta, phi, a, b, c):
    """``<ABC>`` for the squeezed-coherent state, zeroth-block setup.

    Broadcasts over all arguments; degenerate points yield ``nan``.
    """
    alpha, eta, phi, a, b, c = np.broadcast_arrays(*map(np.asarray, (alpha, eta, phi, a, b, c)))
    k1, k2 = _k_factors(alpha, eta)
    ae = alpha * eta
    # exp-type and geometric-type remainders beyond second order
    ea = np.expm1(alpha**2) - alpha**2
    ee = np.expm1(eta**2) - eta**2
    eae = np.expm1(ae) - ae
    ga = 1 / (1 - alpha**2) - 1 - alpha**2
    ge = 1 / (1 - eta**2) - 1 - eta**2
    gae = 1 / (1 - ae) - 1 - ae
    ab = a + b
    body = (
        4 * ae * (k1**2 + k2**2) * np.cos(ab) * np.cos(c)
        + 4 * ae * k1 * k2 * np.cos(phi) * np.cos(ab + c)
        + 2 * k1 * k2 * (eta**2 * np.cos(ab - c + phi) + alpha**2 * np.cos(ab - c - phi))
        + 2 * np.cos(ab) * (eta * k1**2 * ea + alpha * k2**2 * ee)
        + 2 * k1 * k2 * eae * (eta * np.cos(ab + phi) + alpha * np.cos(ab - phi))
        + 2 * np.cos(c) * (alpha * k1**2 * ge + eta * k2**2 * ga)
        + 2 * k1 * k2 * gae * (alpha * np.cos(c + phi) + eta * np.cos(c - phi))
        + k1**2 * ge * ea
        + k2**2 * ga * ee
        + 2 * np.cos(phi) * k1 * k2 * gae * eae
    )
    return body / _mask_degenerate(_sc_norm2(alpha, eta, phi))


def sc_setup2_values(alpha, eta, phi, a, b, c):
    """``<ABC>`` for the squeezed-coherent state, full-pseudospin setup.

    Sums the series in ``m`` with weights ``1 / sqrt((2m)! (2m+1)!)`` until
    every additive term is below ``SERIES_REL_TOL * (|partial| + 1)``.
    Returns ``(values, terms_used, last_term_magnitude)``.
    """
    alpha, eta, phi, a, b, c = np.broadcast_arrays(*map(np.asarray, (alpha, eta, phi, a, b, c)))
    k1, k2 = _k_factors(alpha, eta)
    ae = alpha * eta
    ab = a + b
    diag = 4 * ae * np.cos(ab) * np.cos(c)
    cross = (
        2 * k1 * k2 / (1 - ae**2)
        * (
            2 * np.cos(phi) * np.cos(ab + c) * ae
            + eta**2 * np.cos(ab - c + phi)
            + alpha**2 * np.cos(ab - c - phi)
        )
    )
    first = k1**2 / (1 - eta**4)
    second = k2**2 / (1 - alpha**4)
    total = np.zeros(alpha.shape)
    last = np.zeros(alpha.shape)
    for m in range(SERIES_MAX_TERMS):
        weight = math.exp(-0.5 * (gammaln(2 * m + 1) + gammaln(2 * m + 2)))
        term = weight * (
            diag * (first * alpha ** (4 * m) + second * eta ** (4 * m)) + cross * ae ** (2 * m)
        )
        total = total + term
        last = np.abs(term)
        if np.all(last < SERIES_REL_TOL * (np.abs(total) + 1)):
            break
    norm2 = _mask_degenerate(_sc_norm2(alpha, eta, phi))
    return total / norm2, m + 1, float(np.nanmax(last / norm2, initial=0.0))


def _omega_ss(eta, sigma, phi):
    # (1-eta^2)(1-sigma^2) / (1 + cos(phi) overlap) == 2 (1-eta^2)(1-sigma^2) / norm^2
    return 2 * (1 - eta**2) * (1 - sigma**2) / _mask_degenerate(_ss_norm2(eta, sigma, phi))


def ss_setup1_values(eta, sigma, phi, a, b, c, d):
    """``<ABCD>`` for the squeezed-squeezed state, zeroth-block setup."""
    eta, sigma, phi, a, b, c, d = np.broadcast_arrays(
        *map(np.asarray, (eta, sigma, phi, a, b, c, d))
    )
    es = eta * sigma
    ge = 1 / (1 - eta**2) - 1 - eta**2
    gs = 1 / (1 - sigma**2) - 1 - sigma**2
    ges = 1 / (1 - es) - 1 - es
    ab, cd = a + b, c + d
    body = (
        4 * es * np.cos(ab) * np.cos(cd)
        + 2 * es * np.cos(phi) * np.cos(ab + cd)
        + eta**2 * np.cos(ab - cd + phi)
        + sigma**2 * np.cos(ab - cd - phi)
        + (np.cos(ab) + np.cos(cd)) * (eta * gs + sigma * ge)
        + ges
        * (
            eta * (np.cos(ab + phi) + np.cos(cd - phi))
            + sigma * (np.cos(ab - phi) + np.cos(cd + phi))
        )
        + ge * gs
        + np.cos(phi) * ges**2
    )
    return _omega_ss(eta, sigma, phi) * body


def ss_setup2_values(eta, sigma, phi, a, b, c, d):
    """``<ABCD>`` for the squeezed-squeezed state, full-pseudospin setup."""
    eta, sigma, phi, a, b, c, d = np.broadcast_arrays(
        *map(np.asarray, (eta, sigma, phi, a, b, c, d))
    )
    es = eta * sigma
    ab, cd = a + b, c + d
    body = 4 * es * np.cos(ab) * np.cos(cd) / ((1 - eta**4) * (1 - sigma**4)) + (
        2 * es * np.cos(phi) * np.cos(ab + cd)
        + eta**2 * np.cos(ab - cd + phi)
        + sigma**2 * np.cos(ab - cd - phi)
    ) / (1 - es**2) ** 2
    return _omega_ss(eta, sigma, phi) * body


# -- scalar API ---------------------------------------------------------------


def _scalar_result(value, method, truncation=0, tail=0.0, norm2=None):
    value = float(value)
    if math.isnan(value):
        _raise_if_degenerate(norm2 if norm2 is not None else 0.0)
    return CorrelatorResult(value, method, truncation, tail)


def _validated(kind, p1, p2, phi):
    # range checks and the degenerate-state guard in one place
    spec = EntangledStateSpec.from_params(kind, p1, p2, phi)
    analytic_intermediates(spec)
    return spec


def correlator_sc_setup1(alpha, eta, phi, a, b, c) -> CorrelatorResult:
    _validated(StateKind.SQUEEZED_COHERENT, alpha, eta, phi)
    return _scalar_result(sc_setup1_values(alpha, eta, phi, a, b, c), CorrelatorMethod.CLOSED_FORM)


def correlator_sc_setup2(alpha, eta, phi, a, b, c) -> CorrelatorResult:
    _validated(StateKind.SQUEEZED_COHERENT, alpha, eta, phi)
    value, terms, tail = sc_setup2_values(alpha, eta, phi, a, b, c)
    return _scalar_result(value, CorrelatorMethod.SERIES, terms, tail)


def correlator_ss_setup1(eta, sigma, phi, a, b, c, d) -> CorrelatorResult:
    _validated(StateKind.SQUEEZED_SQUEEZED, eta, sigma, phi)
    return _scalar_result(
        ss_setup1_values(eta, sigma, phi, a, b, c, d), CorrelatorMethod.CLOSED_FORM
    )


def correlator_ss_setup2(eta, sigma, phi, a, b, c, d) -> CorrelatorResult:
    _validated(StateKind.SQUEEZED_SQUEEZED, eta, sigma, phi)
    return _scalar_result(
        ss_setup2_values(eta, sigma, phi, a, b, c, d), CorrelatorMethod.CLOSED_FORM
    )


def analytic_correlator(spec: EntangledStateSpec, setup, angles) -> CorrelatorResult:
    """Dispatch to the closed form or series matching ``spec`` and ``setup``."""
    setup = SetupKind(setup)
    if len(angles) != spec.num_modes:
        raise InvalidParameterError(f"need {spec.num_modes} angles, got {len(angles)}")
    p1, p2 = spec.params
    fn = {
        (StateKind.SQUEEZED_COHERENT, SetupKind.ZEROTH_BLOCK): correlator_sc_setup1,
        (StateKind.SQUEEZED_COHERENT, SetupKind.FULL_PSEUDOSPIN): correlator_sc_setup2,
        (StateKind.SQUEEZED_SQUEEZED, SetupKind.ZEROTH_BLOCK): correlator_ss_setup1,
        (StateKind.SQUEEZED_SQUEEZED, SetupKind.FULL_PSEUDOSPIN): correlator_ss_setup2,
    }[spec.kind, setup]
    return fn(p1, p2, spec.phi, *angles)


def correlator_oracle(
    spec: EntangledStateSpec, setup, angles, cutoff=None, tail_tol=TAIL_TOLERANCE
) -> CorrelatorResult:
    """``Re <psi| A_1 ... A_n |psi>`` on the truncated Fock space."""
    if len(angles) != spec.num_modes:
        raise InvalidParameterError(f"need {spec.num_modes} angles, got {len(angles)}")
    ket = build_entangled_state(spec, cutoff, tail_tol)
    value = product_expectation(ket, setup, angles)
    _check_real(value)
    return CorrelatorResult(value.real, CorrelatorMethod.FOCK_ORACLE, ket.cutoff, ket.tail_mass)


def _check_real(value):
    if abs(value.imag) >= IMAG_TOL:
        raise ConsistencyError(f"expectation has imaginary part {value.imag:.3g}")
    if abs(value.real) > 1 + IMAG_TOL:
        raise ConsistencyError(f"product correlator {value.real} exceeds 1 in magnitude")


def mermin_expectation(
    spec: EntangledStateSpec,
    setup,
    poly: MerminPolynomial,
    angles: MeasurementAngles,
    method=EvaluationMethod.ANALYTIC,
    cutoff=None,
) -> CorrelatorResult:
    """``sum_k coeff_k <product_k>`` with angles chosen per monomial."""
    method = EvaluationMethod(method)
    setup = SetupKind(setup)
    if poly.n != spec.num_modes or len(angles) != spec.num_modes:
        raise InvalidParameterError(
            f"{spec.kind.name} has {spec.num_modes} parties; polynomial has {poly.n}, "
            f"angles have {len(angles)}"
        )
    total = 0.0
    truncation, tail = 0, 0.0
    if method is EvaluationMethod.ORACLE:
        ket = build_entangled_state(spec, cutoff)
        for coeff, choice in poly.terms:
            value = product_expectation(ket, setup, angles.select(choice))
            _check_real(value)
            total += float(coeff) * value.real
        return CorrelatorResult(total, CorrelatorMethod.FOCK_ORACLE, ket.cutoff, ket.tail_mass)
    for coeff, choice in poly.terms:
        res = analytic_correlator(spec, setup, angles.select(choice))
        total += float(coeff) * res.value
        truncation = max(truncation, res.truncation_used)
        tail += abs(float(coeff)) * res.tail_estimate
    return CorrelatorResult(total, res.method, truncation, tail)


_VALUES = {
    (StateKind.SQUEEZED_COHERENT, SetupKind.ZEROTH_BLOCK): sc_setup1_values,
    (StateKind.SQUEEZED_COHERENT, SetupKind.FULL_PSEUDOSPIN): sc_setup2_values,
    (StateKind.SQUEEZED_SQUEEZED, SetupKind.ZEROTH_BLOCK): ss_setup1_values,
    (StateKind.SQUEEZED_SQUEEZED, SetupKind.FULL_PSEUDOSPIN): ss_setup2_values,
}


def mermin_values(kind, setup, param1, param2, phi, poly, angles):
    """Vectorized analytic ``<poly>`` over arrays of parameter pairs.

    Degenerate points come back as ``nan``.  No domain validation is done
    here; callers check parameters first.
    """
    fn = _VALUES[StateKind(kind), SetupKind(setup)]
    param1 = np.asarray(param1, dtype=float)
    param2 = np.asarray(param2, dtype=float)
    total = np.zeros(np.broadcast(param1, param2).shape)
    for coeff, choice in poly.terms:
        out = fn(param1, param2, phi, *angles.select(choice))
        if isinstance(out, tuple):
            out = out[0]
        total = total + float(coeff) * out
    return total
