"""Invariant suite behind ``mermin-cv verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import analytic_correlator, correlator_oracle
from .exceptions import DegenerateStateError, TruncationError
from .fock import EntangledStateSpec, StateKind, adaptive_cutoff
from .mermin import MerminPolynomial, build_mermin, classical_bound, reduce_with_identity
from .operators import SetupKind, verify_operator_algebra

ALGEBRA_TOL = 1e-13
ORACLE_TOL = 1e-8
SAMPLE_RANGE = (0.01, 0.95)

# Expected expansions written out by hand, independent of the recursion.
M2_TEXT = "AB + A'B + AB' - A'B'"
M3_TEXT = "A'BC + AB'C + ABC' - A'B'C'"
M4_DOUBLED_TEXT = (
    "-ABCD + A'BCD + AB'CD + ABC'D + ABCD' + A'B'CD + A'BC'D + A'BCD' + AB'C'D + AB'CD'"
    " + ABC'D' - A'B'C'D - A'B'CD' - A'BC'D' - AB'C'D' - A'B'C'D'"
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    detail: str = ""


def _algebra_checks(cutoffs):
    angles = [0.0, math.pi / 4, math.pi / 3, math.pi / 2, -2.1]
    out = []
    for setup in SetupKind:
        for cutoff in cutoffs:
            rep = verify_operator_algebra(setup, cutoff, angles)
            out.append(
                CheckResult(
                    f"operator-algebra setup={int(setup)} cutoff={cutoff}",
                    rep.max_deviation,
                    ALGEBRA_TOL,
                    rep.max_deviation < ALGEBRA_TOL,
                    f"A^2={rep.involution:.1e} herm={rep.hermiticity:.1e} "
                    f"comm={rep.cross_mode_commutator:.1e} "
                    f"pseudospin={rep.pseudospin_commutators:.1e}",
                )
            )
    return out


def _recursion_checks():
    out = []
    pairs = [
        ("recursion M3", build_mermin(3), MerminPolynomial.parse(M3_TEXT)),
        ("recursion 2*M4", 2 * build_mermin(4), MerminPolynomial.parse(M4_DOUBLED_TEXT)),
        (
            "reduce M3 with C=C'=1",
            reduce_with_identity(build_mermin(3), {2: 1}),
            MerminPolynomial.parse(M2_TEXT),
        ),
    ]
    for name, got, want in pairs:
        ok = got.as_dict() == want.as_dict()
        out.append(CheckResult(name, 0.0 if ok else 1.0, 0.0, ok, str(got)))
    return out


def _lhv_checks():
    out = []
    for name, poly, want in (
        ("LHV bound M2", build_mermin(2), 2.0),
        ("LHV bound M3", build_mermin(3), 2.0),
        ("LHV bound 2*M4", 2 * build_mermin(4), 4.0),
    ):
        got = classical_bound(poly)
        out.append(CheckResult(name, abs(got - want), 0.0, got == want, f"enumerated {got:g}"))
    return out


def sample_tuples(samples, seed, kind):
    """Seeded ``(param1, param2, phi, angles)`` draws for one state family."""
    rng = np.random.default_rng(seed)
    n_modes = StateKind(kind).num_modes
    draws = []
    while len(draws) < samples:
        p1, p2 = rng.uniform(*SAMPLE_RANGE, size=2)
        phi = rng.uniform(0, 2 * math.pi)
        angles = tuple(rng.uniform(-math.pi, math.pi, size=n_modes))
        draws.append((float(p1), float(p2), float(phi), angles))
    return draws


def oracle_deviation(kind, setup, samples, seed, cutoff=None):
    """Max ``|analytic - oracle|`` over seeded random tuples (degenerate draws skipped)."""
    worst = 0.0
    for p1, p2, phi, angles in sample_tuples(samples, seed, kind):
        spec = EntangledStateSpec.from_params(kind, p1, p2, phi)
        try:
            exact = analytic_correlator(spec, setup, angles).value
        except DegenerateStateError:
            continue
        approx = correlator_oracle(spec, setup, angles, cutoff=cutoff).value
        worst = max(worst, abs(exact - approx))
    return worst


def _oracle_checks(samples, seed, cutoff):
    out = []
    for kind in StateKind:
        for setup in SetupKind:
            name = f"oracle-equivalence {kind.value} setup={int(setup)}"
            try:
                dev = oracle_deviation(kind, setup, samples, seed, cutoff)
            except TruncationError as exc:
                out.append(CheckResult(name, math.inf, ORACLE_TOL, False, f"truncation error: {exc}"))
                continue
            out.append(CheckResult(name, dev, ORACLE_TOL, dev < ORACLE_TOL, f"{samples} samples"))
    return out


def run_verification(cutoff=None, samples=100, seed=0):
    """Run every invariant check.

    With an explicit ``cutoff`` both the operator algebra and the oracle use
    it; otherwise the algebra runs at cutoff 8 and at the adaptive cutoff of
    the most demanding sampled state, and the oracle chooses its own cutoffs.
    """
    if cutoff is None:
        worst = EntangledStateSpec.squeezed_squeezed(SAMPLE_RANGE[1], SAMPLE_RANGE[1] - 1e-3)
        cutoffs = [8, adaptive_cutoff(worst)]
    else:
        cutoffs = [cutoff]
    return (
        _algebra_checks(cutoffs)
        + _recursion_checks()
        + _lhv_checks()
        + _oracle_checks(samples, seed, cutoff)
    )
