"""Mermin-inequality correlators for continuous-variable entangled states.

Pseudospin Bell operators are evaluated on squeezed-coherent (three-party)
and squeezed-squeezed (four-party) superpositions, both through closed-form
expressions and through an independent truncated Fock-space oracle.
"""

from .correlators import (
    PRESETS,
    CorrelatorMethod,
    CorrelatorResult,
    EvaluationMethod,
    MeasurementAngles,
    correlator_oracle,
    correlator_sc_setup1,
    correlator_sc_setup2,
    correlator_ss_setup1,
    correlator_ss_setup2,
    get_preset,
    mermin_expectation,
    standard_polynomial,
)
from .estimator import MerminCorrelator
from .exceptions import (
    ConsistencyError,
    DegenerateStateError,
    InvalidParameterError,
    ShapeError,
    TruncationError,
    UnsupportedError,
)
from .fock import (
    EntangledStateSpec,
    SparseKet,
    StateKind,
    build_entangled_state,
    coherent_coefficients,
    inner_product,
    two_mode_squeezed_ket,
)
from .mermin import (
    BoundPair,
    MerminPolynomial,
    build_mermin,
    classical_bound,
    quantum_bound,
    reduce_with_identity,
)
from .operators import BellOperatorSpec, SetupKind, apply_bell_operator, pseudospin

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "BellOperatorSpec",
    "BoundPair",
    "ConsistencyError",
    "CorrelatorMethod",
    "CorrelatorResult",
    "DegenerateStateError",
    "EntangledStateSpec",
    "EvaluationMethod",
    "InvalidParameterError",
    "MeasurementAngles",
    "MerminCorrelator",
    "MerminPolynomial",
    "SetupKind",
    "ShapeError",
    "SparseKet",
    "StateKind",
    "TruncationError",
    "UnsupportedError",
    "apply_bell_operator",
    "build_entangled_state",
    "build_mermin",
    "classical_bound",
    "coherent_coefficients",
    "correlator_oracle",
    "correlator_sc_setup1",
    "correlator_sc_setup2",
    "correlator_ss_setup1",
    "correlator_ss_setup2",
    "get_preset",
    "inner_product",
    "mermin_expectation",
    "pseudospin",
    "quantum_bound",
    "reduce_with_identity",
    "standard_polynomial",
    "two_mode_squeezed_ket",
]
