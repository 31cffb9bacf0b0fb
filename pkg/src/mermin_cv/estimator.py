"""scikit-learn style front end for Mermin correlator evaluation.

:class:`MerminCorrelator` maps rows of parameter pairs ``(param1, param2)``
(``(alpha, eta)`` or ``(eta, sigma)``) to the Mermin expectation for a fixed
state family, Bell setup, relative phase and measurement angles.  Fitting
learns nothing from data; it resolves and validates the configuration so the
object composes with pipelines, ``clone`` and ``get_params``.
"""

from __future__ import annotations

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .correlators import (
    CorrelatorMethod,
    EvaluationMethod,
    mermin_expectation,
    mermin_values,
    standard_polynomial,
)
from .exceptions import DegenerateStateError, InvalidParameterError
from .fock import EntangledStateSpec, StateKind
from .mermin import bounds
from .operators import SetupKind
from .validation import (
    check_parameter_pairs,
    check_setup,
    check_state_kind,
    resolve_angles,
    resolve_phi,
)


def _oracle_chunk(kind, setup, phi, poly, angles, cutoff, rows):
    out = np.empty(len(rows))
    for i, (p1, p2) in enumerate(rows):
        spec = EntangledStateSpec.from_params(kind, p1, p2, phi)
        try:
            out[i] = mermin_expectation(spec, setup, poly, angles, "oracle", cutoff).value
        except DegenerateStateError:
            out[i] = np.nan
    return out


class MerminCorrelator(TransformerMixin, BaseEstimator):
    """Evaluate ``<M_3>`` (squeezed-coherent) or ``<2 M_4>`` (squeezed-squeezed).

    Parameters
    ----------
    state : {"sc", "ss"}
        State family.
    setup : {1, 2}
        Bell setup: 1 acts on the ``{|0>, |1>}`` block only, 2 on every
        pseudospin pair.
    phi : float or str, optional
        Relative phase; accepts ``"pi"``-style strings.  Defaults to the
        preset's phase when ``angles`` names a preset.
    angles : str or sequence of (float, float)
        Preset name (``"sc-pi"``, ``"sc-zero"``, ``"ss-pi"``, ``"ss-zero"``)
        or explicit ``(unprimed, primed)`` pairs, one per party.
    method : {"analytic", "oracle"}
        Closed forms/series, or the truncated Fock-space oracle.
    cutoff : int, optional
        Fixed oracle cutoff; adaptive when ``None``.
    n_jobs : int, optional
        Workers for oracle evaluation (joblib semantics).

    Attributes
    ----------
    polynomial_ : MerminPolynomial
    angles_ : MeasurementAngles
    phi_ : float
    classical_bound_ : float
    quantum_bound_ : float
    correlator_method_ : CorrelatorMethod
    n_features_in_ : int
    """

    def __init__(
        self,
        state="sc",
        setup=1,
        phi=None,
        angles="sc-pi",
        method="analytic",
        cutoff=None,
        n_jobs=None,
    ):
        self.state = state
        self.setup = setup
        self.phi = phi
        self.angles = angles
        self.method = method
        self.cutoff = cutoff
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        kind = check_state_kind(self.state)
        setup = check_setup(self.setup)
        try:
            method = EvaluationMethod(self.method)
        except ValueError:
            raise InvalidParameterError(
                f"method must be 'analytic' or 'oracle', got {self.method!r}"
            ) from None
        if X is not None:
            check_parameter_pairs(X)
        self.kind_ = kind
        self.setup_ = setup
        self.method_ = method
        self.angles_ = resolve_angles(self.angles, kind)
        self.phi_ = resolve_phi(self.phi, self.angles)
        self.polynomial_ = standard_polynomial(kind)
        pair = bounds(self.polynomial_)
        self.classical_bound_ = pair.classical
        self.quantum_bound_ = pair.quantum
        if method is EvaluationMethod.ORACLE:
            self.correlator_method_ = CorrelatorMethod.FOCK_ORACLE
        elif kind is StateKind.SQUEEZED_COHERENT and setup is SetupKind.FULL_PSEUDOSPIN:
            self.correlator_method_ = CorrelatorMethod.SERIES
        else:
            self.correlator_method_ = CorrelatorMethod.CLOSED_FORM
        self.n_features_in_ = 2
        return self

    def evaluate(self, X) -> np.ndarray:
        """Mermin expectation per row as a 1-D array; ``nan`` where degenerate."""
        check_is_fitted(self, "polynomial_")
        X = check_parameter_pairs(X)
        if self.method_ is EvaluationMethod.ANALYTIC:
            return mermin_values(
                self.kind_, self.setup_, X[:, 0], X[:, 1], self.phi_, self.polynomial_, self.angles_
            )
        n_jobs = self.n_jobs or 1
        chunks = np.array_split(X, max(1, min(len(X), 4 * n_jobs)))
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_oracle_chunk)(
                self.kind_,
                self.setup_,
                self.phi_,
                self.polynomial_,
                self.angles_,
                self.cutoff,
                chunk,
            )
            for chunk in chunks
            if len(chunk)
        )
        return np.concatenate(parts) if parts else np.empty(0)

    def transform(self, X):
        return self.evaluate(X)[:, None]

    def predict(self, X):
        """``True`` where ``|<M>|`` strictly exceeds the classical bound."""
        values = self.evaluate(X)
        with np.errstate(invalid="ignore"):
            return np.nan_to_num(np.abs(values), nan=0.0) > self.classical_bound_

    def get_feature_names_out(self, input_features=None):
        return np.array(["mermin_value"], dtype=object)
