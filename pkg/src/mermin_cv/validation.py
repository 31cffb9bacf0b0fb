"""Input validation helpers shared by the estimator, scans and CLI."""

from __future__ import annotations

import math
import re

import numpy as np
from sklearn.utils.validation import check_array

from .correlators import PRESETS, MeasurementAngles, get_preset
from .exceptions import InvalidParameterError
from .fock import StateKind
from .operators import SetupKind

_PI_RE = re.compile(
    r"^(?P<sign>[+-]?)(?P<num>\d*\.?\d*)\*?pi(?:/(?P<den>\d*\.?\d+))?$", re.IGNORECASE
)


def parse_angle(text) -> float:
    """Parse ``pi/4``, ``-pi/4``, ``3pi/4``, ``3*pi/4``, ``pi`` or plain radians."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().replace(" ", "")
    m = _PI_RE.match(s)
    if m:
        num = float(m["num"]) if m["num"] not in ("", ".") else 1.0
        den = float(m["den"]) if m["den"] else 1.0
        if den == 0:
            raise InvalidParameterError(f"zero denominator in angle {text!r}")
        value = num * math.pi / den
        return -value if m["sign"] == "-" else value
    try:
        return float(s)
    except ValueError:
        raise InvalidParameterError(f"cannot parse angle {text!r}") from None


def check_state_kind(state) -> StateKind:
    if isinstance(state, StateKind):
        return state
    try:
        return StateKind(str(state).lower())
    except ValueError:
        raise InvalidParameterError(f"state must be 'sc' or 'ss', got {state!r}") from None


def check_setup(setup) -> SetupKind:
    try:
        return SetupKind(int(setup))
    except (TypeError, ValueError):
        raise InvalidParameterError(f"setup must be 1 or 2, got {setup!r}") from None


def resolve_angles(angles, kind: StateKind) -> MeasurementAngles:
    """Accept a preset name, a :class:`MeasurementAngles` or a sequence of pairs."""
    if isinstance(angles, str):
        preset = get_preset(angles)
        if preset.kind is not kind:
            raise InvalidParameterError(
                f"preset {angles!r} is for {preset.kind.value} states, not {kind.value}"
            )
        resolved = preset.angles
    elif isinstance(angles, MeasurementAngles):
        resolved = angles
    else:
        resolved = MeasurementAngles(tuple((parse_angle(u), parse_angle(p)) for u, p in angles))
    if len(resolved) != kind.num_modes:
        raise InvalidParameterError(
            f"{kind.value} states need {kind.num_modes} angle pairs, got {len(resolved)}"
        )
    return resolved


def resolve_phi(phi, angles) -> float:
    """Explicit ``phi`` wins; otherwise fall back to the preset's phase."""
    if phi is not None:
        value = parse_angle(phi)
        if not math.isfinite(value):
            raise InvalidParameterError(f"phi must be finite, got {phi!r}")
        return value
    if isinstance(angles, str) and angles in PRESETS:
        return PRESETS[angles].phi
    raise InvalidParameterError("phi is required unless angles name a preset")


def check_parameter_pairs(X) -> np.ndarray:
    """Validate an ``(n_samples, 2)`` array of parameter pairs in ``(0, 1)``."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise InvalidParameterError(
            f"expected 2 columns (param1, param2), got {X.shape[1]}"
        )
    bad = (X <= 0) | (X >= 1)
    if bad.any():
        row = int(np.argwhere(bad)[0][0])
        raise InvalidParameterError(
            f"parameters must lie strictly inside (0, 1); row {row} is {X[row].tolist()}"
        )
    return X
