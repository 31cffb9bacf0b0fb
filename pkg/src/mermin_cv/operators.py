"""Pseudospin operators and the two dichotomic Bell-operator setups.

Both setups measure ``A = cos(a) s_x - sin(a) s_y`` on a single mode.  The
zeroth-block setup restricts the pseudospin to the ``{|0>, |1>}`` pair and
acts as the identity on higher occupations; the full-pseudospin setup acts on
every ``(2n, 2n+1)`` pair.  On kets the operators are applied as index
rewrites: the occupation of one mode moves up or down by one and the
amplitude picks up ``exp(+ia)`` (even -> odd) or ``exp(-ia)`` (odd -> even).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import InvalidParameterError, ShapeError
from .fock import SparseKet, _check_cutoff


class SetupKind(enum.IntEnum):
    ZEROTH_BLOCK = 1
    FULL_PSEUDOSPIN = 2


@dataclass(frozen=True)
class BellOperatorSpec:
    setup: SetupKind
    mode_index: int
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "setup", SetupKind(self.setup))
        if self.mode_index < 0:
            raise InvalidParameterError(f"mode_index must be >= 0, got {self.mode_index}")


def pseudospin(component, cutoff):
    """Sparse single-mode pseudospin matrix ``s_x``, ``s_y`` or ``s_z``."""
    cutoff = _check_cutoff(cutoff)
    even = np.arange(0, cutoff, 2)
    odd = even + 1
    if component == "sx":
        rows, cols = np.concatenate([odd, even]), np.concatenate([even, odd])
        vals = np.ones(cutoff, dtype=complex)
    elif component == "sy":
        rows, cols = np.concatenate([even, odd]), np.concatenate([odd, even])
        vals = np.concatenate([np.full(even.size, 1j), np.full(odd.size, -1j)])
    elif component == "sz":
        rows = cols = np.concatenate([odd, even])
        vals = np.concatenate([np.ones(odd.size), -np.ones(even.size)]).astype(complex)
    else:
        raise InvalidParameterError(f"unknown pseudospin component {component!r}")
    return sp.csr_array((vals, (rows, cols)), shape=(cutoff, cutoff))


def bell_operator_matrix(setup, angle, cutoff):
    """Single-mode Bell operator as a sparse matrix."""
    setup = SetupKind(setup)
    cutoff = _check_cutoff(cutoff)
    up, down = np.exp(1j * angle), np.exp(-1j * angle)
    if setup is SetupKind.FULL_PSEUDOSPIN:
        even = np.arange(0, cutoff, 2)
        rows = np.concatenate([even + 1, even])
        cols = np.concatenate([even, even + 1])
        vals = np.concatenate([np.full(even.size, up), np.full(even.size, down)])
    else:
        rest = np.arange(2, cutoff)
        rows = np.concatenate([[1, 0], rest])
        cols = np.concatenate([[0, 1], rest])
        vals = np.concatenate([[up, down], np.ones(rest.size)])
    return sp.csr_array((vals, (rows, cols)), shape=(cutoff, cutoff))


def _rewrite(keys, amps, setup, mode_index, angle, cutoff, stride):
    occ = (keys // stride) % cutoff
    if setup is SetupKind.FULL_PSEUDOSPIN:
        raising = occ % 2 == 0
        lowering = ~raising
    else:
        raising = occ == 0
        lowering = occ == 1
    new_keys = keys + stride * (raising.astype(np.int64) - lowering)
    phase = np.ones(keys.size, dtype=np.complex128)
    phase[raising] = np.exp(1j * angle)
    phase[lowering] = np.exp(-1j * angle)
    return new_keys, amps * phase


def apply_bell_operator(spec: BellOperatorSpec, ket: SparseKet) -> SparseKet:
    if spec.mode_index >= ket.num_modes:
        raise ShapeError(f"mode {spec.mode_index} out of range for a {ket.num_modes}-mode ket")
    keys, amps = _rewrite(
        ket.keys,
        ket.amps,
        spec.setup,
        spec.mode_index,
        spec.angle,
        ket.cutoff,
        ket.strides[spec.mode_index],
    )
    return SparseKet(ket.num_modes, ket.cutoff, keys, amps, ket.tail_mass)


def product_expectation(ket: SparseKet, setup, angles) -> complex:
    """``<ket| A_0(a_0) A_1(a_1) ... |ket>`` with one angle per mode.

    Operators on distinct modes commute, so all rewrites are applied to the
    raw arrays before a single sorted intersection.
    """
    setup = SetupKind(setup)
    if len(angles) != ket.num_modes:
        raise ShapeError(f"need {ket.num_modes} angles, got {len(angles)}")
    keys, amps = ket.keys, ket.amps
    for i, angle in enumerate(angles):
        keys, amps = _rewrite(keys, amps, setup, i, angle, ket.cutoff, ket.strides[i])
    order = np.argsort(keys, kind="stable")
    keys, amps = keys[order], amps[order]
    _, ib, ik = np.intersect1d(ket.keys, keys, assume_unique=True, return_indices=True)
    return complex(np.sum(np.conj(ket.amps[ib]) * amps[ik]))


@dataclass(frozen=True)
class AlgebraReport:
    setup: SetupKind
    cutoff: int
    involution: float
    hermiticity: float
    cross_mode_commutator: float
    pseudospin_commutators: float

    @property
    def max_deviation(self) -> float:
        return max(
            self.involution,
            self.hermiticity,
            self.cross_mode_commutator,
            self.pseudospin_commutators,
        )


def _max_abs(m) -> float:
    m = sp.csr_array(m)
    return float(np.abs(m.data).max()) if m.nnz else 0.0


def pseudospin_commutator_deviation(cutoff) -> float:
    """Largest entry of ``[s_i, s_j] - 2i s_k`` over the cyclic triples."""
    s = {c: pseudospin(c, cutoff) for c in ("sx", "sy", "sz")}
    dev = 0.0
    for i, j, k in (("sx", "sy", "sz"), ("sy", "sz", "sx"), ("sz", "sx", "sy")):
        comm = s[i] @ s[j] - s[j] @ s[i]
        dev = max(dev, _max_abs(comm - 2j * s[k]))
    return dev


def verify_operator_algebra(setup, cutoff, angle_samples) -> AlgebraReport:
    """Check ``A^2 = 1``, ``A^† = A`` and ``[A_i, A_j] = 0`` as explicit matrices.

    The cross-mode check embeds every pair of sampled angles on two distinct
    modes of a two-mode space.
    """
    setup = SetupKind(setup)
    cutoff = _check_cutoff(cutoff)
    eye = sp.identity(cutoff, dtype=complex, format="csr")
    mats = [bell_operator_matrix(setup, a, cutoff) for a in angle_samples]
    involution = max((_max_abs(m @ m - eye) for m in mats), default=0.0)
    hermiticity = max((_max_abs(m - m.conj().T) for m in mats), default=0.0)
    cross = 0.0
    for m1 in mats:
        for m2 in mats:
            on0 = sp.kron(m1, eye, format="csr")
            on1 = sp.kron(eye, m2, format="csr")
            cross = max(cross, _max_abs(on0 @ on1 - on1 @ on0))
    return AlgebraReport(
        setup=setup,
        cutoff=cutoff,
        involution=involution,
        hermiticity=hermiticity,
        cross_mode_commutator=cross,
        pseudospin_commutators=pseudospin_commutator_deviation(cutoff),
    )
