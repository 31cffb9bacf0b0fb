"""Sparse truncated Fock-space kets and the two entangled state families.

A :class:`SparseKet` stores only the nonzero amplitudes of a multimode state.
Multi-indices are packed into a single ``int64`` key in row-major order
(mode 0 most significant), so sorted keys are sorted multi-indices and inner
products reduce to a sorted-array intersection.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import gammainc

from .exceptions import (
    DegenerateStateError,
    InvalidParameterError,
    ShapeError,
    TruncationError,
)

PRUNE_THRESHOLD = 1e-16
TAIL_TOLERANCE = 1e-12
DEGENERATE_NORM2 = 1e-12

_MAX_KEY = 2**62


def _check_cutoff(cutoff) -> int:
    if isinstance(cutoff, bool) or not isinstance(cutoff, (int, np.integer)):
        raise InvalidParameterError(f"cutoff must be an integer, got {cutoff!r}")
    cutoff = int(cutoff)
    if cutoff < 2 or cutoff % 2:
        raise InvalidParameterError(f"cutoff must be an even integer >= 2, got {cutoff}")
    return cutoff


def _check_real(name, value) -> float:
    if isinstance(value, (complex, np.complexfloating)):
        raise InvalidParameterError(f"{name} must be real, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


def _check_open_unit(name, value) -> float:
    value = _check_real(name, value)
    if not 0.0 < value < 1.0:
        raise InvalidParameterError(f"{name} must lie strictly inside (0, 1), got {value}")
    return value


class SparseKet:
    """Immutable multimode ket on a per-mode truncated Fock basis.

    Parameters
    ----------
    num_modes : int
        Number of bosonic modes.
    cutoff : int
        Per-mode Fock dimension; occupations run over ``0 .. cutoff - 1``.
        Must be even so every ``(2n, 2n+1)`` pseudospin pair is complete.
    keys : array of int64
        Packed multi-indices (see :meth:`pack`).
    amps : array of complex128
        Amplitudes aligned with ``keys``.
    tail_mass : float
        Probability mass known to lie beyond the truncation.

    Duplicate keys are summed, entries below ``PRUNE_THRESHOLD`` in magnitude
    are dropped and the result is stored sorted by key.
    """

    __slots__ = ("num_modes", "cutoff", "keys", "amps", "tail_mass", "_strides")

    def __init__(self, num_modes, cutoff, keys, amps, tail_mass=0.0):
        if num_modes < 1:
            raise InvalidParameterError(f"num_modes must be positive, got {num_modes}")
        cutoff = _check_cutoff(cutoff)
        if cutoff**num_modes > _MAX_KEY:
            raise InvalidParameterError(
                f"cutoff {cutoff} with {num_modes} modes overflows the index packing"
            )
        keys = np.asarray(keys, dtype=np.int64).ravel()
        amps = np.asarray(amps, dtype=np.complex128).ravel()
        if keys.shape != amps.shape:
            raise ShapeError("keys and amplitudes must have the same length")
        if keys.size and (keys.min() < 0 or keys.max() >= cutoff**num_modes):
            raise ShapeError("multi-index outside the truncated space")

        uniq, inverse = np.unique(keys, return_inverse=True)
        if uniq.size != keys.size:
            summed = np.zeros(uniq.size, dtype=np.complex128)
            np.add.at(summed, inverse, amps)
            keys, amps = uniq, summed
        else:
            order = np.argsort(keys, kind="stable")
            keys, amps = keys[order], amps[order]
        keep = np.abs(amps) >= PRUNE_THRESHOLD
        keys, amps = keys[keep], amps[keep]
        keys.flags.writeable = False
        amps.flags.writeable = False

        self.num_modes = int(num_modes)
        self.cutoff = cutoff
        self.keys = keys
        self.amps = amps
        self.tail_mass = float(tail_mass)
        self._strides = cutoff ** np.arange(num_modes - 1, -1, -1, dtype=np.int64)

    @classmethod
    def from_dict(cls, num_modes, cutoff, amplitudes: Mapping, tail_mass=0.0):
        """Build a ket from ``{(n_0, ..., n_{k-1}): amplitude}``."""
        cutoff = _check_cutoff(cutoff)
        idx = np.array(list(amplitudes.keys()), dtype=np.int64).reshape(-1, num_modes)
        if idx.size and (idx.min() < 0 or idx.max() >= cutoff):
            raise ShapeError(f"occupation numbers must lie in [0, {cutoff})")
        strides = cutoff ** np.arange(num_modes - 1, -1, -1, dtype=np.int64)
        keys = idx @ strides
        return cls(num_modes, cutoff, keys, list(amplitudes.values()), tail_mass)

    @classmethod
    def basis(cls, occupations, cutoff):
        """The Fock basis ket ``|n_0, n_1, ...>``."""
        occupations = tuple(int(n) for n in occupations)
        return cls.from_dict(len(occupations), cutoff, {occupations: 1.0})

    def pack(self, occupations) -> int:
        return int(np.dot(np.asarray(occupations, dtype=np.int64), self._strides))

    @property
    def strides(self):
        return self._strides

    @property
    def indices(self) -> np.ndarray:
        """Multi-indices as an ``(nnz, num_modes)`` integer array."""
        return (self.keys[:, None] // self._strides[None, :]) % self.cutoff

    @property
    def amplitudes(self) -> dict:
        return {tuple(int(n) for n in row): complex(a) for row, a in zip(self.indices, self.amps)}

    def __getitem__(self, occupations) -> complex:
        occupations = tuple(occupations)
        if len(occupations) != self.num_modes:
            raise ShapeError(f"expected {self.num_modes} occupation numbers")
        if any(n < 0 or n >= self.cutoff for n in occupations):
            return 0j
        key = self.pack(occupations)
        pos = np.searchsorted(self.keys, key)
        if pos < self.keys.size and self.keys[pos] == key:
            return complex(self.amps[pos])
        return 0j

    def __contains__(self, occupations) -> bool:
        return self[occupations] != 0

    def __len__(self) -> int:
        return int(self.keys.size)

    def __repr__(self):
        return (
            f"SparseKet(num_modes={self.num_modes}, cutoff={self.cutoff}, "
            f"nnz={len(self)}, tail_mass={self.tail_mass:.3g})"
        )

    def norm_squared(self) -> float:
        return float(np.sum(self.amps.real**2 + self.amps.imag**2))

    def _check_compatible(self, other):
        if not isinstance(other, SparseKet):
            raise TypeError(f"expected SparseKet, got {type(other).__name__}")
        if other.num_modes != self.num_modes or other.cutoff != self.cutoff:
            raise ShapeError(
                f"incompatible kets: ({self.num_modes} modes, cutoff {self.cutoff}) vs "
                f"({other.num_modes} modes, cutoff {other.cutoff})"
            )

    def __add__(self, other):
        self._check_compatible(other)
        return SparseKet(
            self.num_modes,
            self.cutoff,
            np.concatenate([self.keys, other.keys]),
            np.concatenate([self.amps, other.amps]),
            max(self.tail_mass, other.tail_mass),
        )

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return SparseKet(self.num_modes, self.cutoff, self.keys, self.amps * scalar, self.tail_mass)

    __rmul__ = __mul__

    def normalized(self):
        norm2 = self.norm_squared()
        if norm2 == 0.0:
            raise DegenerateStateError("cannot normalize the zero ket", norm2)
        return self * (1.0 / math.sqrt(norm2))

    def tensor(self, other):
        """Tensor product ``self ⊗ other`` (modes of ``other`` appended)."""
        if other.cutoff != self.cutoff:
            raise ShapeError("tensor factors must share the same cutoff")
        shift = self.cutoff**other.num_modes
        keys = (self.keys[:, None] * shift + other.keys[None, :]).ravel()
        amps = (self.amps[:, None] * other.amps[None, :]).ravel()
        tail = -math.expm1(math.log1p(-self.tail_mass) + math.log1p(-other.tail_mass))
        return SparseKet(self.num_modes + other.num_modes, self.cutoff, keys, amps, tail)


def inner_product(bra: SparseKet, ket: SparseKet) -> complex:
    """``<bra|ket>`` summed over the shared support."""
    bra._check_compatible(ket)
    _, ib, ik = np.intersect1d(bra.keys, ket.keys, assume_unique=True, return_indices=True)
    return complex(np.sum(np.conj(bra.amps[ib]) * ket.amps[ik]))


def coherent_coefficients(alpha, cutoff):
    """Fock amplitudes of the real coherent state ``|alpha>``.

    Returns ``(coefficients, tail_mass)`` where ``coefficients[n]`` is
    ``exp(-alpha**2 / 2) * alpha**n / sqrt(n!)`` for ``n < cutoff`` and
    ``tail_mass`` is the exact probability of occupation ``>= cutoff``.
    """
    alpha = _check_real("alpha", alpha)
    cutoff = _check_cutoff(cutoff)
    coeffs = np.empty(cutoff)
    coeffs[0] = math.exp(-0.5 * alpha * alpha)
    for n in range(1, cutoff):
        coeffs[n] = coeffs[n - 1] * alpha / math.sqrt(n)
    # regularized lower incomplete gamma P(N, x) = Pr[Poisson(x) >= N]
    tail = float(gammainc(cutoff, alpha * alpha)) if alpha else 0.0
    return coeffs, tail


def coherent_ket(alpha, cutoff) -> SparseKet:
    coeffs, tail = coherent_coefficients(alpha, cutoff)
    return SparseKet(1, cutoff, np.arange(cutoff), coeffs, tail)


def two_mode_squeezed_ket(eta, cutoff) -> SparseKet:
    """``sqrt(1 - eta**2) * sum_n eta**n |n, n>`` truncated to ``n < cutoff``."""
    eta = _check_open_unit("eta", eta)
    cutoff = _check_cutoff(cutoff)
    n = np.arange(cutoff)
    amps = math.sqrt(1.0 - eta * eta) * eta**n
    return SparseKet(2, cutoff, n * (cutoff + 1), amps, eta ** (2 * cutoff))


class StateKind(enum.Enum):
    SQUEEZED_COHERENT = "sc"
    SQUEEZED_SQUEEZED = "ss"

    @property
    def num_modes(self) -> int:
        return 3 if self is StateKind.SQUEEZED_COHERENT else 4


@dataclass(frozen=True)
class EntangledStateSpec:
    """One of the two-branch entangled states.

    ``kind`` selects the family, ``eta`` is the first squeezing parameter and
    ``second_param`` is ``alpha`` (squeezed-coherent) or ``sigma``
    (squeezed-squeezed).  Because ``alpha`` also serves as a squeezing
    parameter in the other branch, both parameters must lie in ``(0, 1)``.
    """

    kind: StateKind
    eta: float
    second_param: float
    phi: float = 0.0

    def __post_init__(self):
        kind = StateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "eta", _check_open_unit("eta", self.eta))
        name = "alpha" if kind is StateKind.SQUEEZED_COHERENT else "sigma"
        object.__setattr__(self, "second_param", _check_open_unit(name, self.second_param))
        object.__setattr__(self, "phi", _check_real("phi", self.phi))

    @classmethod
    def squeezed_coherent(cls, alpha, eta, phi=0.0):
        return cls(StateKind.SQUEEZED_COHERENT, eta, alpha, phi)

    @classmethod
    def squeezed_squeezed(cls, eta, sigma, phi=0.0):
        return cls(StateKind.SQUEEZED_SQUEEZED, eta, sigma, phi)

    @classmethod
    def from_params(cls, kind, param1, param2, phi=0.0):
        """Build from the conventional pair: ``(alpha, eta)`` or ``(eta, sigma)``."""
        kind = StateKind(kind)
        if kind is StateKind.SQUEEZED_COHERENT:
            return cls.squeezed_coherent(param1, param2, phi)
        return cls.squeezed_squeezed(param1, param2, phi)

    @property
    def num_modes(self) -> int:
        return self.kind.num_modes

    @property
    def params(self) -> tuple:
        if self.kind is StateKind.SQUEEZED_COHERENT:
            return (self.second_param, self.eta)
        return (self.eta, self.second_param)


def branch_kets(spec: EntangledStateSpec, cutoff):
    """The two unnormalized branches, without the relative phase."""
    cutoff = _check_cutoff(cutoff)
    p, q = spec.eta, spec.second_param
    if spec.kind is StateKind.SQUEEZED_COHERENT:
        first = two_mode_squeezed_ket(p, cutoff).tensor(coherent_ket(q, cutoff))
        second = two_mode_squeezed_ket(q, cutoff).tensor(coherent_ket(p, cutoff))
    else:
        first = two_mode_squeezed_ket(p, cutoff).tensor(two_mode_squeezed_ket(q, cutoff))
        second = two_mode_squeezed_ket(q, cutoff).tensor(two_mode_squeezed_ket(p, cutoff))
    return first, second


def _product_tail(tails):
    return -math.expm1(sum(math.log1p(-t) for t in tails))


def branch_tail_masses(spec: EntangledStateSpec, cutoff) -> tuple:
    """Probability mass each branch loses to the truncation."""
    cutoff = _check_cutoff(cutoff)
    p, q = spec.eta, spec.second_param

    def sq(x):
        return x ** (2 * cutoff)

    def coh(x):
        return float(gammainc(cutoff, x * x))

    if spec.kind is StateKind.SQUEEZED_COHERENT:
        return (_product_tail([sq(p), coh(q)]), _product_tail([sq(q), coh(p)]))
    both = _product_tail([sq(p), sq(q)])
    return (both, both)


def _superpose(spec, cutoff):
    first, second = branch_kets(spec, cutoff)
    phase = complex(math.cos(spec.phi), math.sin(spec.phi))
    keys = np.concatenate([first.keys, second.keys])
    amps = np.concatenate([first.amps, phase * second.amps])
    uniq, inverse = np.unique(keys, return_inverse=True)
    summed = np.zeros(uniq.size, dtype=np.complex128)
    np.add.at(summed, inverse, amps)
    return uniq, summed, float(np.sum(np.abs(summed) ** 2))


def relative_tail_mass(spec: EntangledStateSpec, cutoff, norm2=None) -> float:
    """Branch tail mass relative to the normalized superposition.

    Near the cancelling point (equal parameters, phi = pi) the normalization
    blows up and so does the weight of whatever the truncation dropped, hence
    the division by ``min(1, norm2 / 2)``.
    """
    if norm2 is None:
        norm2 = _superpose(spec, cutoff)[2]
    scale = min(1.0, norm2 / 2.0)
    if scale < DEGENERATE_NORM2:
        return math.inf
    return max(branch_tail_masses(spec, cutoff)) / scale


def adaptive_cutoff(spec: EntangledStateSpec, tail_tol=TAIL_TOLERANCE) -> int:
    """Smallest even cutoff whose relative branch tail mass is below ``tail_tol``."""
    p = max(spec.eta, spec.second_param)
    # p**(2N) < tol  <=>  N > log(tol) / (2 log p)
    cutoff = max(2, math.ceil(math.log(tail_tol) / (2.0 * math.log(p))))
    cutoff += cutoff % 2
    while max(branch_tail_masses(spec, cutoff)) >= tail_tol:
        cutoff += 2
    norm2 = _superpose(spec, cutoff)[2]
    if norm2 < DEGENERATE_NORM2:
        return cutoff
    while relative_tail_mass(spec, cutoff, norm2) >= tail_tol:
        cutoff += 2
    return cutoff


@functools.lru_cache(maxsize=256)
def _build_cached(spec, cutoff, tail_tol):
    uniq, summed, norm2 = _superpose(spec, cutoff)
    if norm2 < DEGENERATE_NORM2:
        raise DegenerateStateError(
            f"the two branches cancel (unnormalized norm^2 = {norm2:.3g}); this happens "
            "when the parameters coincide (alpha = eta or eta = sigma) and phi = pi",
            norm2,
        )
    tail = relative_tail_mass(spec, cutoff, norm2)
    if tail >= tail_tol:
        raise TruncationError(
            f"cutoff {cutoff} leaves tail mass {tail:.3g} >= {tail_tol:.3g}",
            tail_mass=tail,
            cutoff=cutoff,
        )
    return SparseKet(spec.num_modes, cutoff, uniq, summed / math.sqrt(norm2), tail)


def build_entangled_state(spec: EntangledStateSpec, cutoff=None, tail_tol=TAIL_TOLERANCE):
    """Normalized two-branch state ``N (|b1> + exp(i phi) |b2>)``.

    With ``cutoff=None`` the smallest adequate even cutoff is chosen.  An
    explicit cutoff whose relative tail mass exceeds ``tail_tol`` raises
    :class:`TruncationError`.  Results are memoized, which is safe because
    kets are immutable.
    """
    if cutoff is None:
        cutoff = adaptive_cutoff(spec, tail_tol)
    return _build_cached(spec, _check_cutoff(cutoff), float(tail_tol))
