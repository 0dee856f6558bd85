"""Weighted-collection data model: weight assignments, weight classes, spectra.

A spectrum is the increasingly ordered list of distinct word weights of a
language at a fixed length, each with its multiplicity.  Weights live in the
log domain; multiplicities are exact Python integers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

#: Absolute tolerance (log domain) under which two class weights are merged.
LOG_COLLISION_TOL = 1e-12

#: Relative distance from 1 under which a normalized weight is snapped to 1.
UNIT_SNAP_TOL = 1e-12


class SpectrumError(ValueError):
    """Base class for invalid inputs to the data model."""


class InvalidAssignmentError(SpectrumError):
    pass


class EmptyLanguageError(SpectrumError):
    pass


class WeightCollisionWarning(UserWarning):
    """Distinct sub-compositions were found to carry the same weight."""


@dataclass(frozen=True)
class WeightAssignment:
    """Positive multiplicative weight per letter."""

    letters: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "weights", weights)
        if len(letters) != len(weights):
            raise InvalidAssignmentError("letters and weights differ in length")
        if not letters:
            raise InvalidAssignmentError("empty alphabet")
        if len(set(letters)) != len(letters):
            raise InvalidAssignmentError(f"duplicate letters in {letters}")
        for a, w in zip(letters, weights):
            if not (w > 0 and math.isfinite(w)):
                raise InvalidAssignmentError(f"weight of {a!r} must be positive and finite, got {w}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "WeightAssignment":
        return cls(tuple(mapping), tuple(mapping.values()))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.letters, self.weights))

    def weight(self, letter: str) -> float:
        return self.weights[self.letters.index(letter)]

    @property
    def unit_letters(self) -> tuple[str, ...]:
        return tuple(a for a, w in zip(self.letters, self.weights) if w == 1.0)

    @property
    def non_unit_letters(self) -> tuple[str, ...]:
        return tuple(a for a, w in zip(self.letters, self.weights) if w != 1.0)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.weights)) == 1

    @property
    def is_normalized(self) -> bool:
        return min(self.weights) == 1.0 and self.letters == normalize(self).letters


def normalize(assignment: WeightAssignment) -> WeightAssignment:
    """Divide every weight by the smallest one and list unit letters first.

    Letters are stably sorted by weight, so the ``l`` unit-weight letters come
    first.  Ratios within ``UNIT_SNAP_TOL`` of 1 are snapped to exactly 1.
    The operation is idempotent.
    """
    lo = min(assignment.weights)
    scaled = []
    for a, w in zip(assignment.letters, assignment.weights):
        r = w / lo
        if abs(r - 1.0) <= UNIT_SNAP_TOL:
            r = 1.0
        scaled.append((a, r))
    scaled.sort(key=lambda aw: aw[1])
    return WeightAssignment(tuple(a for a, _ in scaled), tuple(w for _, w in scaled))


@dataclass(frozen=True)
class SubComposition:
    """Occurrence counts of the non-unit letters of a word."""

    counts: tuple[int, ...]
    log_weight: float

    @property
    def size(self) -> int:
        return sum(self.counts)

    @classmethod
    def from_counts(cls, counts: Sequence[int], log_letter_weights: Sequence[float]) -> "SubComposition":
        counts = tuple(int(c) for c in counts)
        if len(counts) != len(log_letter_weights):
            raise SpectrumError("counts and letter weights differ in length")
        if any(c < 0 for c in counts):
            raise SpectrumError(f"negative count in {counts}")
        lw = math.fsum(c * w for c, w in zip(counts, log_letter_weights))
        return cls(counts, lw)


@dataclass(frozen=True)
class WeightClass:
    key: SubComposition
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise SpectrumError("a weight class needs multiplicity >= 1")

    @property
    def log_weight(self) -> float:
        return self.key.log_weight

    @property
    def weight(self) -> float:
        return math.exp(self.key.log_weight)


@dataclass(frozen=True)
class Collision:
    log_weight: float
    keys: tuple[tuple[int, ...], ...]


def _logsumexp(values: Iterable[float]) -> float:
    values = list(values)
    top = max(values)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


def log_int(x: int) -> float:
    """Natural log of a (possibly huge) positive integer."""
    return math.log(x)


@dataclass(frozen=True)
class ClassSpectrum:
    """Ordered distinct weights with multiplicities for one length ``n``.

    The position of a class in ``classes`` is its weight rank minus one.
    Build instances with :func:`build_spectrum`.
    """

    classes: tuple[WeightClass, ...]
    n: int
    m: int
    log_mu: float
    collisions: tuple[Collision, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.classes)

    @cached_property
    def log_weights(self) -> np.ndarray:
        return np.array([c.log_weight for c in self.classes], dtype=float)

    @cached_property
    def log_multiplicities(self) -> np.ndarray:
        return np.array([log_int(c.multiplicity) for c in self.classes], dtype=float)

    @property
    def multiplicities(self) -> list[int]:
        return [c.multiplicity for c in self.classes]

    @property
    def keys(self) -> list[tuple[int, ...]]:
        return [c.key.counts for c in self.classes]

    @property
    def log_m(self) -> float:
        return log_int(self.m)

    @property
    def mu(self) -> float:
        return math.exp(self.log_mu)

    @cached_property
    def log_probabilities(self) -> np.ndarray:
        """Per-coupon log probability of each class."""
        return self.log_weights - self.log_mu

    def as_pairs(self) -> list[tuple[tuple[int, ...], int]]:
        return [(c.key.counts, c.multiplicity) for c in self.classes]


def build_spectrum(classes: Iterable[WeightClass], n: int, *, warn: bool = True) -> ClassSpectrum:
    """Sort classes by weight and merge equal weights.

    Classes sharing a key are summed silently.  Distinct keys whose log
    weights differ by less than ``LOG_COLLISION_TOL`` are merged too, keeping
    the key of smallest size, and the event is recorded in ``collisions``.
    """
    by_key: dict[tuple[int, ...], WeightClass] = {}
    for c in classes:
        prev = by_key.get(c.key.counts)
        if prev is None:
            by_key[c.key.counts] = c
        else:
            by_key[c.key.counts] = WeightClass(prev.key, prev.multiplicity + c.multiplicity)
    if not by_key:
        raise EmptyLanguageError(f"no words of length {n}")

    ordered = sorted(by_key.values(), key=lambda c: (c.log_weight, c.key.size, c.key.counts))
    merged: list[WeightClass] = []
    collisions: list[Collision] = []
    group: list[WeightClass] = [ordered[0]]

    def flush():
        if len(group) == 1:
            merged.append(group[0])
            return
        best = min(group, key=lambda c: (c.key.size, c.key.counts))
        merged.append(WeightClass(best.key, sum(c.multiplicity for c in group)))
        collisions.append(Collision(best.log_weight, tuple(c.key.counts for c in group)))

    for c in ordered[1:]:
        if c.log_weight - group[0].log_weight < LOG_COLLISION_TOL:
            group.append(c)
        else:
            flush()
            group = [c]
    flush()

    if collisions and warn:
        warnings.warn(
            f"{len(collisions)} weight collision(s) at n={n}; merged classes "
            f"{[col.keys for col in collisions[:3]]}",
            WeightCollisionWarning,
            stacklevel=2,
        )

    m = sum(c.multiplicity for c in merged)
    log_mu = _logsumexp(log_int(c.multiplicity) + c.log_weight for c in merged)
    return ClassSpectrum(tuple(merged), n, m, log_mu, tuple(collisions))


def uniform_spectrum(m: int, n: int = 0) -> ClassSpectrum:
    """One class of ``m`` equiprobable coupons."""
    return build_spectrum([WeightClass(SubComposition((), 0.0), m)], n)


def spectrum_from_weights(weights: Mapping[float, int] | Iterable[tuple[float, int]], n: int = 0) -> ClassSpectrum:
    """Spectrum from raw ``(weight, multiplicity)`` pairs.

    Keys are synthesized as ``(rank,)`` so that distinct weights never count
    as collisions.  Handy for ad hoc coupon collections.
    """
    pairs = list(weights.items()) if isinstance(weights, Mapping) else list(weights)
    classes = [
        WeightClass(SubComposition((i,), math.log(float(w))), int(mult))
        for i, (w, mult) in enumerate(sorted(pairs))
    ]
    return build_spectrum(classes, n)


def class_probabilities(spectrum: ClassSpectrum) -> list[tuple[float, int]]:
    """``(log p_i, M_i)`` per class, with ``p_i = W_i / mu``."""
    return [(c.log_weight - spectrum.log_mu, c.multiplicity) for c in spectrum.classes]
