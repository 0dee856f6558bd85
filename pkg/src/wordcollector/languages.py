"""The four weighted languages and their weight spectra.

Each language has a closed-form multiplicity per composition and a
brute-force word enumerator that serves as an independent oracle.

Alphabets: Sigma* uses the letters of its assignment; the three bracket
languages use ``a`` (open), ``abar`` (close) and ``b`` (dot / neutral).
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .spectrum import (
    ClassSpectrum,
    EmptyLanguageError,
    SpectrumError,
    SubComposition,
    WeightAssignment,
    WeightClass,
    build_spectrum,
    normalize,
)

BRACKET_ALPHABET = ("a", "abar", "b")

#: Default largest length accepted by :func:`enumerate_words`.
ORACLE_CAP = 14

Word = tuple[str, ...]


class OracleCapError(ValueError):
    pass


class Kind(str, enum.Enum):
    SIGMA_STAR = "sigma-star"
    MOTZKIN = "motzkin"
    RNA = "rna"
    NON_CONNECTED = "nc"


@dataclass(frozen=True)
class LanguageModel:
    """A language family plus a letter weighting.

    The assignment is normalized on construction (smallest weight 1, unit
    letters first), which fixes the sub-composition key order.
    """

    kind: Kind
    assignment: WeightAssignment
    theta: int = 1

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "assignment", normalize(self.assignment))
        if kind is not Kind.SIGMA_STAR:
            if sorted(self.assignment.letters) != sorted(BRACKET_ALPHABET):
                raise SpectrumError(
                    f"{kind.value} needs weights for exactly {BRACKET_ALPHABET}, got {self.assignment.letters}"
                )
        if kind is Kind.RNA and (int(self.theta) != self.theta or self.theta < 1):
            raise SpectrumError(f"theta must be a positive integer, got {self.theta}")

    @classmethod
    def sigma_star(cls, weights: dict[str, float]) -> "LanguageModel":
        return cls(Kind.SIGMA_STAR, WeightAssignment.from_mapping(weights))

    @classmethod
    def motzkin(cls, a: float, abar: float, b: float) -> "LanguageModel":
        return cls(Kind.MOTZKIN, WeightAssignment.from_mapping({"a": a, "abar": abar, "b": b}))

    @classmethod
    def rna(cls, a: float, abar: float, b: float, theta: int) -> "LanguageModel":
        return cls(Kind.RNA, WeightAssignment.from_mapping({"a": a, "abar": abar, "b": b}), theta)

    @classmethod
    def non_connected(cls, a: float, abar: float, b: float) -> "LanguageModel":
        return cls(Kind.NON_CONNECTED, WeightAssignment.from_mapping({"a": a, "abar": abar, "b": b}))

    @property
    def k(self) -> int:
        return len(self.assignment.letters)

    def weight(self, letter: str) -> float:
        return self.assignment.weight(letter)

    def key_of(self, composition: dict[str, int]) -> SubComposition:
        """Sub-composition of a letter-count map, over the non-unit letters."""
        letters = self.assignment.non_unit_letters
        logs = [math.log(self.weight(a)) for a in letters]
        return SubComposition.from_counts([composition.get(a, 0) for a in letters], logs)


def binom(a: int, b: int) -> int:
    """Binomial coefficient, zero outside ``0 <= b <= a``."""
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


def multinomial(n: int, parts: Sequence[int]) -> int:
    rest = n - sum(parts)
    if rest < 0 or any(p < 0 for p in parts):
        return 0
    out = math.factorial(n) // math.factorial(rest)
    for p in parts:
        out //= math.factorial(p)
    return out


def motzkin_multiplicity(n: int, k: int) -> int:
    """Motzkin words of length n with k bracket pairs."""
    return binom(2 * k, k) * binom(n, 2 * k) // (k + 1)


def rna_multiplicity(n: int, k: int, theta: int) -> int:
    """Secondary structures of length n with k pairs, each enclosing >= theta letters."""
    if k == 0:
        return 1 if n >= 0 else 0
    total = 0
    for p in range(1, (n - 2 * k) // theta + 1):
        # (1/k) C(k,p) C(k,p-1) is a Narayana number, hence exact
        total += binom(k, p) * binom(k, p - 1) // k * binom(n - theta * p, 2 * k)
    return total


def nc_multiplicity(n: int, k: int) -> int:
    """Words of L^(nc) of even length n containing k occurrences of ``abar``."""
    half = n // 2
    return binom(n - k - 1, half - 1) - binom(n - k - 1, half)


def _check_n(n: int) -> None:
    if n < 0:
        raise SpectrumError(f"length must be non-negative, got {n}")


def sigma_star_spectrum(model: LanguageModel, n: int) -> ClassSpectrum:
    _check_n(n)
    asg = model.assignment
    l = len(asg.unit_letters)
    free = asg.non_unit_letters
    classes = []
    for size in range(n + 1):
        for x in _compositions(size, len(free)):
            mult = l ** (n - size) * multinomial(n, x)
            if mult:
                classes.append(WeightClass(model.key_of(dict(zip(free, x))), mult))
    return build_spectrum(classes, n)


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def motzkin_spectrum(model: LanguageModel, n: int) -> ClassSpectrum:
    _check_n(n)
    classes = [
        WeightClass(model.key_of({"a": k, "abar": k, "b": n - 2 * k}), motzkin_multiplicity(n, k))
        for k in range(n // 2 + 1)
    ]
    return build_spectrum(classes, n)


def rna_spectrum(model: LanguageModel, n: int) -> ClassSpectrum:
    _check_n(n)
    classes = []
    for k in range(n // 2 + 1):
        mult = rna_multiplicity(n, k, model.theta)
        if mult:
            classes.append(WeightClass(model.key_of({"a": k, "abar": k, "b": n - 2 * k}), mult))
    return build_spectrum(classes, n)


def nc_spectrum(model: LanguageModel, n: int) -> ClassSpectrum:
    _check_n(n)
    if n % 2:
        raise EmptyLanguageError(f"language empty at odd length (n={n})")
    if n == 0:
        return build_spectrum([WeightClass(model.key_of({}), 1)], 0)
    half = n // 2
    classes = []
    for k in range(1, half + 1):
        mult = nc_multiplicity(n, k)
        if mult:
            classes.append(WeightClass(model.key_of({"a": half - k, "abar": k, "b": half}), mult))
    return build_spectrum(classes, n)


def spectrum(model: LanguageModel, n: int) -> ClassSpectrum:
    """Formula-built spectrum of ``model`` at length ``n``."""
    return _BUILDERS[model.kind](model, n)


_BUILDERS = {
    Kind.SIGMA_STAR: sigma_star_spectrum,
    Kind.MOTZKIN: motzkin_spectrum,
    Kind.RNA: rna_spectrum,
    Kind.NON_CONNECTED: nc_spectrum,
}


def word_count(model: LanguageModel, n: int) -> int:
    """Number of words of length n, from the closed forms."""
    if model.kind is Kind.SIGMA_STAR:
        return model.k**n
    if model.kind is Kind.MOTZKIN:
        return sum(motzkin_multiplicity(n, k) for k in range(n // 2 + 1))
    if model.kind is Kind.RNA:
        return sum(rna_multiplicity(n, k, model.theta) for k in range(n // 2 + 1))
    if n % 2:
        return 0
    if n == 0:
        return 1
    return sum(nc_multiplicity(n, k) for k in range(1, n // 2 + 1))


# --- brute-force oracle ----------------------------------------------------

A, ABAR, B = BRACKET_ALPHABET


@lru_cache(maxsize=None)
def _motzkin_words(n: int) -> tuple[Word, ...]:
    # S -> a S abar S | b S | eps
    if n == 0:
        return ((),)
    out = [(B,) + w for w in _motzkin_words(n - 1)]
    for i in range(n - 1):
        for inner in _motzkin_words(i):
            for rest in _motzkin_words(n - 2 - i):
                out.append((A,) + inner + (ABAR,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _rna_words(n: int, theta: int) -> tuple[Word, ...]:
    # S -> a T abar S | b S | eps
    if n == 0:
        return ((),)
    out = [(B,) + w for w in _rna_words(n - 1, theta)]
    for i in range(theta, n - 1):
        for inner in _rna_tail_words(i, theta):
            for rest in _rna_words(n - 2 - i, theta):
                out.append((A,) + inner + (ABAR,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _rna_tail_words(n: int, theta: int) -> tuple[Word, ...]:
    # T -> a T abar S | b T | b^theta
    if n < theta:
        return ()
    out = [(B,) * theta] if n == theta else []
    out += [(B,) + w for w in _rna_tail_words(n - 1, theta)]
    for i in range(theta, n - 1):
        for inner in _rna_tail_words(i, theta):
            for rest in _rna_words(n - 2 - i, theta):
                out.append((A,) + inner + (ABAR,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _nc_words(n: int) -> tuple[Word, ...]:
    # S -> abar S b U | eps
    if n == 0:
        return ((),)
    out = []
    for i in range(n - 1):
        for inner in _nc_words(i):
            for rest in _nc_u_words(n - 2 - i):
                out.append((ABAR,) + inner + (B,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _nc_u_words(n: int) -> tuple[Word, ...]:
    # U -> a U b U | eps
    if n == 0:
        return ((),)
    out = []
    for i in range(n - 1):
        for inner in _nc_u_words(i):
            for rest in _nc_u_words(n - 2 - i):
                out.append((A,) + inner + (B,) + rest)
    return tuple(out)


def enumerate_words(model: LanguageModel, n: int, cap: int = ORACLE_CAP) -> list[Word]:
    """Every word of length ``n``, by direct grammar expansion.

    Exponential in ``n``; refuses lengths above ``cap``.
    """
    _check_n(n)
    if n > cap:
        raise OracleCapError(f"n={n} exceeds the enumeration cap {cap}")
    if model.kind is Kind.SIGMA_STAR:
        return list(itertools.product(model.assignment.letters, repeat=n))
    if model.kind is Kind.MOTZKIN:
        return list(_motzkin_words(n))
    if model.kind is Kind.RNA:
        return list(_rna_words(n, model.theta))
    return list(_nc_words(n))


def spectrum_from_words(words: Sequence[Word], assignment: WeightAssignment, n: int | None = None) -> ClassSpectrum:
    """Group words by sub-composition over the non-unit letters."""
    asg = normalize(assignment)
    free = asg.non_unit_letters
    logs = [math.log(asg.weight(a)) for a in free]
    counts = Counter()
    for w in words:
        c = Counter(w)
        counts[tuple(c.get(a, 0) for a in free)] += 1
    if n is None:
        n = len(words[0]) if words else 0
    classes = [WeightClass(SubComposition.from_counts(x, logs), mult) for x, mult in counts.items()]
    return build_spectrum(classes, n)
