"""The U2 approximation of the waiting time and its proven sandwich.

``U2 = sum_{i=1}^m 1 / (i p_i)`` with coupons ranked by increasing
probability, so rank 1 is the least probable coupon.  Grouped by class,
``U2 = sum_j (H(r_j + M_j) - H(r_j)) / p_j`` where ``r_j`` counts the coupons
of lighter classes.  Known bounds: ``U2 / (3e ln ln m) <= E <= 2 U2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectrum import ClassSpectrum

EULER_GAMMA = 0.57721566490153286060651209
#: Harmonic numbers up to this argument are summed directly.
HARMONIC_CUTOFF = 10**6
#: Smallest collection for which ``ln ln m`` gives a usable lower bound.
MIN_BOUND_M = 16


class BoundUndefinedError(ValueError):
    pass


def _harmonic_expansion(x: int) -> float:
    # integer arithmetic in the correction terms keeps huge x in range
    return math.log(x) + EULER_GAMMA + 1 / (2 * x) - 1 / (12 * x * x) + 1 / (120 * x**4)


@lru_cache(maxsize=256)
def harmonic(x: int) -> float:
    """``H(x) = sum_{i<=x} 1/i``."""
    if x < 0:
        raise ValueError("harmonic number of a negative argument")
    if x <= HARMONIC_CUTOFF:
        return math.fsum((1.0 / np.arange(1, x + 1, dtype=float)).tolist())
    return _harmonic_expansion(x)


def harmonic_diff(a: int, b: int) -> float:
    """``H(b) - H(a) = sum_{a<i<=b} 1/i`` without cancellation, for ``0 <= a <= b``."""
    if b < a:
        raise ValueError("need a <= b")
    span = b - a
    if span == 0:
        return 0.0
    if span <= 10**5 and b < 2**53:
        return float(np.sum(1.0 / np.arange(a + 1, b + 1, dtype=float)[::-1]))
    if a <= HARMONIC_CUTOFF:
        return harmonic(b) - harmonic(a)
    # differences of the expansion terms, each free of cancellation
    out = math.log1p(span / a)
    out -= span / (2 * a * b)
    out += span * (a + b) / (12 * a * a * b * b)
    out -= (b**4 - a**4) / (120 * a**4 * b**4)
    return out


def log_harmonic_diff(a: int, b: int) -> float:
    """``ln(H(b) - H(a))``, usable when the difference underflows."""
    d = harmonic_diff(a, b)
    if d > 1e-280:
        return math.log(d)
    # H(b) - H(a) = (b - a) / a * (1 + O((b - a) / a))
    return math.log(b - a) - math.log(a)


def u2(spectrum: ClassSpectrum) -> float:
    return math.exp(log_u2(spectrum))


def log_u2(spectrum: ClassSpectrum) -> float:
    """Log of the grouped U2 sum (classes are already in increasing weight order)."""
    terms = []
    r = 0
    for c, log_p in zip(spectrum.classes, spectrum.log_probabilities):
        terms.append(log_harmonic_diff(r, r + c.multiplicity) - float(log_p))
        r += c.multiplicity
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def u2_naive(probabilities) -> float:
    """Per-coupon U2 with coupons sorted by increasing probability."""
    p = np.sort(np.asarray(probabilities, dtype=float))
    ranks = np.arange(1, len(p) + 1, dtype=float)
    return math.fsum((1.0 / (ranks * p)).tolist())


@dataclass(frozen=True)
class ApproxReport:
    u2: float
    lower: float
    upper: float
    m_float: float
    exact: float
    log_u2: float
    log_lower: float
    log_upper: float
    log_exact: float

    @property
    def satisfied(self) -> bool:
        return self.log_lower <= self.log_exact <= self.log_upper


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def log_bounds(spectrum: ClassSpectrum) -> tuple[float, float, float]:
    """``(ln U2, ln lower, ln upper)``."""
    if spectrum.m < MIN_BOUND_M:
        raise BoundUndefinedError(f"the U2 lower bound needs m >= {MIN_BOUND_M}, got m={spectrum.m}")
    lu = log_u2(spectrum)
    return lu, lu - math.log(3 * math.e * math.log(spectrum.log_m)), lu + math.log(2.0)


def check_bounds(spectrum: ClassSpectrum, exact: float | None = None, *, log_exact: float | None = None) -> ApproxReport:
    """Compare an exact waiting time with ``[U2 / (3e ln ln m), 2 U2]``.

    Pass ``log_exact`` instead of ``exact`` for values beyond double range.
    """
    if log_exact is None:
        if exact is None or not exact > 0:
            raise ValueError("an exact waiting time is required")
        log_exact = math.log(exact)
    lu, log_lower, log_upper = log_bounds(spectrum)
    return ApproxReport(
        u2=_exp(lu),
        lower=_exp(log_lower),
        upper=_exp(log_upper),
        m_float=_exp(spectrum.log_m),
        exact=_exp(log_exact),
        log_u2=lu,
        log_lower=log_lower,
        log_upper=log_upper,
        log_exact=log_exact,
    )
