"""Exact expected waiting time of the full collection.

The waiting time is the integral over t > 0 of one minus the probability
that every coupon has been drawn by a Poisson clock of rate 1 at time t.
Coupons that share a probability are grouped, so one integrand evaluation
costs O(number of classes) rather than O(m).

Time is rescaled by the smallest coupon probability: with ``s = p_min * t``
the class rates become ``W_i / W_min >= 1`` and the whole integration
window is ``[0, ln(m / eps)]``.  The result is returned in the log domain
when it would overflow a double.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .spectrum import ClassSpectrum

#: Coupon count above which the inclusion-exclusion oracle refuses to run.
INCLUSION_EXCLUSION_CAP = 20


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class OracleCapError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    tail_epsilon: float = 1e-12
    max_subdivisions: int = 10**6

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.tail_epsilon) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


# --- integrand -------------------------------------------------------------

def _log_neg_log1mexp(a: np.ndarray) -> np.ndarray:
    """``log(-log(1 - exp(-a)))`` for ``a > 0``, accurate in both tails."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    small = a <= math.log(2.0)
    mid = (~small) & (a <= 30.0)
    big = a > 30.0
    with np.errstate(divide="ignore"):
        out[small] = np.log(-np.log(-np.expm1(-a[small])))
        out[mid] = np.log(-np.log1p(-np.exp(-a[mid])))
    # -log(1-y) = y (1 + y/2 + ...), y = e^{-a} < 1e-13
    out[big] = -a[big] + 0.5 * np.exp(-a[big])
    return out


def _class_terms(spectrum: ClassSpectrum):
    """Rates relative to the rarest class and log-multiplicities."""
    lw = spectrum.log_weights
    # rates beyond double range become inf: such classes are collected instantly
    with np.errstate(over="ignore"):
        return np.exp(lw - lw[0]), spectrum.log_multiplicities


def _log_survival_rescaled(rates: np.ndarray, log_mult: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``sum_i M_i log(1 - exp(-rate_i s))`` for an array of ``s > 0``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    with np.errstate(over="ignore"):
        a = s[:, None] * rates[None, :]
        terms = np.exp(log_mult[None, :] + _log_neg_log1mexp(a))
    return -terms.sum(axis=1)


def log_survival(spectrum: ClassSpectrum, t: float) -> float:
    """Log-probability that every coupon has appeared by Poisson time ``t``.

    ``t`` is in draw units (rate ``p_i`` per coupon).  Returns a value <= 0,
    possibly ``-inf``.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    rates, log_mult = _class_terms(spectrum)
    p_min = math.exp(spectrum.log_weights[0] - spectrum.log_mu)
    return float(_log_survival_rescaled(rates, log_mult, np.array([t * p_min]))[0])


def _integrand(rates, log_mult, s):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.ones_like(s)
    pos = s > 0
    if pos.any():
        out[pos] = -np.expm1(_log_survival_rescaled(rates, log_mult, s[pos]))
    return out


# --- Gauss-Kronrod 7/15 ----------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1][:1], _WG[:-1][::-1]])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = f(mid + half * _NODES)
    k = half * float(_KWEIGHTS @ y)
    g = half * float(_GWEIGHTS @ y)
    return k, abs(k - g)


def _adaptive(f, breakpoints, settings: QuadratureSettings) -> tuple[float, float, int]:
    """Globally adaptive GK15 over consecutive panels of ``breakpoints``."""
    heap = []
    counter = itertools.count()
    total = err = 0.0
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        if b <= a:
            continue
        v, e = _gk15(f, a, b)
        total += v
        err += e
        heapq.heappush(heap, (-e, next(counter), a, b, v))
    n_sub = len(heap)
    while err > max(settings.abs_tol, settings.rel_tol * abs(total)):
        if n_sub >= settings.max_subdivisions:
            raise ConvergenceError(
                f"quadrature did not converge in {n_sub} subdivisions", total, err
            )
        neg_e, _, a, b, v = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not (a < mid < b):
            # interval at floating-point resolution: accept it as is
            heapq.heappush(heap, (0.0, next(counter), a, b, v))
            err += neg_e
            continue
        v1, e1 = _gk15(f, a, mid)
        v2, e2 = _gk15(f, mid, b)
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, next(counter), a, mid, v1))
        heapq.heappush(heap, (-e2, next(counter), mid, b, v2))
        n_sub += 1
    # re-sum to shed accumulated rounding from the running totals
    total = math.fsum(item[4] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return total, err, n_sub


def _knee(rates, log_mult, upper: float) -> float:
    """Rescaled time at which the integrand crosses 1/2 (bisection)."""
    lo, hi = 0.0, upper
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _integrand(rates, log_mult, mid)[0] > 0.5:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(hi, 1.0):
            break
    return 0.5 * (lo + hi)


def _breakpoints(s_half: float, upper: float, dense_panels: int = 32) -> list[float]:
    split = min(4.0 * s_half, upper)
    points = list(np.linspace(0.0, split, dense_panels + 1))
    width = max(split, 1.0)
    x = split
    while x < upper:
        x = min(x + width, upper)
        points.append(x)
        width *= 2.0
    return points


@dataclass(frozen=True)
class ExactResult:
    """Rescaled integral and its conversion to draw units."""

    log_value: float
    integral: float
    error: float
    upper: float
    knee: float
    subdivisions: int

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def tail_bound(spectrum: ClassSpectrum, settings: QuadratureSettings = QuadratureSettings()) -> float:
    """Rescaled cutoff ``ln(m / eps)``; the integrand is at most ``m e^{-s}`` there."""
    return spectrum.log_m - math.log(settings.tail_epsilon)


def integrand_rescaled(spectrum: ClassSpectrum, s) -> np.ndarray:
    """Integrand ``1 - prod_i (1 - exp(-rate_i s))^M_i`` in rescaled time."""
    rates, log_mult = _class_terms(spectrum)
    return _integrand(rates, log_mult, s)


def waiting_time_exact_result(
    spectrum: ClassSpectrum, settings: QuadratureSettings = QuadratureSettings()
) -> ExactResult:
    if spectrum.m < 1:
        raise ValueError("empty collection")
    rates, log_mult = _class_terms(spectrum)

    def f(s):
        return _integrand(rates, log_mult, s)

    upper = tail_bound(spectrum, settings)
    s_half = _knee(rates, log_mult, upper)
    integral, err, n_sub = _adaptive(f, _breakpoints(s_half, upper), settings)
    # first-order remainder beyond the cutoff: sum_i M_i e^{-rate_i T} / rate_i
    with np.errstate(over="ignore"):
        integral += float(np.exp(log_mult - rates * upper - np.log(rates)).sum())
    # draws = integral / p_min, p_min = W_min / mu
    log_value = math.log(integral) + spectrum.log_mu - float(spectrum.log_weights[0])
    return ExactResult(log_value, integral, err, upper, s_half, n_sub)


def waiting_time_exact(spectrum: ClassSpectrum, settings: QuadratureSettings = QuadratureSettings()) -> float:
    """Expected number of draws to see all ``m`` coupons (may be ``inf`` on overflow)."""
    return waiting_time_exact_result(spectrum, settings).value


def log_waiting_time_exact(spectrum: ClassSpectrum, settings: QuadratureSettings = QuadratureSettings()) -> float:
    return waiting_time_exact_result(spectrum, settings).log_value


def coupon_probabilities(spectrum: ClassSpectrum) -> np.ndarray:
    """One probability per coupon, classes expanded, ascending."""
    if spectrum.m > 10**7:
        raise OracleCapError(f"refusing to expand {spectrum.m} coupons")
    p = np.exp(spectrum.log_probabilities)
    return np.repeat(p, spectrum.multiplicities)


def waiting_time_inclusion_exclusion(spectrum: ClassSpectrum) -> float:
    """Alternating sum over non-empty coupon subsets ``J`` of ``1 / p(J)``.

    Exponential in ``m``; only for oracle use.
    """
    if spectrum.m > INCLUSION_EXCLUSION_CAP:
        raise OracleCapError(f"m={spectrum.m} exceeds the inclusion-exclusion cap {INCLUSION_EXCLUSION_CAP}")
    sums = np.zeros(1)
    signs = np.ones(1)
    for p in coupon_probabilities(spectrum):
        sums = np.concatenate([sums, sums + p])
        signs = np.concatenate([signs, -signs])
    # subset J carries sign (-1)^{|J|+1}; signs holds (-1)^{|J|}
    return math.fsum((-signs[1:] / sums[1:]).tolist())


# --- rescaled survival curves ----------------------------------------------

def psi_value(spectrum: ClassSpectrum, pack, t: float) -> float:
    """Rescaled integrand at ``t``; tends to a step at ``t*`` as ``n`` grows.

    The rate of class i is ``t * (W_i / omega(n)) * sum_j g_j(n)``.
    """
    return float(psi_curve(spectrum, pack, [t])[0][1])


def psi_curve(spectrum: ClassSpectrum, pack, t_grid) -> list[tuple[float, float]]:
    t = np.asarray(list(t_grid), dtype=float)
    if np.any(np.diff(t) < 0):
        raise ValueError("t_grid must be sorted ascending")
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    n = spectrum.n
    log_scale = math.log(pack.g_sum(n)) - pack.log_omega(n)
    log_rates = spectrum.log_weights + log_scale
    out = np.ones_like(t)
    pos = t > 0
    if pos.any():
        a = np.exp(np.log(t[pos])[:, None] + log_rates[None, :])
        with np.errstate(over="ignore"):
            terms = np.exp(spectrum.log_multiplicities[None, :] + _log_neg_log1mexp(a))
        out[pos] = -np.expm1(-terms.sum(axis=1))
    out = np.clip(out, 0.0, 1.0)
    return list(zip(t.tolist(), out.tolist()))
