"""Asymptotic waiting-time estimator ``t* . G(n) . mu(n) / omega(n)``.

A :class:`ParameterPack` encodes how multiplicities and weights of the
i-th weight class grow: ``M_{n,i} ~ exp(sum_j f_j(i) g_j(n)) / h(i)`` and
``W_{n,i} = nu(i) omega(n)``.  The constant ``t*`` is the largest ratio
``F(i) / nu(i)``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .languages import Kind, LanguageModel, word_count
from .spectrum import LOG_COLLISION_TOL, ClassSpectrum

IndexFn = Callable[[int], float]
LengthFn = Callable[[int], float]


class UnsupportedConfigurationError(ValueError):
    pass


class TStarConvergenceError(RuntimeError):
    pass


class NoRootError(ValueError):
    pass


# --- t* --------------------------------------------------------------------

def _as_fn(seq) -> IndexFn:
    if callable(seq):
        return seq
    values = list(seq)
    return lambda i: values[i - 1]


def t_star(
    F: IndexFn | Sequence[float],
    nu: IndexFn | Sequence[float],
    probe_limit: int = 10_000,
    patience: int = 50,
) -> tuple[float, int]:
    """Maximum of ``F(i) / nu(i)`` over ``1 <= i <= probe_limit`` and its argmax.

    Indices are 1-based.  The scan stops early once the ratio has stayed
    below a tenth of the running maximum for ``patience`` consecutive
    indices.  Ratios equal to the maximum within 1e-12 relative keep the
    smaller index.  Raises :class:`TStarConvergenceError` when the maximum
    sits on ``probe_limit`` itself, i.e. the ratio is still rising.
    """
    if probe_limit < 1:
        raise ValueError("probe_limit must be >= 1")
    # finite sequences define the whole index set
    finite = [len(s) for s in (F, nu) if not callable(s)]
    if finite:
        probe_limit = min([probe_limit, *finite])
    F, nu = _as_fn(F), _as_fn(nu)
    best, arg = -math.inf, 0
    low_run = 0
    for i in range(1, probe_limit + 1):
        den = nu(i)
        if not den > 0:
            raise ValueError(f"nu({i}) = {den} is not positive")
        r = F(i) / den
        threshold = best * (1 + 1e-12) if best > 0 else best
        if r > threshold:
            best, arg = r, i
        if best > 0 and r < best / 10:
            low_run += 1
            if low_run >= patience:
                return best, arg
        else:
            low_run = 0
    if arg == probe_limit and probe_limit > 1 and not finite:
        raise TStarConvergenceError(
            f"F/nu still rising at probe limit {probe_limit}; nu may not outgrow F"
        )
    return best, arg


# --- parameter packs -------------------------------------------------------

def _zero(_: int) -> float:
    return 0.0


@dataclass(frozen=True)
class ParameterPack:
    """Growth data of one language under one weight configuration.

    ``F``/``nu``/``log_h``/``log_H`` are indexed by weight rank ``i >= 1``;
    ``G``/``log_omega`` by word length ``n``.  ``index_limit`` is set when
    the rank set is finite in the limit (uniform distributions).
    """

    F: IndexFn
    G: LengthFn
    nu: IndexFn
    log_omega: LengthFn
    description: str
    secondary_f: Optional[IndexFn] = None
    secondary_g: Optional[LengthFn] = None
    log_h: IndexFn = _zero
    log_H: IndexFn = _zero
    index_limit: Optional[int] = None
    regime: str = field(default="")

    def omega(self, n: int) -> float:
        return math.exp(self.log_omega(n))

    def g_sum(self, n: int) -> float:
        g = self.G(n)
        if self.secondary_g is not None:
            g += self.secondary_g(n)
        return g

    def f_values(self, i: int) -> list[float]:
        out = [self.F(i)]
        if self.secondary_f is not None:
            out.append(self.secondary_f(i))
        return out

    def t_star(self, probe_limit: int = 10_000) -> tuple[float, int]:
        limit = self.index_limit if self.index_limit is not None else probe_limit
        return t_star(self.F, self.nu, limit)


def uniform_pack(count: Callable[[int], int], description: str = "uniform distribution") -> ParameterPack:
    """One class of ``m = count(n)`` equal coupons: ``F = nu = 1``, ``G = ln m``."""
    return ParameterPack(
        F=lambda i: 1.0,
        G=lambda n: math.log(count(n)),
        nu=lambda i: 1.0,
        log_omega=_zero,
        description=description,
        index_limit=1,
        regime="uniform",
    )


class SortedSubCompositions:
    """Sub-compositions over the non-unit letters, lazily in increasing weight.

    Equal weights (within the collision tolerance) share one rank, keeping
    the sub-composition of smallest size.
    """

    def __init__(self, weights: Sequence[float]):
        self.weights = tuple(float(w) for w in weights)
        self._logs = tuple(math.log(w) for w in self.weights)
        zero = (0,) * len(self.weights)
        self._heap = [(0.0, 0, zero)]
        self._seen = {zero}
        self._ranks: list[tuple[tuple[int, ...], float]] = []
        self._pending: Optional[tuple[tuple[int, ...], float]] = None

    def _log_weight(self, x) -> float:
        return math.fsum(c * lw for c, lw in zip(x, self._logs))

    def _pop(self):
        lw, _, x = heapq.heappop(self._heap)
        for j in range(len(x)):
            y = x[:j] + (x[j] + 1,) + x[j + 1:]
            if y not in self._seen:
                self._seen.add(y)
                heapq.heappush(self._heap, (self._log_weight(y), sum(y), y))
        return x, lw

    def __getitem__(self, i: int) -> tuple[int, ...]:
        """Sub-composition of rank ``i`` (1-based)."""
        while len(self._ranks) < i:
            x, lw = self._pending if self._pending is not None else self._pop()
            self._pending = None
            while self._heap:
                y, lw_y = self._pop()
                if lw_y - lw < LOG_COLLISION_TOL:
                    if sum(y) < sum(x):
                        x = y
                else:
                    self._pending = (y, lw_y)
                    break
            self._ranks.append((x, lw))
        return self._ranks[i - 1][0]

    def size(self, i: int) -> int:
        return sum(self[i])

    def weight(self, i: int) -> float:
        return float(math.prod(w**c for w, c in zip(self.weights, self[i])))


def _lgamma1(x: float) -> float:
    return math.lgamma(x + 1.0)


def _sigma_star_pack(model: LanguageModel) -> ParameterPack:
    asg = model.assignment
    l = len(asg.unit_letters)
    free = [asg.weight(a) for a in asg.non_unit_letters]
    order = SortedSubCompositions(free)
    z = math.log(min(free)) / math.log(max(free))
    size = order.size
    if l == 1:
        return ParameterPack(
            F=lambda i: float(size(i)),
            G=lambda n: math.log(n),
            nu=order.weight,
            log_omega=_zero,
            description="Sigma*, single letter of smallest weight",
            log_h=lambda i: _lgamma1(size(i)),
            log_H=lambda i: _lgamma1(z * size(i)),
            regime="l=1",
        )
    log_l = math.log(l)
    return ParameterPack(
        F=lambda i: log_l,
        G=lambda n: float(n),
        nu=order.weight,
        log_omega=_zero,
        description=f"Sigma*, {l} letters of smallest weight",
        secondary_f=lambda i: float(size(i)),
        secondary_g=lambda n: math.log(n),
        log_h=lambda i: size(i) * log_l + _lgamma1(size(i)),
        log_H=lambda i: z * size(i) * log_l + _lgamma1(z * size(i)),
        regime="l>1",
    )


def _pair_ratio(model: LanguageModel) -> tuple[float, float, float]:
    """``(ln q, ln pi_b^2, ln pi_b)`` with ``q = pi_a pi_abar``."""
    log_q = math.log(model.weight("a")) + math.log(model.weight("abar"))
    log_b = math.log(model.weight("b"))
    return log_q, 2 * log_b, log_b


def _motzkin_pack(model: LanguageModel) -> ParameterPack:
    log_q, log_beta, log_b = _pair_ratio(model)
    if abs(log_q - log_beta) < LOG_COLLISION_TOL:
        raise UnsupportedConfigurationError(
            "Motzkin with pi_b^2 == pi_a*pi_abar lies on the regime boundary; no result there"
        )
    if log_q > log_beta:
        r = math.exp(log_q - log_beta)
        return ParameterPack(
            F=lambda i: 2.0 * i - 2.0,
            G=lambda n: math.log(n),
            nu=lambda i: r ** (i - 1),
            log_omega=lambda n: n * log_b,
            description="Motzkin, pi_b^2 < pi_a*pi_abar (bracket pairs are heavy)",
            log_h=lambda i: math.log(i) + 2 * math.lgamma(i),
            log_H=lambda i: math.log(i) + 2 * math.lgamma(i),
            regime="pairs-heavy",
        )
    r = math.exp(log_beta - log_q)
    return ParameterPack(
        F=lambda i: math.log(2.0),
        G=lambda n: float(n),
        nu=lambda i: r ** (i - 1),
        log_omega=lambda n: (n // 2) * log_q + (n % 2) * log_b,
        description="Motzkin, pi_b^2 > pi_a*pi_abar (dots are heavy)",
        secondary_f=lambda i: 2.0 * (i - 1) - 1.5,
        secondary_g=lambda n: math.log(n),
        log_h=lambda i: 0.5 * math.log(math.pi) + (2 * (i - 1) - 1.5) * math.log(2) + _lgamma1(2 * (i - 1)),
        log_H=lambda i: 0.5 * math.log(math.pi) + (2 * (i - 1) - 1.5) * math.log(2) + _lgamma1(2 * (i - 1)),
        regime="dots-heavy",
    )


def _rna_pack(model: LanguageModel) -> ParameterPack:
    log_q, log_beta, log_b = _pair_ratio(model)
    if log_q - log_beta < LOG_COLLISION_TOL:
        raise UnsupportedConfigurationError(
            "RNA structures are only analyzed when pi_a*pi_abar > pi_b^2"
        )
    r = math.exp(log_q - log_beta)
    return ParameterPack(
        F=lambda i: 2.0 * (i - 1),
        G=lambda n: math.log(n),
        nu=lambda i: r ** (i - 1),
        log_omega=lambda n: n * log_b,
        description=f"RNA secondary structures, theta={model.theta}",
        log_h=lambda i: math.log(i) + 2 * math.lgamma(i),
        log_H=lambda i: math.log(i / 2) + 2 * math.lgamma(i),
        regime="pairs-heavy",
    )


def _nc_pack(model: LanguageModel) -> ParameterPack:
    pa, pabar, pb = model.weight("a"), model.weight("abar"), model.weight("b")
    log_r = math.log(pabar) - math.log(pa)
    if log_r > 0:
        r = math.exp(log_r)
        half_log = math.log(pa) + math.log(pb)
        return ParameterPack(
            F=lambda i: math.log(2.0),
            G=lambda n: float(n),
            nu=lambda i: r**i,
            log_omega=lambda n: (n / 2) * half_log,
            description="L(nc), pi_a < pi_abar",
            secondary_f=lambda i: -1.5,
            secondary_g=lambda n: math.log(n),
            log_h=lambda i: i * math.log(2) - math.log(i) + 0.5 * math.log(math.pi / 2),
            log_H=lambda i: (i - 1) * math.log(2) - math.log(i) + 0.5 * math.log(math.pi / 2),
            regime="abar-heavy",
        )
    # pi_abar < pi_a: rarest words have the most abar; M_{n,i} ~ (n/2)^{i-1}/(i-1)!
    r = math.exp(-log_r)
    half_log = math.log(pabar) + math.log(pb)
    return ParameterPack(
        F=lambda i: float(i - 1),
        G=lambda n: math.log(n),
        nu=lambda i: r ** (i - 1),
        log_omega=lambda n: (n / 2) * half_log,
        description="L(nc), pi_abar < pi_a",
        secondary_f=lambda i: -float(i - 1),
        secondary_g=lambda n: math.log(2.0),
        log_h=lambda i: math.lgamma(i),
        log_H=lambda i: math.lgamma(i),
        regime="a-heavy",
    )


def parameter_pack(model: LanguageModel, n: Optional[int] = None) -> ParameterPack:
    """Pack for the model's weight configuration.

    ``n`` is accepted for symmetry with the spectrum builders; packs are
    functions of the length and do not depend on it.
    """
    if model.assignment.is_uniform or (
        model.kind is Kind.NON_CONNECTED and model.weight("a") == model.weight("abar")
    ):
        return uniform_pack(lambda n: word_count(model, n), f"{model.kind.value}, all words equiprobable")
    if model.kind is Kind.SIGMA_STAR:
        return _sigma_star_pack(model)
    if model.kind is Kind.MOTZKIN:
        return _motzkin_pack(model)
    if model.kind is Kind.RNA:
        return _rna_pack(model)
    return _nc_pack(model)


# --- estimator -------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticEstimate:
    t_star: float
    arg_i: int
    log_scale: float
    estimate_log: float

    @property
    def scale(self) -> float:
        return math.exp(self.log_scale)

    @property
    def estimate(self) -> float:
        try:
            return math.exp(self.estimate_log)
        except OverflowError:
            return math.inf


def log_scale(pack: ParameterPack, spectrum: ClassSpectrum) -> float:
    """``ln(G(n) mu(n) / omega(n))``."""
    n = spectrum.n
    return math.log(pack.G(n)) + spectrum.log_mu - pack.log_omega(n)


def asymptotic_waiting_time(
    pack: ParameterPack, spectrum: ClassSpectrum, probe_limit: int = 10_000
) -> AsymptoticEstimate:
    ts, arg = pack.t_star(probe_limit)
    ls = log_scale(pack, spectrum)
    return AsymptoticEstimate(ts, arg, ls, math.log(ts) + ls)


# --- hypothesis diagnostics -------------------------------------------------

def h3_ratios(pack: ParameterPack, probe: int = 200) -> list[float]:
    """``nu(i) / max_j f_j(i)`` for ``i = 1..probe`` (inf where f <= 0)."""
    out = []
    for i in range(1, probe + 1):
        top = max(pack.f_values(i))
        try:
            out.append(pack.nu(i) / top if top > 0 else math.inf)
        except OverflowError:
            out.append(math.inf)
    return out


def h1_partial_sums(pack: ParameterPack, probe: int = 200) -> list[float]:
    """Partial sums of ``1 / H(i)``."""
    sums, acc = [], 0.0
    for i in range(1, probe + 1):
        acc += math.exp(-pack.log_H(i))
        sums.append(acc)
    return sums


# --- polynomial roots ------------------------------------------------------

Poly = Sequence[tuple[int, float]]


def _poly_eval(coefficients: Poly, z: float) -> float:
    return math.fsum(c * z**p for p, c in coefficients)


def smallest_positive_root(
    coefficients: Poly, step: float = 1e-3, xtol: float = 1e-13, residual_tol: float = 1e-9
) -> float:
    """Smallest root in (0, 1) of a sparse polynomial ``[(power, coef), ...]``.

    Scans for the first sign change on a grid of width ``step`` and bisects
    it down to ``xtol``.  Double roots without a sign change are not found.
    """
    scale = max(abs(c) for _, c in coefficients)
    if scale == 0:
        raise NoRootError("zero polynomial")
    coefficients = [(p, c / scale) for p, c in coefficients]
    steps = int(round(1.0 / step))
    prev_z, prev_v = 0.0, _poly_eval(coefficients, 0.0)
    for j in range(1, steps + 1):
        z = j * step
        v = _poly_eval(coefficients, z)
        if v == 0.0:
            return z
        if (prev_v < 0) != (v < 0) and prev_v != 0.0:
            lo, hi, flo = prev_z, z, prev_v
            while hi - lo > xtol:
                mid = 0.5 * (lo + hi)
                fm = _poly_eval(coefficients, mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
            if abs(_poly_eval(coefficients, root)) >= residual_tol:
                raise NoRootError(f"residual too large at {root}")
            return root
        prev_z, prev_v = z, v
    raise NoRootError("no sign change on (0, 1)")


def rho_polynomial(theta: int, q: float) -> list[tuple[int, float]]:
    """Discriminant whose smallest root is the radius of the weighted RNA series.

    ``q`` is the pair weight relative to the dot weight.  From
    ``S = 1 + zS + q z^2 T S`` with ``T = S - (1 - z^theta) / (1 - z)``, the
    discriminant of the quadratic in ``S`` times ``(1 - z)^2``.
    """
    return [
        (0, 1.0),
        (1, -4.0),
        (2, 6.0 - 2.0 * q),
        (3, 4.0 * (q - 1.0)),
        (4, (1.0 - q) ** 2),
        (theta + 2, -2.0 * q),
        (theta + 3, 4.0 * q),
        (theta + 4, -2.0 * q * (1.0 + q)),
        (2 * theta + 4, q * q),
    ]


def eta_polynomial(theta: int) -> list[tuple[int, float]]:
    """Unweighted case ``q = 1`` of :func:`rho_polynomial`, term by term."""
    return [
        (0, 1.0),
        (1, -4.0),
        (2, 4.0),
        (3, 0.0),
        (4, 0.0),
        (theta + 2, -2.0),
        (theta + 3, 4.0),
        (theta + 4, -4.0),
        (2 * theta + 4, 1.0),
    ]


@lru_cache(maxsize=None)
def rho_theta(theta: int, q: float) -> float:
    return smallest_positive_root(rho_polynomial(theta, q))


@lru_cache(maxsize=None)
def eta_theta(theta: int) -> float:
    return smallest_positive_root(eta_polynomial(theta))


# --- m-scale exponents -------------------------------------------------------

@dataclass(frozen=True)
class Exponents:
    """``E ~ kappa m^p (log m)^q (log log m)^r``."""

    p: float
    q: float
    r: int


def m_scale_exponents(model: LanguageModel) -> Exponents:
    """Published growth exponents in terms of the word count ``m``.

    Uses the normalized weights (smallest letter weight 1).
    """
    asg = model.assignment
    if model.kind is Kind.SIGMA_STAR:
        p = math.log(sum(asg.weights)) / math.log(len(asg.weights))
        if len(asg.unit_letters) == 1:
            return Exponents(p, 0.0, 1)
        return Exponents(p, 1.0, 0)

    pa, pabar, pb = model.weight("a"), model.weight("abar"), model.weight("b")
    log_q, log_beta, _ = _pair_ratio(model)
    if model.kind is Kind.MOTZKIN:
        growth = math.log(pb + 2.0 * math.sqrt(pa * pabar))
        if abs(log_q - log_beta) < LOG_COLLISION_TOL:
            raise UnsupportedConfigurationError("Motzkin regime boundary pi_b^2 == pi_a*pi_abar")
        if log_beta > log_q:
            p = (growth - 0.5 * math.log(pa)) / math.log(3.0)
            return Exponents(p, (3.0 * p - 1.0) / 2.0, 0)
        p = (growth - math.log(pb)) / math.log(3.0)
        return Exponents(p, 3.0 * (p - 1.0) / 2.0, 1)

    if model.kind is Kind.RNA:
        if log_q - log_beta < -LOG_COLLISION_TOL:
            raise UnsupportedConfigurationError("RNA exponents need pi_a*pi_abar >= pi_b^2")
        q_eff = math.exp(log_q - log_beta)
        rho = rho_theta(model.theta, q_eff) / pb
        # mu(n) ~ rho^-n and m(n) ~ eta^-n, so rho^-n = m^p
        p = math.log(rho) / math.log(eta_theta(model.theta))
        return Exponents(p, 1.5 * p, 1)

    if pa == 1.0 or (pb == 1.0 and pa < pabar):
        return Exponents(2.0, 2.5, 0)
    qq = math.log2(pa / pabar)
    return Exponents(2.0 + qq, 2.0 + qq / 2.0, 1)
