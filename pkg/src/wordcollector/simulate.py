"""Monte Carlo collection of weighted words.

Words inside one weight class are equiprobable, so drawing a word is the
same as drawing a class (alias method over ``M_i W_i / mu``) and then a
uniform index inside that class.  A trial ends once every
``(class, index)`` pair has been seen.

Trial ``j`` of seed ``s`` draws from ``PCG64(SeedSequence(s, spawn_key=(j,)))``,
so results do not depend on trial order or parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import ClassSpectrum

#: Classes up to this many words get a dense boolean seen-array.
DENSE_CLASS_LIMIT = 2**26

#: Largest collection the simulator accepts.
MAX_COUPONS = 2**62


class SimulationError(RuntimeError):
    pass


class PrecisionError(SimulationError):
    pass


class TrialTimeoutError(SimulationError):
    def __init__(self, message: str, coverage: float, draws: int):
        super().__init__(message)
        self.coverage = coverage
        self.draws = draws


class IncompleteSimulationError(SimulationError):
    def __init__(self, message: str, completed: list[int], failed_trial: int):
        super().__init__(message)
        self.completed = completed
        self.failed_trial = failed_trial


@dataclass(frozen=True)
class SimulationConfig:
    trials: int = 1000
    seed: int = 0
    max_draws_per_trial: int = 10**10
    batch_size: int = 4096

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimulationResult:
    per_trial_draws: tuple[int, ...]
    mean: float
    std_error: float
    seed: int
    degenerate: bool = False

    @property
    def trials(self) -> int:
        return len(self.per_trial_draws)


class ClassSampler:
    """Walker/Vose alias table over weight classes."""

    def __init__(self, probabilities: np.ndarray):
        p = np.asarray(probabilities, dtype=float)
        k = len(p)
        self.probabilities = p
        scaled = p * k
        prob = np.zeros(k)
        alias = np.arange(k)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        while small and large:
            s, g = small.pop(), large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        for i in small + large:
            prob[i] = 1.0
            alias[i] = i
        self.prob = prob
        self.alias = alias

    def __len__(self) -> int:
        return len(self.prob)

    def implied_probabilities(self) -> np.ndarray:
        """Class probabilities reconstructed from the table."""
        k = len(self.prob)
        out = self.prob / k
        np.add.at(out, self.alias, (1.0 - self.prob) / k)
        return out

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        col = rng.integers(0, len(self.prob), size=size)
        keep = rng.random(size) < self.prob[col]
        return np.where(keep, col, self.alias[col])


def build_sampler(spectrum: ClassSpectrum) -> ClassSampler:
    """Alias sampler over class probabilities ``q_i = M_i W_i / mu``."""
    log_q = spectrum.log_multiplicities + spectrum.log_weights - spectrum.log_mu
    q = np.exp(log_q)
    if np.any(q == 0.0):
        raise PrecisionError("a class probability underflows to 0; n is too large for float sampling")
    total = q.sum()
    if abs(total - 1.0) > 1e-10:
        raise PrecisionError(f"class probabilities sum to {total}")
    return ClassSampler(q / total)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


class _SeenSets:
    """Seen coupons: one flat bool array over dense classes, sets for the rest."""

    def __init__(self, multiplicities: list[int]):
        dense = [m <= DENSE_CLASS_LIMIT for m in multiplicities]
        offsets = np.zeros(len(multiplicities), dtype=np.int64)
        total = 0
        for i, (m, d) in enumerate(zip(multiplicities, dense)):
            if d:
                offsets[i] = total
                total += m
        self.dense = np.array(dense)
        self.offsets = offsets
        self.seen = np.zeros(total, dtype=bool)
        # first batch position of each coupon, scratch space rewritten per batch
        self.first = np.zeros(total, dtype=np.int32)
        self.sparse = {i: set() for i, d in enumerate(dense) if not d}
        self.covered = 0

    def absorb(self, classes: np.ndarray, indices: np.ndarray) -> int:
        """Record one batch; return the batch position of its last new coupon, or -1."""
        positions = np.arange(len(classes), dtype=np.int32)
        if not self.sparse:
            return self._absorb_dense(classes, indices, positions)
        in_dense = self.dense[classes]
        last = self._absorb_dense(classes[in_dense], indices[in_dense], positions[in_dense])
        for cls in np.unique(classes[~in_dense]).tolist():
            mask = classes == cls
            last = max(last, self._absorb_sparse(self.sparse[cls], indices[mask], positions[mask]))
        return last

    def _absorb_dense(self, classes, indices, positions) -> int:
        if len(classes) == 0:
            return -1
        flat = self.offsets[classes] + indices
        fresh = ~self.seen[flat]
        if not fresh.any():
            return -1
        ids, pos = flat[fresh], positions[fresh]
        # reversed scatter: the earliest position of each id is written last
        self.first[ids[::-1]] = pos[::-1]
        firsts = pos[self.first[ids] == pos]
        self.seen[ids] = True
        self.covered += len(firsts)
        return int(firsts.max())

    def _absorb_sparse(self, seen: set, indices, positions) -> int:
        uniq, first = np.unique(indices, return_index=True)
        fresh = np.array([u not in seen for u in uniq.tolist()], dtype=bool)
        if not fresh.any():
            return -1
        seen.update(uniq[fresh].tolist())
        self.covered += int(fresh.sum())
        return int(positions[first[fresh]].max())


def simulate_once(
    sampler: ClassSampler,
    spectrum: ClassSpectrum,
    rng: np.random.Generator,
    max_draws: int = 10**10,
    batch_size: int = 4096,
) -> int:
    """Number of draws until all ``m`` words have been seen."""
    m = spectrum.m
    if m > MAX_COUPONS:
        raise SimulationError(f"m={m} exceeds the simulator limit 2^62")
    mults = spectrum.multiplicities
    highs = np.array(mults, dtype=np.int64)
    seen = _SeenSets(mults)
    drawn = 0
    # start near m ln m so small collections do not pay for a full batch
    batch = max(1, min(batch_size, 16 + int(m * math.log(m + 1))))
    while True:
        size = min(batch, max_draws - drawn)
        if size <= 0:
            raise TrialTimeoutError(
                f"no full collection after {drawn} draws", seen.covered / m, drawn
            )
        classes = sampler.draw(rng, size)
        indices = rng.integers(0, highs[classes])
        last_new = seen.absorb(classes, indices)
        if seen.covered == m:
            return drawn + last_new + 1
        drawn += size
        batch = min(batch * 2, 2**20)


def run_trials(spectrum: ClassSpectrum, config: SimulationConfig = SimulationConfig()) -> SimulationResult:
    sampler = build_sampler(spectrum)
    draws: list[int] = []
    for j in range(config.trials):
        try:
            draws.append(
                simulate_once(
                    sampler, spectrum, trial_rng(config.seed, j), config.max_draws_per_trial, config.batch_size
                )
            )
        except TrialTimeoutError as exc:
            raise IncompleteSimulationError(
                f"trial {j} timed out at coverage {exc.coverage:.6f}", draws, j
            ) from exc
    return summarize(draws, config.seed)


def summarize(draws: list[int], seed: int) -> SimulationResult:
    arr = np.asarray(draws, dtype=float)
    mean = float(arr.mean())
    if len(draws) < 2:
        return SimulationResult(tuple(draws), mean, 0.0, seed, degenerate=True)
    std_error = float(arr.std(ddof=1) / math.sqrt(len(draws)))
    return SimulationResult(tuple(int(d) for d in draws), mean, std_error, seed)
