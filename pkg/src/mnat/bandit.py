"""Stochastic bandit algorithms for maximizing an unknown M-natural-concave function.

Observations are ``f*(x) + eps`` with fresh zero-mean 1-sub-Gaussian noise per
query.  :func:`greedy_bandit` runs the greedy procedure and picks every step
with MOSS as a pure-exploration routine; :func:`etc_run` wraps it into an
explore-then-commit learner for cumulative regret.

Random streams are derived from one integer seed via
``SeedSequence(seed, spawn_key=...)`` so every (trial, phase) pair has its
own reproducible generator.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import BudgetTooSmall, RangeViolation
from .greedy import feasible_directions
from .lattice import FeasibleRegion, Point, Valuation, is_finite, unit_step, zero
from .mchecker import brute_force_max

NOISE_CHUNK = 4096
RANGE_SAMPLE = 2000


# -- noise ----------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "gaussian"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform"):
            raise ValueError(f"unknown noise family {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "NoiseSpec":
        """``gaussian:<sigma>``, ``gaussian`` (sigma 1) or ``uniform``."""
        kind, _, arg = text.partition(":")
        if kind == "uniform":
            if arg:
                raise ValueError("uniform noise takes no parameter")
            return cls("uniform", 1.0)
        return cls(kind, float(arg) if arg else 1.0)

    def __str__(self):
        return "uniform" if self.kind == "uniform" else f"gaussian:{self.sigma:g}"


class NoiseStream:
    """Buffered i.i.d. noise draws from one generator."""

    def __init__(self, spec: NoiseSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self._buf = []
        self._pos = 0

    def _refill(self):
        if self.spec.kind == "uniform":
            self._buf = self.rng.uniform(-1.0, 1.0, NOISE_CHUNK).tolist()
        elif self.spec.sigma == 0:
            self._buf = [0.0] * NOISE_CHUNK
        else:
            self._buf = self.rng.normal(0.0, self.spec.sigma, NOISE_CHUNK).tolist()
        self._pos = 0

    def draw(self) -> float:
        if self._pos >= len(self._buf):
            self._refill()
        e = self._buf[self._pos]
        self._pos += 1
        return e


class NoisyOracle:
    """Noisy value oracle ``x -> f*(x) + eps`` with a query counter."""

    def __init__(self, f: Valuation, noise: NoiseSpec, rng: np.random.Generator):
        self.f = f
        self.noise = noise
        self.queries = 0
        self._stream = NoiseStream(noise, rng)
        self._values = {}

    def true_value(self, x: Point) -> float:
        v = self._values.get(x)
        if v is None:
            v = self.f.value(x)
            if not is_finite(v):
                raise ValueError(f"query outside dom f: {x}")
            self._values[x] = v
        return v

    def query(self, x: Point) -> float:
        v = self.true_value(tuple(x))
        self.queries += 1
        return v + self._stream.draw()


def _check_range(f: Valuation, rng: np.random.Generator):
    if f.box_volume() <= RANGE_SAMPLE:
        points = f.box_points()
    else:
        lo, hi = np.array(f.lo), np.array(f.hi)
        points = [tuple(int(c) for c in rng.integers(lo, hi + 1)) for _ in range(RANGE_SAMPLE)]
    for x in points:
        v = f.value(x)
        if is_finite(v) and not -1e-12 <= v <= 1 + 1e-12:
            raise RangeViolation(f"f{tuple(x)} = {v} lies outside [0, 1]; rescale the valuation first")


def make_noisy_oracle(f: Valuation, noise: NoiseSpec = NoiseSpec(), seed=None) -> NoisyOracle:
    """Wrap ``f`` (range must lie in ``[0, 1]``) with additive noise.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts; the same seed
    reproduces the same noise sequence.
    """
    rng = np.random.default_rng(seed)
    _check_range(f, rng)
    return NoisyOracle(f, noise, rng)


def gaussian_arms(means: Sequence[float], noise: NoiseSpec, seed=None) -> list:
    """Plain multi-armed bandit arms sharing one noise stream."""
    stream = NoiseStream(noise, np.random.default_rng(seed))
    return [(lambda m=m: m + stream.draw()) for m in means]


# -- MOSS ---------------------------------------------------------------------


@dataclass
class PullHistory:
    counts: list
    means: list
    t: int
    M: int
    pulls: list = field(repr=False, default_factory=list)


def moss_index(mean: float, count: int, horizon: int, M: int) -> float:
    bonus = 4.0 / count * math.log(max(1.0, horizon / (M * count)))
    return mean + math.sqrt(bonus)


def moss_run(arms: Sequence[Callable[[], float]], horizon: int) -> PullHistory:
    """Run MOSS for ``horizon`` rounds; each arm is a zero-argument reward sampler.

    Every arm is pulled once, after which the arm maximizing
    ``mean + sqrt(4 / n * log+(horizon / (M n)))`` is pulled (smallest index on
    ties).
    """
    M = len(arms)
    if M == 0:
        raise ValueError("no arms")
    if horizon < M:
        raise BudgetTooSmall(f"MOSS needs at least {M} rounds, got {horizon}")
    counts = [1] * M
    sums = [arm() for arm in arms]
    pulls = list(range(M))
    # An arm's index depends only on its own statistics, so only the pulled
    # arm needs refreshing each round.
    index = [moss_index(sums[a], 1, horizon, M) for a in range(M)]
    scale = horizon / M
    log, sqrt = math.log, math.sqrt
    for _ in range(M, horizon):
        a = index.index(max(index))
        r = arms[a]()
        c = counts[a] + 1
        counts[a] = c
        s = sums[a] + r
        sums[a] = s
        pulls.append(a)
        ratio = scale / c
        index[a] = s / c + (sqrt(4.0 / c * log(ratio)) if ratio > 1.0 else 0.0)
    return PullHistory(counts, [s / c for s, c in zip(sums, counts)], horizon, M, pulls)


def moss_recommend(history: PullHistory, rng: np.random.Generator) -> int:
    """Draw arm ``i`` with probability ``counts[i] / t``."""
    u = rng.random() * history.t
    acc = 0
    for i, c in enumerate(history.counts):
        acc += c
        if u < acc:
            return i
    return history.M - 1


# -- greedy bandit ------------------------------------------------------------


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _phase_rng(seed, k: int) -> np.random.Generator:
    ss = _as_seedseq(seed)
    child = np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (k,))
    return np.random.default_rng(child)


@dataclass
class Phase:
    """One greedy step chosen by MOSS."""

    anchor: Point
    directions: list
    history: PullHistory
    choice: int


def _explore(oracle: NoisyOracle, region: FeasibleRegion, K: int, T: int, seed):
    N = region.n
    if T < K * (N + 2):
        raise BudgetTooSmall(f"need T >= K(N+2) = {K * (N + 2)}, got T={T}")
    per_phase = T // K
    x = zero(N)
    phases = []
    for k in range(1, K + 1):
        dirs = feasible_directions(region, x)
        arms = [(lambda y=unit_step(x, i): oracle.query(y)) for i in dirs]
        history = moss_run(arms, per_phase)
        choice = dirs[moss_recommend(history, _phase_rng(seed, k))]
        phases.append(Phase(x, dirs, history, choice))
        x = unit_step(x, choice)
    return x, phases


def greedy_bandit(oracle: NoisyOracle, region: FeasibleRegion, K: int, T: int, seed=None) -> Point:
    """Greedy over ``K`` phases, each step picked by MOSS on ``floor(T/K)`` noisy queries."""
    x, _ = _explore(oracle, region, K, T, seed)
    return x


# -- explore then commit -------------------------------------------------------


def exploration_budget(T: int, K: int, N: int) -> int:
    """``min(T, max(K(N+2), ceil(K N^(1/3) T^(2/3))))``."""
    return min(T, max(K * (N + 2), math.ceil(K * N ** (1 / 3) * T ** (2 / 3))))


@dataclass
class RegretRecord:
    """Per-round actions of one run, stored as an exploration prefix plus a commit tail."""

    explore_points: list
    explore_values: list
    commit_point: Point
    commit_value: float
    commit_rounds: int
    optimum: float
    seed: object = None
    expected_commit_value: Optional[float] = None

    @property
    def expected_cumulative_regret(self) -> float:
        """Cumulative regret with the commit value averaged over the last recommendation draw."""
        v = self.commit_value if self.expected_commit_value is None else self.expected_commit_value
        explore = self.optimum * len(self.explore_values) - math.fsum(self.explore_values)
        return explore + self.commit_rounds * (self.optimum - v)

    @property
    def rounds(self) -> int:
        return len(self.explore_points) + self.commit_rounds

    @property
    def cumulative_regret(self) -> float:
        explore = self.optimum * len(self.explore_values) - math.fsum(self.explore_values)
        return explore + self.commit_rounds * (self.optimum - self.commit_value)

    def trace(self) -> Iterator[tuple]:
        """``(round, point, true_value, regret_so_far)`` for every round."""
        reg = 0.0
        t = 0
        for x, v in zip(self.explore_points, self.explore_values):
            t += 1
            reg += self.optimum - v
            yield t, x, v, reg
        gap = self.optimum - self.commit_value
        for _ in range(self.commit_rounds):
            t += 1
            reg += gap
            yield t, self.commit_point, self.commit_value, reg


def _phase_points(oracle, phases):
    points, values = [], []
    for ph in phases:
        arm_points = [unit_step(ph.anchor, i) for i in ph.directions]
        arm_values = [oracle.true_value(y) for y in arm_points]
        points.extend(arm_points[a] for a in ph.history.pulls)
        values.extend(arm_values[a] for a in ph.history.pulls)
    return points, values


def etc_run(oracle: NoisyOracle, region: FeasibleRegion, K: int, T: int, seed=None,
            optimum: float | None = None) -> RegretRecord:
    """Explore with :func:`greedy_bandit` for ``T~`` rounds, then commit to its output."""
    N = region.n
    if T < K * (N + 2):
        raise BudgetTooSmall(f"need T >= K(N+2) = {K * (N + 2)}, got T={T}")
    budget = exploration_budget(T, K, N)
    x, phases = _explore(oracle, region, K, budget, seed)
    points, values = _phase_points(oracle, phases)
    if optimum is None:
        optimum = brute_force_max(region.valuation, region)[1]
    return RegretRecord(points, values, x, oracle.true_value(x), T - len(points), optimum, seed,
                        _expected_last_value(oracle, phases[-1]))


# -- Monte Carlo ---------------------------------------------------------------


def conditional_simple_regret(oracle: NoisyOracle, phases: Sequence[Phase], optimum: float) -> float:
    """Simple regret averaged over the last phase's recommendation draw.

    The final step is drawn with probability ``counts / t``, so its expected
    value given the exploration history is available in closed form.  This is
    an unbiased, lower-variance stand-in for ``optimum - f*(x_K)``.
    """
    return optimum - _expected_last_value(oracle, phases[-1])


def _expected_last_value(oracle: NoisyOracle, last: Phase) -> float:
    h = last.history
    total = sum(c * oracle.true_value(unit_step(last.anchor, d)) for c, d in zip(h.counts, last.directions))
    return total / h.t


@dataclass(frozen=True)
class BanditConfig:
    valuation: Valuation
    budget: int
    rounds: int
    noise: NoiseSpec = NoiseSpec()
    mode: str = "simple"
    estimator: str = "conditional"

    def __post_init__(self):
        if self.mode not in ("simple", "cumulative"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.estimator not in ("conditional", "realized"):
            raise ValueError(f"unknown estimator {self.estimator!r}")


@dataclass
class TrialResult:
    trial: int
    regret: float
    realized: float
    rows: list


@dataclass
class RegretSummary:
    """Monte Carlo summary; ``mean``/``stderr`` refer to the configured estimator."""

    mean: float
    stderr: float
    regrets: list
    trials: int
    optimum: float
    realized_mean: float

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "trials": self.trials,
                "optimum": self.optimum, "realized_mean": self.realized_mean,
                "regrets": self.regrets}


def _trial_seeds(seed: int, trial: int):
    noise = np.random.SeedSequence(seed, spawn_key=(trial, 0))
    algo = np.random.SeedSequence(seed, spawn_key=(trial, 1))
    return noise, algo


def run_trial(config: BanditConfig, trial: int, seed: int, optimum: float, keep_rows: bool = False):
    """One seeded trial; returns its regret (simple or cumulative) and optional trace rows."""
    f = config.valuation
    region = FeasibleRegion(f, config.budget)
    noise_seed, algo_seed = _trial_seeds(seed, trial)
    oracle = NoisyOracle(f, config.noise, np.random.default_rng(noise_seed))
    rows = []
    if config.mode == "simple":
        x, phases = _explore(oracle, region, config.budget, config.rounds, algo_seed)
        realized = optimum - oracle.true_value(x)
        regret = realized if config.estimator == "realized" else conditional_simple_regret(oracle, phases, optimum)
        if keep_rows:
            points, values = _phase_points(oracle, phases)
            reg = 0.0
            for t, (p, v) in enumerate(zip(points, values), 1):
                reg += optimum - v
                rows.append((trial, t, p, v, reg))
            rows.append((trial, config.rounds + 1, x, oracle.true_value(x), realized))
    else:
        record = etc_run(oracle, region, config.budget, config.rounds, algo_seed, optimum)
        realized = record.cumulative_regret
        regret = realized if config.estimator == "realized" else record.expected_cumulative_regret
        if keep_rows:
            rows = [(trial, t, p, v, r) for t, p, v, r in record.trace()]
    return TrialResult(trial, regret, realized, rows)


def _run_trial_star(args):
    return run_trial(*args)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MNAT_THREADS", "1")))
    except ValueError:
        return 1


def estimate_regret(config: BanditConfig, trials: int, seed: int,
                    on_trial: Optional[Callable[[TrialResult], None]] = None) -> RegretSummary:
    """Mean and standard error of the regret over independent seeded trials.

    ``on_trial`` receives every :class:`TrialResult` (with trace rows) in trial
    order, which is how the CLI streams CSV output.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    region = FeasibleRegion(config.valuation, config.budget)
    optimum = brute_force_max(config.valuation, region)[1]
    keep = on_trial is not None
    jobs = [(config, t, seed, optimum, keep) for t in range(trials)]
    workers = min(worker_count(), trials)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_trial_star, jobs))
    else:
        results = map(_run_trial_star, jobs)
    regrets, realized = [], []
    for res in results:
        regrets.append(res.regret)
        realized.append(res.realized)
        if on_trial is not None:
            on_trial(res)
    arr = np.asarray(regrets, dtype=float)
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return RegretSummary(float(arr.mean()), stderr, regrets, trials, float(optimum),
                         float(np.mean(realized)))
