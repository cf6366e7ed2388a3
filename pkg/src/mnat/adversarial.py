"""Online learning against a random sequence of three matroid-distance functions.

Each round ``f^t`` is drawn uniformly from ``{f_1, f_2, f_3}`` where
``f_i(x) = 1 - tau_i(x) / N`` for matroid ``M_i``.  Actions are all of
``{0,1}^N`` (budget ``K = N``).  A point scores 1 under every ``f_i`` exactly
when it is a common base, so a learner with small regret must eventually
play one, and :func:`distinguisher` turns such a learner into a decision
procedure for three-matroid intersection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import GroundSetTooLarge
from .greedy import greedy_exact
from .lattice import Point, Valuation, zero
from .matroids import Matroid
from .valuations import MatroidDistance, matroid_distance

MAX_EXPERT_N = 16


def all_points(n: int) -> list:
    """``{0,1}^n`` in lexicographic order."""
    if n > MAX_EXPERT_N:
        raise GroundSetTooLarge(f"2^{n} experts exceed the limit of 2^{MAX_EXPERT_N}")
    return list(itertools.product((0, 1), repeat=n))


def _point_masks(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.int64)
    weights = 1 << np.arange(arr.shape[1], dtype=np.int64)
    return arr @ weights


def tau_table(matroid: Matroid, points) -> np.ndarray:
    """Exact integer distances ``tau(x)`` for every point (vectorized over bases)."""
    masks = _point_masks(points)
    best = np.full(len(masks), matroid.n + 1, dtype=np.int64)
    for b in matroid.base_masks:
        np.minimum(best, np.bitwise_count(masks ^ b).astype(np.int64), out=best)
    return best


def value_table(f: Valuation, points) -> np.ndarray:
    if isinstance(f, MatroidDistance):
        return 1.0 - tau_table(f.matroid, points) / f.matroid.n
    return np.array([float(f.value(x)) for x in points])


# -- sequences ------------------------------------------------------------------


@dataclass
class AdversarialSequence:
    matroids: tuple
    valuations: tuple
    choices: np.ndarray  # values in {1, 2, 3}
    seed: object = None

    @property
    def n(self) -> int:
        return self.matroids[0].n

    @property
    def T(self) -> int:
        return len(self.choices)

    def __getitem__(self, t) -> Valuation:
        """``f^t`` for 1-based round ``t``."""
        return self.valuations[self.choices[t - 1] - 1]


def sample_sequence(m1: Matroid, m2: Matroid, m3: Matroid, T: int, seed=None) -> AdversarialSequence:
    """Draw ``T`` i.i.d. uniform choices among the three matroid-distance functions."""
    if not m1.n == m2.n == m3.n:
        raise ValueError("matroids must share a ground set")
    rng = np.random.default_rng(seed)
    choices = rng.integers(1, 4, size=T)
    vals = tuple(matroid_distance(m) for m in (m1, m2, m3))
    return AdversarialSequence((m1, m2, m3), vals, choices, seed)


# -- learners -----------------------------------------------------------------


class Learner:
    """Full-information online learner.

    Each round the driver calls :meth:`act` and only then reveals ``f^t``
    through :meth:`observe`.
    """

    name = "learner"

    def reset(self, n: int, rng: np.random.Generator) -> None:
        self.n = n
        self.rng = rng

    def act(self, t: int) -> Point:
        raise NotImplementedError

    def observe(self, t: int, f: Valuation) -> None:
        pass


class MWULearner(Learner):
    """Exponential weights over every point of ``{0,1}^N`` (or a given expert list)."""

    name = "mwu"

    def __init__(self, T: int, eta: Optional[float] = None, experts: Optional[Sequence[Point]] = None):
        self.T = T
        self.eta = eta
        self._fixed_experts = None if experts is None else [tuple(e) for e in experts]

    def reset(self, n, rng):
        super().reset(n, rng)
        self.experts = self._fixed_experts or all_points(n)
        if self.eta is None:
            # Standard Hedge tuning sqrt(8 ln|X| / T).
            self.eta = float(np.sqrt(8 * np.log(max(len(self.experts), 2)) / max(self.T, 1)))
        self.log_weights = np.zeros(len(self.experts))
        self._tables = {}

    def probabilities(self) -> np.ndarray:
        w = np.exp(self.log_weights - self.log_weights.max())
        return w / w.sum()

    def act(self, t):
        cdf = np.cumsum(self.probabilities())
        k = int(np.searchsorted(cdf, self.rng.random() * cdf[-1], side="right"))
        return self.experts[min(k, len(self.experts) - 1)]

    def observe(self, t, f):
        table = self._tables.get(id(f))
        if table is None:
            table = self._tables[id(f)] = value_table(f, self.experts)
        self.log_weights += self.eta * table


class PerRoundGreedyLearner(Learner):
    """Play 0 first, then the exact-greedy maximizer of the previous round's function."""

    name = "greedy"

    def reset(self, n, rng):
        super().reset(n, rng)
        self._last = None
        self._cache = {}

    def act(self, t):
        if self._last is None:
            return zero(self.n)
        f = self._last
        x = self._cache.get(id(f))
        if x is None:
            x = self._cache[id(f)] = greedy_exact(f, self.n).final
        return x

    def observe(self, t, f):
        self._last = f


class ConstantLearner(Learner):
    name = "constant"

    def __init__(self, point: Point):
        self.point = tuple(point)

    def act(self, t):
        return self.point


def mwu_learner(T: int, eta: Optional[float] = None, experts=None) -> MWULearner:
    return MWULearner(T, eta, experts)


def per_round_greedy_learner() -> PerRoundGreedyLearner:
    return PerRoundGreedyLearner()


def make_learner(name: str, T: int) -> Learner:
    if name == "mwu":
        return mwu_learner(T)
    if name == "greedy":
        return per_round_greedy_learner()
    raise ValueError(f"unknown learner {name!r}")


# -- runs -----------------------------------------------------------------------


@dataclass
class AdversarialRun:
    sequence: AdversarialSequence
    points: list
    values: np.ndarray
    comparator: float
    comparator_point: Point

    @property
    def regret(self) -> float:
        return self.comparator - float(self.values.sum())


def play(learner: Learner, sequence: AdversarialSequence, seed=None) -> AdversarialRun:
    """Run ``learner`` on ``sequence`` and score it against the best fixed point."""
    n = sequence.n
    learner.reset(n, np.random.default_rng(seed))
    points, values = [], np.empty(sequence.T)
    for t in range(1, sequence.T + 1):
        x = tuple(learner.act(t))
        f = sequence[t]
        points.append(x)
        values[t - 1] = f.value(x)
        learner.observe(t, f)
    comp, comp_x = comparator(sequence)
    return AdversarialRun(sequence, points, values, comp, comp_x)


def comparator(sequence: AdversarialSequence):
    """``max_x sum_t f^t(x)`` over ``{0,1}^N`` and a maximizing point."""
    experts = all_points(sequence.n)
    counts = np.bincount(sequence.choices, minlength=4)[1:]
    total = sum(c * value_table(f, experts) for c, f in zip(counts, sequence.valuations))
    k = int(np.argmax(total))
    return float(total[k]), experts[k]


def adversarial_regret(learner: Learner, sequence: AdversarialSequence, seed=None) -> float:
    return play(learner, sequence, seed).regret


def is_common_base_point(matroids: Sequence[Matroid], x: Point) -> bool:
    # f_i(x) = 1 exactly when tau_i(x) = 0, i.e. x indicates a base of M_i.
    return all(m.is_base_point(x) for m in matroids)


def distinguisher(learner: Learner, m1: Matroid, m2: Matroid, m3: Matroid, T: int, seed=None) -> bool:
    """Answer whether some played point scores 1 under all three functions."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seq_seed, learner_seed = ss.spawn(2)
    return played_common_base(play(learner, sample_sequence(m1, m2, m3, T, seq_seed), learner_seed))


def played_common_base(run: AdversarialRun) -> bool:
    return any(is_common_base_point(run.sequence.matroids, x) for x in set(run.points))


def regret_trace(run: AdversarialRun):
    """Rows ``(round, choice, point, value, regret_so_far)`` with a prefix comparator."""
    seq = run.sequence
    experts = all_points(seq.n)
    tables = [value_table(f, experts) for f in seq.valuations]
    cum = np.zeros(len(experts))
    earned = 0.0
    for t in range(1, seq.T + 1):
        c = int(seq.choices[t - 1])
        cum += tables[c - 1]
        earned += run.values[t - 1]
        yield t, c, run.points[t - 1], float(run.values[t - 1]), float(cum.max() - earned)
