"""Greedy maximization with possibly erroneous local updates.

Starting from ``x_0 = 0`` the procedure takes ``K`` unit steps
``x_k = x_{k-1} + e_{i_k}`` with ``i_k`` in ``{0, 1, ..., N}``.  The exact
greedy picks the best feasible step; :func:`greedy_with_selector` lets any
policy choose, and :class:`RobustnessAuditor` checks that the final value
loses at most the summed local errors against the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InfeasibleDirection
from .lattice import (
    POS_INFINITY,
    FeasibleRegion,
    Point,
    Valuation,
    as_float,
    dominates,
    enumerate_feasible,
    is_finite,
    unit_step,
    zero,
)
from .mchecker import TOL, brute_force_max, local_error

Selector = Callable[[int, Point, FeasibleRegion], int]


@dataclass
class Trajectory:
    points: list
    directions: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def final(self) -> Point:
        return self.points[-1]

    @property
    def error_sum(self):
        if any(not is_finite(e) for e in self.errors):
            return POS_INFINITY
        return float(sum(self.errors))

    def to_dict(self):
        return {
            "points": [list(p) for p in self.points],
            "directions": list(self.directions),
            "errors": [as_float(e) for e in self.errors],
        }


@dataclass
class RobustnessAudit:
    final_value: float
    optimum: float
    optimum_point: Point
    error_sum: float
    slack: Optional[float]
    step_slacks: list
    vacuous: bool
    tol: float = TOL

    @property
    def passed(self) -> bool:
        if self.vacuous:
            return True
        return self.slack >= -self.tol and all(s >= -self.tol for s in self.step_slacks if s is not None)

    def to_dict(self):
        return {
            "final_value": as_float(self.final_value),
            "optimum": as_float(self.optimum),
            "optimum_point": list(self.optimum_point),
            "error_sum": as_float(self.error_sum),
            "slack": self.slack,
            "step_slacks": self.step_slacks,
            "vacuous": self.vacuous,
            "pass": self.passed,
        }


def feasible_directions(region: FeasibleRegion, x: Point) -> list:
    """Directions ``i`` (0 first) with ``x + e_i`` in the region."""
    return [i for i in range(region.n + 1) if region.contains(unit_step(x, i))]


# -- selectors ----------------------------------------------------------------


def exact_selector(k, x, region):
    """Best feasible step; ties go to direction 0, then the smallest index."""
    f = region.valuation
    best_i, best_v = None, None
    for i in feasible_directions(region, x):
        v = f.value(unit_step(x, i))
        if best_i is None or v > best_v:
            best_i, best_v = i, v
    return best_i


def zero_selector(k, x, region):
    return 0


def worst_selector(k, x, region):
    """Feasible step with the lowest value (smallest index on ties)."""
    f = region.valuation
    worst_i, worst_v = None, None
    for i in feasible_directions(region, x):
        v = f.value(unit_step(x, i))
        if worst_i is None or v < worst_v:
            worst_i, worst_v = i, v
    return worst_i


def random_selector(seed) -> Selector:
    """Uniformly random feasible step, driven by its own generator."""
    rng = np.random.default_rng(seed)

    def select(k, x, region):
        dirs = feasible_directions(region, x)
        return dirs[int(rng.integers(len(dirs)))]

    return select


def make_selector(name: str) -> Selector:
    """Parse ``exact | zero | worst | random:<seed>``."""
    if name == "exact":
        return exact_selector
    if name == "zero":
        return zero_selector
    if name == "worst":
        return worst_selector
    if name.startswith("random:"):
        return random_selector(int(name.split(":", 1)[1]))
    raise ValueError(f"unknown selector {name!r}")


# -- drivers ------------------------------------------------------------------


def greedy_with_selector(f: Valuation, K: int, selector: Selector) -> Trajectory:
    region = FeasibleRegion(f, K)
    x = zero(f.n)
    if x not in region:
        raise ValueError("0 must belong to the feasible region")
    traj = Trajectory([x])
    for k in range(1, K + 1):
        i = int(selector(k, x, region))
        nxt = unit_step(x, i) if 0 <= i <= f.n else None
        if nxt is None or nxt not in region:
            raise InfeasibleDirection(f"step {k}: direction {i} leaves the feasible region at {x}")
        traj.errors.append(local_error(f, x, i, region))
        traj.directions.append(i)
        traj.points.append(nxt)
        x = nxt
    return traj


def greedy_exact(f: Valuation, K: int) -> Trajectory:
    """Standard greedy; exact for M-natural-concave ``f``."""
    return greedy_with_selector(f, K, exact_selector)


# -- robustness audit ---------------------------------------------------------


class RobustnessAuditor:
    """Audit many trajectories on one ``(f, X)`` pair, sharing the enumeration of ``X``."""

    def __init__(self, f: Valuation, region: FeasibleRegion, tol: float = TOL):
        self.f = f
        self.region = region
        self.tol = tol
        self.feasible = enumerate_feasible(region)
        self.values = {x: f.value(x) for x in self.feasible}
        self.optimum_point, self.optimum = brute_force_max(f, region)
        self._ymax = {}

    def reachable_max(self, anchor: Point, limit: int):
        """``max f`` over feasible ``y >= anchor`` with ``y(V) <= limit``."""
        key = (anchor, limit)
        m = self._ymax.get(key)
        if m is None:
            m = max(v for y, v in self.values.items() if sum(y) <= limit and dominates(y, anchor))
            self._ymax[key] = m
        return m

    def audit(self, traj: Trajectory) -> RobustnessAudit:
        K = self.region.budget
        final_value = self.f.value(traj.final)
        err_sum = traj.error_sum
        vacuous = not is_finite(err_sum)
        slack = None if vacuous else final_value - (self.optimum - err_sum)
        step_slacks = []
        prev = None
        for k in range(0, len(traj.points)):
            x = traj.points[k]
            if x not in self.values:
                prev = None
                if k:
                    step_slacks.append(None)
                continue
            cur = self.reachable_max(x, K - k + sum(x))
            if k:
                err = traj.errors[k - 1]
                step_slacks.append(None if prev is None or not is_finite(err) else cur - (prev - err))
            prev = cur
        return RobustnessAudit(final_value, self.optimum, self.optimum_point, err_sum, slack,
                               step_slacks, vacuous, self.tol)


def audit_robustness(f: Valuation, traj: Trajectory, region: FeasibleRegion) -> RobustnessAudit:
    """Check ``f(x_K) >= f(x*) - sum_k err(i_k | x_{k-1})`` and its per-step form."""
    return RobustnessAuditor(f, region).audit(traj)
