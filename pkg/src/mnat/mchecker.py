"""Exhaustive verification of M-natural concavity and related quantities.

Everything here enumerates the domain box, so it is meant for desk-scale
instances (a few hundred domain points).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .lattice import (
    DEFAULT_CAP,
    NEG_INFINITY,
    POS_INFINITY,
    FeasibleRegion,
    Point,
    Valuation,
    dominates,
    enumerate_feasible,
    exchange,
    is_finite,
    unit_step,
)

TOL = 1e-9


class Witness(NamedTuple):
    x: Point
    y: Point
    i: Optional[int]
    clause: Optional[str] = None

    def to_dict(self):
        d = {"x": list(self.x), "y": list(self.y), "i": self.i}
        if self.clause is not None:
            d["clause"] = self.clause
        return d


@dataclass
class ExchangeReport:
    passed: bool
    witness: Optional[Witness]
    pairs_checked: int

    def __post_init__(self):
        assert self.passed == (self.witness is None)

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return {
            "pass": self.passed,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "pairs_checked": self.pairs_checked,
        }


def _domain_values(f: Valuation, cap: int) -> dict:
    return {x: f.value(x) for x in f.domain(cap)}


def _exchange_holds(vals, x, y, i, js, lhs, tol):
    for j in js:
        a = vals.get(exchange(x, i, j))
        if a is None:
            continue
        b = vals.get(exchange(y, j, i))
        if b is not None and a + b >= lhs - tol:
            return True
    return False


def check_exchange(f: Valuation, cap: int = DEFAULT_CAP, tol: float = TOL) -> ExchangeReport:
    """Check the M-natural exchange inequality for every pair of domain points.

    For ``x, y`` in ``dom f`` and ``i`` with ``x_i > y_i`` some ``j`` in
    ``{0} u {j : x_j < y_j}`` must satisfy
    ``f(x) + f(y) <= f(x - e_i + e_j) + f(y + e_i - e_j)``.  The scan runs in
    lexicographic ``(x, y, i)`` order and stops at the first violation.
    """
    vals = _domain_values(f, cap)
    points = list(vals)
    n = f.n
    pairs = 0
    for x in points:
        fx = vals[x]
        for y in points:
            pairs += 1
            if x == y:
                continue
            lhs = fx + vals[y]
            js = [0] + [j for j in range(1, n + 1) if x[j - 1] < y[j - 1]]
            for i in range(1, n + 1):
                if x[i - 1] > y[i - 1] and not _exchange_holds(vals, x, y, i, js, lhs, tol):
                    return ExchangeReport(False, Witness(x, y, i), pairs)
    return ExchangeReport(True, None, pairs)


def check_prop_ab(f: Valuation, cap: int = DEFAULT_CAP, tol: float = TOL) -> ExchangeReport:
    """Check the two refined exchange clauses that hold when ``x(V) <= y(V)``.

    (a) ``x(V) < y(V)``: some ``j`` with ``x_j < y_j`` has
        ``f(x) + f(y) <= f(x + e_j) + f(y - e_j)``.
    (b) ``x(V) <= y(V)``: for every ``i`` with ``x_i > y_i`` the exchange
        inequality holds with some ``j`` in ``V`` (``j = 0`` not allowed).
    """
    vals = _domain_values(f, cap)
    points = list(vals)
    n = f.n
    pairs = 0
    for x in points:
        fx, sx = vals[x], sum(x)
        for y in points:
            sy = sum(y)
            if sx > sy:
                continue
            pairs += 1
            lhs = fx + vals[y]
            js = [j for j in range(1, n + 1) if x[j - 1] < y[j - 1]]
            if sx < sy and not _exchange_holds(vals, x, y, 0, js, lhs, tol):
                return ExchangeReport(False, Witness(x, y, None, "a"), pairs)
            for i in range(1, n + 1):
                if x[i - 1] > y[i - 1] and not _exchange_holds(vals, x, y, i, js, lhs, tol):
                    return ExchangeReport(False, Witness(x, y, i, "b"), pairs)
    return ExchangeReport(True, None, pairs)


def best_step_value(f: Valuation, x: Point, region: FeasibleRegion | None = None):
    """``max_{i'} f(x + e_i')`` over finite (and, given a region, feasible) steps."""
    best = NEG_INFINITY
    for i in range(f.n + 1):
        y = unit_step(x, i)
        if region is not None and not region.contains(y):
            continue
        v = f.value(y)
        if is_finite(v) and (not is_finite(best) or v > best):
            best = v
    return best


def local_error(f: Valuation, x: Point, i: int, region: FeasibleRegion | None = None):
    """Gap between the best one-step value at ``x`` and the value of step ``i``.

    Returns :data:`POS_INFINITY` when ``x + e_i`` leaves the domain (or the
    region, if one is given).
    """
    x = tuple(x)
    if not is_finite(f.value(x)):
        raise ValueError(f"local error undefined outside dom f: {x}")
    y = unit_step(x, i)
    vi = f.value(y) if region is None or region.contains(y) else NEG_INFINITY
    if not is_finite(vi):
        return POS_INFINITY
    return best_step_value(f, x, region) - vi


@dataclass(frozen=True)
class ReachableSet:
    """Feasible points above ``anchor`` reachable within ``remaining`` more steps."""

    points: tuple
    anchor: Point
    remaining: int

    def __contains__(self, y):
        return y in self.points

    def __len__(self):
        return len(self.points)


def reachable_set(region: FeasibleRegion, x_k: Point, k: int, budget: int | None = None,
                  feasible: list | None = None, cap: int = DEFAULT_CAP) -> ReachableSet:
    """``Y_k = {y in X : y >= x_k, y(V) <= K - k + x_k(V)}``.

    ``feasible`` may carry a pre-enumerated ``X`` to avoid rescanning it.
    """
    K = region.budget if budget is None else budget
    if not 0 <= k <= K:
        raise ValueError(f"step index {k} outside 0..{K}")
    x_k = tuple(x_k)
    if x_k not in region:
        raise ValueError(f"anchor {x_k} is not feasible")
    limit = K - k + sum(x_k)
    if feasible is None:
        feasible = enumerate_feasible(region, cap)
    pts = tuple(y for y in feasible if sum(y) <= limit and dominates(y, x_k))
    return ReachableSet(pts, x_k, K - k)


def brute_force_max(f: Valuation, region: FeasibleRegion, cap: int = DEFAULT_CAP):
    """Lexicographically first maximizer of ``f`` over ``region`` and its value."""
    best_x, best_v = None, NEG_INFINITY
    for x in enumerate_feasible(region, cap):
        v = f.value(x)
        if best_x is None or v > best_v:
            best_x, best_v = x, v
    if best_x is None:
        raise ValueError("feasible region is empty")
    return best_x, best_v
