"""Concrete M-natural-concave valuation families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import _flow
from .errors import BaseEnumerationCapExceeded, NonConcaveTable
from .lattice import NEG_INFINITY, Valuation
from .matroids import BASE_CAP, Matroid, point_mask

CONCAVITY_TOL = 1e-12
BRUTE_FORCE_MAX_EDGES = 20


# -- separable concave (resource allocation) --------------------------------


@dataclass(frozen=True)
class SeparableConcaveSpec:
    """Per-coordinate tables ``tables[i][z] = f_i(z)`` and a total budget."""

    tables: tuple
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(tuple(float(v) for v in t) for t in self.tables))
        object.__setattr__(self, "budget", int(self.budget))


class SeparableConcave(Valuation):
    def __init__(self, spec: SeparableConcaveSpec):
        for i, table in enumerate(spec.tables):
            if not table:
                raise NonConcaveTable(f"table {i + 1} is empty")
            diffs = [b - a for a, b in zip(table, table[1:])]
            for z in range(len(diffs) - 1):
                if diffs[z + 1] > diffs[z] + CONCAVITY_TOL:
                    raise NonConcaveTable(
                        f"table {i + 1}: increment {diffs[z + 1]} at z={z + 1} exceeds {diffs[z]}"
                    )
        super().__init__([len(t) - 1 for t in spec.tables], name="separable")
        self.spec = spec

    def _evaluate(self, x):
        if sum(x) > self.spec.budget:
            return NEG_INFINITY
        return sum(t[v] for t, v in zip(self.spec.tables, x))


def separable_concave(spec: SeparableConcaveSpec) -> Valuation:
    """``f(x) = sum_i f_i(x_i)`` on ``x >= 0, x(V) <= K``; ``-inf`` elsewhere."""
    return SeparableConcave(spec)


def geometric_tables(coeffs: Sequence[float], hi: int) -> list:
    """Tables ``f_i(z) = c_i (1 - 2^-z)`` for ``z = 0..hi``; concave whenever ``c_i >= 0``."""
    return [[c * (1.0 - 2.0 ** -z) for z in range(hi + 1)] for c in coeffs]


# -- bipartite max-flow (OXS) -----------------------------------------------


@dataclass(frozen=True)
class BipartiteFlowSpec:
    """Weighted bipartite graph between items ``1..n_left`` and agents ``1..n_right``.

    ``edges`` holds ``(i, j, w)`` triples with 1-based endpoints.  ``caps`` bounds
    the units each item may supply; ``right_caps`` bounds the units each agent
    may absorb (one by default, which gives the OXS matching semantics).
    """

    n_left: int
    n_right: int
    edges: tuple
    caps: tuple
    right_caps: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(i), int(j), float(w)) for i, j, w in self.edges))
        object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        rc = self.right_caps if self.right_caps is not None else (1,) * self.n_right
        object.__setattr__(self, "right_caps", tuple(int(c) for c in rc))
        if len(self.caps) != self.n_left or len(self.right_caps) != self.n_right:
            raise ValueError("caps must match vertex counts")
        for i, j, w in self.edges:
            if not (1 <= i <= self.n_left and 1 <= j <= self.n_right):
                raise ValueError(f"edge ({i}, {j}) outside the vertex ranges")
            if w != w or w in (float("inf"), float("-inf")):
                raise ValueError("edge weights must be finite")


class OXSMaxFlow(Valuation):
    def __init__(self, spec: BipartiteFlowSpec):
        # A left vertex without edges can only ever supply zero units.
        has_edge = {i for i, _, _ in spec.edges}
        hi = [c if i + 1 in has_edge else 0 for i, c in enumerate(spec.caps)]
        super().__init__(hi, name="oxs")
        self.spec = spec
        self._edges0 = [(i - 1, j - 1, w) for i, j, w in spec.edges]
        self._brute = len(spec.edges) <= BRUTE_FORCE_MAX_EDGES
        self._cache = {}

    def _evaluate(self, x):
        v = self._cache.get(x)
        if v is None:
            v = self.solve(x, brute=self._brute)
            self._cache[x] = v
        return v

    def solve(self, x, brute: bool):
        solver = _flow.max_weight_transport_brute if brute else _flow.max_weight_transport
        v = solver(list(x), list(self.spec.right_caps), self._edges0)
        return NEG_INFINITY if v is None else v


def oxs_maxflow(spec: BipartiteFlowSpec) -> Valuation:
    """Max weight of an integral flow sending exactly ``x_i`` units out of each item."""
    return OXSMaxFlow(spec)


# -- matroid based functions ------------------------------------------------


def tau(matroid: Matroid, x, cap: int = BASE_CAP) -> int:
    """L1 distance from the 0/1 point ``x`` to the nearest base indicator."""
    if any(v not in (0, 1) for v in x) or len(x) != matroid.n:
        raise ValueError(f"tau needs a 0/1 point of length {matroid.n}, got {tuple(x)}")
    if len(matroid.base_masks) > cap:
        raise BaseEnumerationCapExceeded(f"{len(matroid.base_masks)} bases > cap {cap}")
    m = point_mask(x)
    return min(bin(m ^ b).count("1") for b in matroid.base_masks)


class MatroidDistance(Valuation):
    def __init__(self, matroid: Matroid):
        super().__init__((1,) * matroid.n, name=f"matroid_distance[{matroid.name}]")
        self.matroid = matroid
        self._tau_cache = {}

    def tau(self, x) -> int:
        x = tuple(x)
        t = self._tau_cache.get(x)
        if t is None:
            t = tau(self.matroid, x)
            self._tau_cache[x] = t
        return t

    def _evaluate(self, x):
        return 1.0 - self.tau(x) / self.matroid.n


def matroid_distance(matroid: Matroid) -> MatroidDistance:
    """``f(x) = 1 - tau(x) / N`` on ``{0,1}^V``.

    Equals 1 exactly on base indicators and is at most ``1 - 1/N`` elsewhere.
    """
    return MatroidDistance(matroid)


class MatroidIndicator(Valuation):
    def __init__(self, matroid: Matroid):
        super().__init__((1,) * matroid.n, name=f"matroid_indicator[{matroid.name}]")
        self.matroid = matroid

    def _evaluate(self, x):
        return 0.0 if self.matroid.is_base_point(x) else NEG_INFINITY


def matroid_indicator(matroid: Matroid) -> Valuation:
    """0 on base indicators, ``-inf`` elsewhere (``0`` need not be in the domain)."""
    return MatroidIndicator(matroid)
