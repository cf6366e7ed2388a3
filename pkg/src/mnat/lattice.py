"""Integer lattice points, extended-real values and the valuation oracle.

Points are plain tuples of ints indexed by the ground set ``V = {1, ..., N}``;
coordinate ``i`` of the ground set lives at tuple position ``i - 1``.  The
direction ``0`` denotes the zero vector so ``unit_step(x, 0) == x``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence, Union

from .errors import CapExceeded, EmptyIntersection

Point = tuple  # tuple[int, ...]

DEFAULT_CAP = 10**7


@functools.total_ordering
class _Infinity:
    """Signed infinity that only supports comparisons.

    Arithmetic is deliberately unsupported so that a stray ``-inf`` can never
    leak into a sum silently.
    """

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __hash__(self):
        return hash(("mnat-infinity", self.sign))

    def __repr__(self):
        return "NEG_INFINITY" if self.sign < 0 else "POS_INFINITY"

    def __reduce__(self):
        return (_infinity, (self.sign,))


def _infinity(sign):
    return NEG_INFINITY if sign < 0 else POS_INFINITY


NEG_INFINITY = _Infinity(-1)
POS_INFINITY = _Infinity(+1)

ExtendedValue = Union[float, _Infinity]


def is_finite(v) -> bool:
    return not isinstance(v, _Infinity)


def as_float(v) -> float:
    """Convert an extended value to a float (for serialization only)."""
    if isinstance(v, _Infinity):
        return math.inf * v.sign
    return float(v)


# -- points -----------------------------------------------------------------


def zero(n: int) -> Point:
    return (0,) * n


def unit_step(x: Point, i: int) -> Point:
    """Return ``x + e_i``; ``i = 0`` is the no-op direction."""
    if i == 0:
        return x
    if not 1 <= i <= len(x):
        raise IndexError(f"direction {i} outside 0..{len(x)}")
    return x[: i - 1] + (x[i - 1] + 1,) + x[i:]


def exchange(x: Point, i: int, j: int) -> Point:
    """Return ``x - e_i + e_j`` with ``e_0 = 0``."""
    y = list(x)
    if i:
        y[i - 1] -= 1
    if j:
        y[j - 1] += 1
    return tuple(y)


def total(x: Point) -> int:
    return sum(x)


def dominates(y: Point, x: Point) -> bool:
    """Element-wise ``y >= x``."""
    return all(a >= b for a, b in zip(y, x))


# -- valuations -------------------------------------------------------------


class Valuation:
    """Value oracle ``f: Z^V -> R u {-inf}`` with a finite domain box.

    Subclasses implement :meth:`_evaluate`, which is only called for points
    inside the box.  ``scale`` and ``offset`` record an affine rescale applied
    on top of the raw values (identity unless produced by :func:`rescale`).
    """

    def __init__(self, hi: Sequence[int], lo: Sequence[int] | None = None, name: str = ""):
        self.hi = tuple(int(h) for h in hi)
        self.lo = tuple(int(v) for v in lo) if lo is not None else zero(len(self.hi))
        if len(self.lo) != len(self.hi) or not self.hi:
            raise ValueError("domain box must have matching, non-empty bounds")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty domain box {self.lo}..{self.hi}")
        self.name = name
        self.scale = 1.0
        self.offset = 0.0

    @property
    def n(self) -> int:
        return len(self.hi)

    def in_box(self, x: Point) -> bool:
        return len(x) == self.n and all(a <= v <= b for a, v, b in zip(self.lo, x, self.hi))

    def value(self, x: Point) -> ExtendedValue:
        x = tuple(x)
        if not self.in_box(x):
            return NEG_INFINITY
        return self._evaluate(x)

    __call__ = value

    def _evaluate(self, x: Point) -> ExtendedValue:
        raise NotImplementedError

    def box_volume(self) -> int:
        return math.prod(b - a + 1 for a, b in zip(self.lo, self.hi))

    def box_points(self, cap: int = DEFAULT_CAP) -> Iterator[Point]:
        """All box points in lexicographic order."""
        if self.box_volume() > cap:
            raise CapExceeded(f"box of {self.name or 'valuation'} has {self.box_volume()} points > cap {cap}")
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def domain(self, cap: int = DEFAULT_CAP) -> list:
        """Effective domain (finite points of the box) in lexicographic order."""
        return [x for x in self.box_points(cap) if is_finite(self.value(x))]

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} box={self.lo}..{self.hi}>"


class FunctionValuation(Valuation):
    """Wrap a plain callable that returns a float or :data:`NEG_INFINITY`."""

    def __init__(self, func: Callable[[Point], ExtendedValue], hi, lo=None, name=""):
        super().__init__(hi, lo, name or getattr(func, "__name__", ""))
        self._func = func

    def _evaluate(self, x):
        return self._func(x)


class TableValuation(Valuation):
    """Explicit value table; points missing from the table are outside dom f."""

    def __init__(self, table: Mapping[Point, float], hi=None, name="table"):
        self.table = {tuple(int(c) for c in k): float(v) for k, v in table.items()}
        if not self.table:
            raise ValueError("empty value table")
        if hi is None:
            n = len(next(iter(self.table)))
            hi = [max(k[i] for k in self.table) for i in range(n)]
        super().__init__(hi, name=name)

    def _evaluate(self, x):
        v = self.table.get(x)
        return NEG_INFINITY if v is None else v


class _Restricted(Valuation):
    def __init__(self, base: Valuation, lo, hi):
        super().__init__(hi, lo, f"{base.name}|[{lo},{hi}]")
        self.base = base
        self.scale, self.offset = base.scale, base.offset

    def _evaluate(self, x):
        return self.base.value(x)


class _Rescaled(Valuation):
    def __init__(self, base: Valuation, lower: float, upper: float):
        super().__init__(base.hi, base.lo, base.name)
        self.base = base
        self._lower = lower
        self._width = upper - lower
        self.scale = base.scale / self._width
        self.offset = (base.offset - lower) / self._width

    def _evaluate(self, x):
        v = self.base.value(x)
        if not is_finite(v):
            return v
        return (v - self._lower) / self._width


def restrict(f: Valuation, a: Point, b: Point) -> Valuation:
    """Restrict ``f`` to the integer interval ``[a, b]``.

    The result is the intersection of ``[a, b]`` with the domain box of ``f``;
    its values agree with ``f`` there and are ``NEG_INFINITY`` elsewhere.
    """
    if len(a) != f.n or len(b) != f.n:
        raise ValueError("interval bounds must have length N")
    lo = tuple(max(p, q) for p, q in zip(a, f.lo))
    hi = tuple(min(p, q) for p, q in zip(b, f.hi))
    if any(p > q for p, q in zip(lo, hi)):
        raise EmptyIntersection(f"[{tuple(a)}, {tuple(b)}] misses box {f.lo}..{f.hi}")
    return _Restricted(f, lo, hi)


def rescale(f: Valuation, lower: float, upper: float) -> Valuation:
    """Affinely map values in ``[lower, upper]`` onto ``[0, 1]``.

    A positive affine map preserves M-natural concavity.
    """
    if not upper > lower:
        raise ValueError("rescale needs upper > lower")
    return _Rescaled(f, float(lower), float(upper))


# -- feasible region --------------------------------------------------------


@dataclass(frozen=True)
class FeasibleRegion:
    """Action set ``X = {x in dom f : x >= 0, x(V) <= K}``."""

    valuation: Valuation
    budget: int

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")

    @property
    def n(self) -> int:
        return self.valuation.n

    def contains(self, x: Point) -> bool:
        return (
            len(x) == self.n
            and min(x) >= 0
            and sum(x) <= self.budget
            and is_finite(self.valuation.value(x))
        )

    __contains__ = contains


def enumerate_feasible(region: FeasibleRegion, cap: int = DEFAULT_CAP) -> list:
    """All members of ``region`` in lexicographic order.

    Raises :class:`CapExceeded` when the domain box holds more than ``cap``
    points.
    """
    f = region.valuation
    lo = [max(0, a) for a in f.lo]
    hi = [min(region.budget, b) for b in f.hi]
    if any(a > b for a, b in zip(lo, hi)):
        return []
    if f.box_volume() > cap:
        raise CapExceeded(f"domain box has {f.box_volume()} points > cap {cap}")
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return [x for x in itertools.product(*ranges) if sum(x) <= region.budget and is_finite(f.value(x))]
