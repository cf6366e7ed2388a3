"""Matroids given by an explicit base family.

Elements are the integers ``1..n``.  Bases are stored as bitmasks (bit
``i - 1`` set when element ``i`` belongs to the base) which keeps distance
computations to a XOR and a popcount.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

from .errors import BaseEnumerationCapExceeded, ExchangeAxiomViolation, InstanceError

BASE_CAP = 10**6
EXCHANGE_CHECK_MAX_N = 12


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def point_mask(x) -> int:
    """Bitmask of the support of a 0/1 point."""
    m = 0
    for k, v in enumerate(x):
        if v:
            m |= 1 << k
    return m


class Matroid:
    """Matroid over ``{1, ..., n}`` with an explicit list of bases."""

    def __init__(self, n: int, bases: Iterable[int], name: str = "", check: bool = True):
        self.n = int(n)
        self.base_masks = tuple(sorted(set(bases)))
        self.name = name
        if not self.base_masks:
            raise InstanceError("a matroid needs at least one base")
        if any(b >> self.n for b in self.base_masks):
            raise InstanceError(f"base uses an element outside 1..{self.n}")
        self._base_set = frozenset(self.base_masks)
        if check and self.n <= EXCHANGE_CHECK_MAX_N:
            violation = exchange_violation(self.base_masks)
            if violation is not None:
                b1, b2, i = violation
                raise ExchangeAxiomViolation(
                    f"bases {set(elements_of(b1))}, {set(elements_of(b2))} with element {i}: "
                    "no exchange partner"
                )

    @property
    def rank(self) -> int:
        return bin(self.base_masks[0]).count("1")

    def is_base(self, subset: Iterable[int]) -> bool:
        return mask_of(subset) in self._base_set

    def is_base_point(self, x) -> bool:
        return point_mask(x) in self._base_set

    def bases(self) -> list:
        return [frozenset(elements_of(b)) for b in self.base_masks]

    def __repr__(self):
        return f"<Matroid {self.name!r} n={self.n} rank={self.rank} bases={len(self.base_masks)}>"


def exchange_violation(base_masks: Sequence[int]):
    """First ``(B1, B2, i)`` breaking the base exchange axiom, or ``None``."""
    base_set = set(base_masks)
    for b1 in base_masks:
        for b2 in base_masks:
            only1 = b1 & ~b2
            only2 = b2 & ~b1
            while only1:
                low = only1 & -only1
                only1 ^= low
                rest = b1 ^ low
                cand = only2
                found = False
                while cand:
                    lj = cand & -cand
                    cand ^= lj
                    if (rest | lj) in base_set:
                        found = True
                        break
                if not found:
                    return b1, b2, low.bit_length()
    return None


def uniform_matroid(n: int, r: int, cap: int = BASE_CAP) -> Matroid:
    if not 0 <= r <= n:
        raise InstanceError(f"uniform matroid needs 0 <= r <= n, got r={r}, n={n}")
    if math.comb(n, r) > cap:
        raise BaseEnumerationCapExceeded(f"U({r},{n}) has {math.comb(n, r)} bases > cap {cap}")
    bases = (mask_of(c) for c in itertools.combinations(range(1, n + 1), r))
    return Matroid(n, bases, name=f"U({r},{n})", check=False)


def partition_matroid(blocks: Sequence[Sequence[int]], caps: Sequence[int], n: int | None = None,
                      cap: int = BASE_CAP) -> Matroid:
    """Bases pick exactly ``caps[b]`` elements from each block ``b``.

    Elements outside every block are loops.
    """
    if len(blocks) != len(caps):
        raise InstanceError("blocks and caps differ in length")
    seen = set()
    for block in blocks:
        if seen & set(block):
            raise InstanceError("partition blocks overlap")
        seen |= set(block)
    if n is None:
        n = max(seen) if seen else 0
    if any(e < 1 or e > n for e in seen):
        raise InstanceError(f"block element outside 1..{n}")
    for block, c in zip(blocks, caps):
        if not 0 <= c <= len(block):
            raise InstanceError(f"cap {c} invalid for block {list(block)}")
    count = math.prod(math.comb(len(b), c) for b, c in zip(blocks, caps))
    if count > cap:
        raise BaseEnumerationCapExceeded(f"partition matroid has {count} bases > cap {cap}")
    choices = [[mask_of(c) for c in itertools.combinations(sorted(b), k)] for b, k in zip(blocks, caps)]
    bases = (sum(combo) for combo in itertools.product(*choices))
    return Matroid(n, bases, name="partition", check=False)


def explicit_matroid(bases: Iterable[Iterable[int]], n: int | None = None) -> Matroid:
    """Matroid from a list of bases; raises :class:`ExchangeAxiomViolation` on bad lists."""
    bases = [tuple(b) for b in bases]
    if n is None:
        n = max((max(b) for b in bases if b), default=0)
    masks = [mask_of(b) for b in bases]
    return Matroid(n, masks, name="explicit")


def common_bases(*matroids: Matroid) -> list:
    """Bases shared by all matroids (exhaustive intersection of base lists)."""
    common = set(matroids[0].base_masks)
    for m in matroids[1:]:
        common &= set(m.base_masks)
    return sorted(common)
