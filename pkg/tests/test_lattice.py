import pytest
from hypothesis import given, strategies as st

from mnat.errors import CapExceeded, EmptyIntersection
from mnat.lattice import (
    NEG_INFINITY,
    POS_INFINITY,
    FeasibleRegion,
    FunctionValuation,
    TableValuation,
    as_float,
    dominates,
    enumerate_feasible,
    exchange,
    is_finite,
    rescale,
    restrict,
    total,
    unit_step,
    zero,
)
from mnat.instances import random_instance
from mnat.mchecker import check_exchange

points = st.lists(st.integers(0, 5), min_size=1, max_size=5).map(tuple)


def const(n, hi=1, v=0.0):
    return FunctionValuation(lambda x: v, (hi,) * n)


@pytest.mark.parametrize("x,i,expected", [((0, 0), 0, (0, 0)), ((0, 0), 1, (1, 0)), ((2, 1), 2, (2, 2))])
def test_unit_step_examples(x, i, expected):
    assert unit_step(x, i) == expected


def test_unit_step_rejects_out_of_range():
    with pytest.raises(IndexError):
        unit_step((0, 0), 3)


@given(points, st.data())
def test_unit_step_adds_one(x, data):
    i = data.draw(st.integers(1, len(x)))
    assert total(unit_step(x, i)) == total(x) + 1
    assert unit_step(x, 0) == x


def test_exchange_moves_one_unit():
    assert exchange((2, 0, 1), 1, 2) == (1, 1, 1)
    assert exchange((2, 0, 1), 1, 0) == (1, 0, 1)


def test_extended_values_order():
    assert NEG_INFINITY < -1e300 < 1e300 < POS_INFINITY
    assert not is_finite(NEG_INFINITY) and is_finite(0.5)
    assert as_float(NEG_INFINITY) == float("-inf")
    assert max([NEG_INFINITY, 0.0]) == 0.0


def test_dominates():
    assert dominates((1, 2), (1, 1))
    assert not dominates((0, 2), (1, 1))


def test_enumerate_full_square():
    assert enumerate_feasible(FeasibleRegion(const(2), 2)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_enumerate_cardinality_cut():
    assert enumerate_feasible(FeasibleRegion(const(2), 1)) == [(0, 0), (0, 1), (1, 0)]


def test_enumerate_singleton_domain():
    f = TableValuation({(0, 0): 0.0}, hi=(1, 1))
    assert enumerate_feasible(FeasibleRegion(f, 2)) == [(0, 0)]


def test_enumerate_cap():
    with pytest.raises(CapExceeded):
        enumerate_feasible(FeasibleRegion(const(8, hi=9), 3), cap=1000)


@given(st.integers(1, 4), st.integers(1, 2), st.integers(0, 6))
def test_enumerate_members_unique_and_feasible(n, hi, K):
    f = FunctionValuation(lambda x: NEG_INFINITY if x[0] == 1 else 0.0, (hi,) * n)
    region = FeasibleRegion(f, K)
    pts = enumerate_feasible(region)
    assert len(set(pts)) == len(pts) == len([x for x in f.box_points() if x in region])
    assert pts == sorted(pts)


def test_value_outside_box_is_neg_infinity():
    f = const(2)
    assert f.value((2, 0)) is NEG_INFINITY
    assert f.value((-1, 0)) is NEG_INFINITY


def test_restrict_full_box_is_identity():
    f = FunctionValuation(lambda x: x[0] - 0.5 * x[1], (2, 2))
    g = restrict(f, (0, 0), (2, 2))
    assert all(f(x) == g(x) for x in f.box_points())


def test_restrict_slab():
    g = restrict(const(2), (0, 0), (0, 1))
    assert [x for x in const(2).box_points() if is_finite(g(x))] == [(0, 0), (0, 1)]


def test_restrict_empty():
    with pytest.raises(EmptyIntersection):
        restrict(const(2), (2, 2), (3, 3))


@given(st.integers(0, 10_000), st.data())
def test_restrict_agrees_inside_interval(seed, data):
    import numpy as np

    f = random_instance(np.random.default_rng(seed), max_n=3)
    a = tuple(data.draw(st.integers(0, h)) for h in f.hi)
    b = tuple(data.draw(st.integers(lo, h)) for lo, h in zip(a, f.hi))
    g = restrict(f, a, b)
    for x in f.box_points():
        inside = all(p <= v <= q for p, v, q in zip(a, x, b))
        assert (g(x) == f(x)) if inside else g(x) is NEG_INFINITY


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_restrict_preserves_concavity(seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    f = random_instance(rng, max_n=4)
    assert check_exchange(f).passed
    g = restrict(f, (0,) * f.n, tuple(max(0, h - 1) for h in f.hi))
    assert check_exchange(g).passed


def test_rescale_maps_range():
    f = FunctionValuation(lambda x: 2.0 + x[0], (2,))
    g = rescale(f, 2.0, 4.0)
    assert [g((z,)) for z in range(3)] == [0.0, 0.5, 1.0]
    assert g.scale == 0.5 and g.offset == -1.0
    with pytest.raises(ValueError):
        rescale(f, 1.0, 1.0)


def test_region_membership():
    region = FeasibleRegion(const(2, hi=2), 2)
    assert (1, 1) in region and (2, 1) not in region and (0, 3) not in region
    assert zero(2) in region
