from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from equisep.geom import (
    Bipartition,
    ConcreteLine,
    GeometryError,
    NotSeparableError,
    Orientation,
    PointSet,
    Segment,
    check_general_position,
    convex_hull,
    enumerate_bipartitions,
    orientation,
    realize_line,
    segments_properly_cross,
    separating_line,
    to_rational,
)
from helpers import general_points, separable_by_hulls


def test_orientation_examples():
    assert orientation((0, 0), (1, 0), (0, 1)) == Orientation.CCW
    assert orientation((0, 0), (1, 1), (2, 2)) == Orientation.COLLINEAR
    assert orientation((0, 0), (1, 0), (2, -1)) == Orientation.CW


def test_general_position_examples():
    assert check_general_position([(0, 0), (1, 0), (0, 1)]) is None
    assert check_general_position([(0, 0), (1, 1), (2, 2), (5, 0)]) == (0, 1, 2)
    assert check_general_position([(0, 0), (0, 0)]) is not None


def test_rationals_are_exact():
    assert to_rational("0.1") == Fraction(1, 10)
    assert to_rational("-7/4") == Fraction(-7, 4)
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(GeometryError):
        PointSet([(0, 0), ("0/1", "0")])


def test_bipartition_counts():
    tri = PointSet([(0, 0), (1, 0), (0, 1)])
    assert len({b.positive for b in enumerate_bipartitions(tri)}) == 8
    square = PointSet([(0, 0), (1, 0), (1, 1), (0, 1)])
    found = {b.positive for b in enumerate_bipartitions(square)}
    assert len(found) == 14
    assert frozenset({0, 2}) not in found and frozenset({1, 3}) not in found
    two = PointSet([(0, 0), (1, 2)])
    assert len({b.positive for b in enumerate_bipartitions(two)}) == 4


def test_realize_examples():
    ps = PointSet([(0, 0), (3, 1), (1, 4)])
    full = frozenset(range(3))
    line = realize_line(Bipartition(full, frozenset()), ps)
    assert all(line.side(p) > 0 for p in ps.coords)
    square = PointSet([(0, 0), (1, 0), (1, 1), (0, 1)])
    with pytest.raises(NotSeparableError):
        realize_line(Bipartition(frozenset({0, 2}), frozenset({1, 3})), square)


def test_segment_examples():
    assert segments_properly_cross(Segment((0, 0), (2, 2)), Segment((0, 2), (2, 0)))
    assert not segments_properly_cross(Segment((0, 0), (1, 0)), Segment((2, 0), (3, 0)))
    assert not segments_properly_cross(Segment((0, 0), (2, 0)), Segment((1, 0), (1, 5)))


@given(general_points(2, 7))
def test_every_bipartition_realises(ps):
    bips = enumerate_bipartitions(ps)
    masks = {b.positive for b in bips}
    full = frozenset(range(ps.n))
    assert len(bips) <= 4 * ps.n * (ps.n - 1) // 2 + 2
    for b in bips:
        assert full - b.positive in masks
        line = realize_line(b, ps)
        assert all(line.side(p) == b.side(i) for i, p in enumerate(ps.coords))


@given(general_points(3, 7))
def test_bipartitions_match_hull_oracle(ps):
    masks = {b.positive for b in enumerate_bipartitions(ps)}
    for r in range(ps.n + 1):
        for sub in combinations(range(ps.n), r):
            assert (frozenset(sub) in masks) == separable_by_hulls(ps.coords, set(sub))


pts3 = st.tuples(*[st.tuples(st.integers(-50, 50), st.integers(-50, 50))] * 3)


@given(pts3, st.integers(-9, 9), st.integers(1, 9), st.integers(-9, 9))
def test_orientation_symmetries(t, num, den, shift):
    p, q, r = t
    o = orientation(p, q, r)
    assert orientation(q, p, r) == -o
    assert orientation(p, r, q) == -o
    f = Fraction(den, 7)
    move = lambda a: (a[0] * f + shift, a[1] * f + Fraction(num, 3))  # noqa: E731
    assert orientation(move(p), move(q), move(r)) == o


@given(general_points(3, 9))
def test_hull_is_convex_and_contains_all(ps):
    hull = convex_hull(ps.coords)
    h = [ps.coords[i] for i in hull]
    for k in range(len(h)):
        a, b = h[k], h[(k + 1) % len(h)]
        assert all(orientation(a, b, p) != Orientation.CW for p in ps.coords)


def test_separating_line_sides():
    a = [(0, 0), (1, 0), (0, 1)]
    b = [(5, 5), (6, 5)]
    line = separating_line(a, b)
    assert all(line.side(p) > 0 for p in a) and all(line.side(p) < 0 for p in b)
    assert separating_line([(0, 0), (2, 2)], [(0, 2), (2, 0)]) is None


def test_line_basics():
    ln = ConcreteLine(Fraction(1), Fraction(0), Fraction(1))
    assert ln.side((2, 0)) == 1 and ln.flipped().side((2, 0)) == -1
    with pytest.raises(GeometryError):
        ConcreteLine(Fraction(0), Fraction(0), Fraction(1))
