import math
import random
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from equisep.generators import gen_convex, gen_perturbed_grid, gen_random
from equisep.geom import PointSet, convex_hull
from equisep.stabbing import (
    CurveUnion,
    NotSimpleError,
    PolygonalCurve,
    SpanningTree,
    degree_exact,
    degree_upper,
    glue_many,
    glue_pair,
    is_simple,
    low_stab_spanning_tree,
    preorder_tour,
    stab_polygon,
    stab_segments,
    stab_union,
    sum_sqrt_lt,
    tree_stab,
    uncross,
    uncross_traced,
)
from helpers import general_points

getcontext().prec = 60


def sampled_max_crossings(segments, lines=20000, seed=0):
    """Oracle: max proper crossings over random integer lines (exact int64 arithmetic)."""
    pts = np.array([[float(c) for p in s for c in p] for s in segments])
    den = math.lcm(*(Fraction(c).denominator for s in segments for p in s for c in p))
    P = np.array([[int(Fraction(c) * den) for p in s for c in p] for s in segments], dtype=object)
    rng = np.random.default_rng(seed)
    lo, hi = pts.min(), pts.max()
    span = int((hi - lo) * den) + 1
    base = int(lo * den)
    best = 0
    for _ in range(lines):
        a, b = (int(v) for v in rng.integers(-1000, 1000, 2))
        if a == 0 and b == 0:
            continue
        c = int(rng.integers(0, 2 * 1000 * span)) + 1000 * base * 2 - 1000 * span
        s1 = a * P[:, 0] + b * P[:, 1] - c
        s2 = a * P[:, 2] + b * P[:, 3] - c
        best = max(best, int(sum(1 for u, v in zip(s1, s2) if u * v < 0)))
    return best


def hull_curve(ps):
    return PolygonalCurve.from_order(convex_hull(ps.coords), ps)


def test_stab_examples():
    assert stab_polygon(hull_curve(gen_convex(9, 2))).value == 2
    assert stab_union(CurveUnion((((0, 0), (1, 1)),))).value == 1
    assert stab_union(CurveUnion((((0, 0), (2, 2)), ((0, 2), (2, 0))))).value == 2


def test_comb_matches_sampling_oracle():
    comb = PolygonalCurve(((0, 0), (6, 0), (6, 4), (4, 1), (2, 4), (0, 1)))
    rep = stab_polygon(comb)
    assert rep.recount() == rep.value
    assert sampled_max_crossings(comb.edges) <= rep.value
    assert rep.value == 4


@given(general_points(3, 9))
def test_polygon_stab_parity_and_witness(ps):
    c = uncross(list(range(ps.n)), ps)
    rep = stab_polygon(c)
    assert rep.value >= 2 and rep.value % 2 == 0
    assert rep.recount() == rep.value


def test_not_simple_is_rejected():
    with pytest.raises(NotSimpleError):
        stab_polygon(PolygonalCurve(((0, 0), (2, 2), (2, 0), (0, 2))))


def test_tree_examples():
    two = PointSet([(0, 0), (1, 1)])
    t = low_stab_spanning_tree(two)
    assert t.edges == ((0, 1),) and tree_stab(t, two).value == 1
    conv = gen_convex(16, 0)
    t = low_stab_spanning_tree(conv)
    assert tree_stab(t, conv).value <= min(15, 24)
    ps = gen_random(256, 0)
    t = low_stab_spanning_tree(ps)
    assert len(t.edges) == 255
    assert tree_stab(t, ps).value <= 96
    with pytest.raises(Exception):
        SpanningTree(((0, 1), (1, 2), (2, 0)), 4)


def test_tour_examples():
    path_ps = PointSet([(0, 0), (1, 3), (2, 1), (3, 4)])
    path = SpanningTree(((0, 1), (1, 2), (2, 3)), 4)
    assert preorder_tour(path, 0, path_ps) == [0, 1, 2, 3]
    star = PointSet([(0, 0), (5, 1), (-1, 4), (-3, -2), (2, -5)])
    tree = SpanningTree(((0, 1), (0, 2), (0, 3), (0, 4)), 5)
    order = preorder_tour(tree, 0, star)
    ang = lambda i: math.atan2(float(star.coords[i][1]), float(star.coords[i][0])) % (2 * math.pi)  # noqa: E731
    assert order[0] == 0 and order[1:] == sorted(order[1:], key=ang)


@given(general_points(3, 12), st.integers(0, 11))
def test_tour_is_permutation(ps, root):
    t = low_stab_spanning_tree(ps)
    assert sorted(preorder_tour(t, root % ps.n, ps)) == list(range(ps.n))


def _length(order, ps):
    total = Decimal(0)
    for k in range(len(order)):
        (x0, y0), (x1, y1) = ps.coords[order[k - 1]], ps.coords[order[k]]
        d2 = (x1 - x0) ** 2 + (y1 - y0) ** 2
        total += (Decimal(d2.numerator) / Decimal(d2.denominator)).sqrt()
    return total


def test_uncross_examples():
    sq = PointSet([(0, 0), (4, 0), (4, 4), (0, 4)])
    assert uncross([0, 1, 2, 3], sq).ids == (0, 1, 2, 3)
    bowtie = uncross([0, 2, 1, 3], sq)
    assert is_simple(bowtie) and stab_polygon(bowtie).value == 2
    rng = random.Random(1)
    ps = gen_random(12, 9)
    for _ in range(30):
        order = list(range(12))
        rng.shuffle(order)
        tr = uncross_traced(order, ps, check_stab=True)
        assert is_simple(tr.curve)
        assert all(a >= b for a, b in zip(tr.stabs, tr.stabs[1:]))
        assert _length(list(tr.curve.ids), ps) <= _length(order, ps)


def test_sum_sqrt_exact():
    assert sum_sqrt_lt(1, 1, 9, 0)  # 2 < 3
    assert not sum_sqrt_lt(1, 4, 9, 0)  # 3 == 3
    assert sum_sqrt_lt(2, 2, 8, 1)  # 2.828 < 3.828


def test_glue_examples():
    t1 = PointSet([(0, 0), (2, 0), (1, 2), (5, 0), (7, 0), (6, 2)])
    p = PolygonalCurve.from_order([0, 1, 2], t1)
    q = PolygonalCurve.from_order([3, 4, 5], t1)
    g = glue_pair(p, q, t1)
    assert is_simple(g) and g.member_ids == frozenset(range(6)) and stab_polygon(g).value <= 6
    aux = PolygonalCurve(((20, 20), (22, 20), (21, 23)))
    g = glue_pair(p, aux)
    assert g.member_ids == frozenset({0, 1, 2}) and is_simple(g)
    assert stab_polygon(glue_many([p, q], t1)).value == stab_polygon(glue_pair(p, q, t1)).value


def test_glue_quadrilaterals():
    quads = PointSet([(0, 0), (3, 0), (3, 3), (0, 3), (5, 1), (8, 0), (9, 3), (6, 4)])
    p = PolygonalCurve.from_order([0, 1, 2, 3], quads)
    q = PolygonalCurve.from_order([4, 5, 6, 7], quads)
    g = glue_pair(p, q, quads)
    assert is_simple(g) and stab_polygon(g).value <= 6


def _square(x, y, s=2):
    return [(x, y), (x + s, y), (x + s, y + s), (x, y + s)]


def test_glue_many_corners():
    coords = _square(0, 0) + _square(20, 0) + _square(20, 20) + _square(0, 20)
    ps = PointSet(coords)
    curves = [PolygonalCurve.from_order(range(4 * k, 4 * k + 4), ps) for k in range(4)]
    g = glue_many(curves, ps)
    assert is_simple(g) and g.member_ids == frozenset(range(16))


@st.composite
def separable_pair(draw):
    ps = draw(general_points(3, 6, span=1000))
    qs = draw(general_points(3, 6, span=1000))
    dx = draw(st.integers(2001, 5000))
    dy = draw(st.integers(-3000, 3000))
    a = uncross(list(range(ps.n)), ps)
    b = uncross(list(range(qs.n)), qs)
    moved = PolygonalCurve(tuple((x + dx, y + dy) for x, y in b.vertices))
    return a, moved


@given(separable_pair())
def test_glue_invariants(pair):
    p, q = pair
    g = glue_pair(p, q)
    assert is_simple(g)
    assert g.member_ids == p.member_ids | q.member_ids
    assert stab_polygon(g).value <= stab_polygon(p).value + stab_polygon(q).value + 2


def test_degree_examples():
    assert degree_exact(gen_convex(6, 0)).value == 2
    tri = PointSet([(0, 0), (10, 0), (0, 10), (2, 3)])
    res = degree_exact(tri)
    assert res.value == 4 and res.exact
    grid = degree_exact(gen_perturbed_grid(3, 3, 0))
    assert grid.value >= 3
    assert degree_upper(gen_convex(15, 0)).value == 2
    for side in (7, 10):
        g = gen_perturbed_grid(side, side, 0)
        assert degree_upper(g).value <= 6 * side


@given(general_points(4, 7))
def test_degree_upper_dominates_exact(ps):
    ex = degree_exact(ps)
    up = degree_upper(ps)
    assert up.value >= ex.value
    for res in (ex, up):
        assert is_simple(res.witness)
        assert res.witness.member_ids == frozenset(range(ps.n))
        assert stab_polygon(res.witness).value == res.value


def test_segments_engine_handles_collinear_vertices():
    segs = [((0, 0), (1, 0)), ((1, 0), (2, 0)), ((2, 0), (2, 1))]
    rep = stab_segments(segs)
    assert rep.value == 2 and rep.recount() == 2
    assert sampled_max_crossings(segs, 5000) <= 2
