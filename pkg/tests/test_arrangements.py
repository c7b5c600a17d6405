import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from equisep.arrangements import (
    Arrangement,
    bounded_cell_arrangement,
    classify,
    cut_number_exact,
    cutting_arrangement,
    equal_separation_check,
    halving_line,
    make_simple,
    max_cell,
    median_line,
    partial_cutting,
)
from equisep.generators import gen_convex, gen_random
from equisep.geom import ConcreteLine, PointSet, enumerate_bipartitions
from helpers import general_points

F = Fraction


def L(a, b, c):
    return ConcreteLine(F(a), F(b), F(c))


def test_classify_examples():
    ps = PointSet([(0, 0), (1, 0), (5, 0), (6, 1)])
    ca = classify(ps, Arrangement((L(1, 0, 3),)))
    assert ca.occupied == 2 and sum(len(v) for v in ca.cells.values()) == 4
    assert max_cell(ca) == 2
    assert max_cell(classify(ps, Arrangement((L(1, 0, -3),)))) == 4
    assert max_cell(classify(PointSet(), Arrangement((L(1, 0, 0),)))) == 0


def test_simple_three_lines_make_at_most_seven_cells():
    ps = gen_random(300, 1)
    arr = Arrangement((L(1, 0, F(1, 2)), L(0, 1, F(1, 2)), L(1, 1, F(3, 4))))
    assert arr.simple
    assert classify(ps, arr).occupied <= 7


def _oracle_cut2(ps):
    n = ps.n
    full = (1 << n) - 1
    masks = [sum(1 << i for i in b.positive) for b in enumerate_bipartitions(ps)]
    best = n
    for m1 in masks:
        best = min(best, max(bin(m1).count("1"), bin(full ^ m1).count("1")))
    for m1, m2 in combinations(masks, 2):
        cells = [m1 & m2, m1 & ~m2 & full, ~m1 & m2 & full, ~m1 & ~m2 & full]
        best = min(best, max(bin(c).count("1") for c in cells))
    return best


def test_exact_search_examples():
    res = cut_number_exact(gen_convex(12, 0), 2)
    assert res.value == 3 and res.exhaustive
    for seed in range(3):
        ps = gen_random(8, seed)
        assert cut_number_exact(ps, 2).value == _oracle_cut2(ps)
        assert cut_number_exact(ps, 2, prune=False).value == _oracle_cut2(ps)
    for n in (1, 5, 9, 14):
        assert cut_number_exact(gen_random(n, n), 1).value == math.ceil(n / 2)


def test_budget_is_reported():
    res = cut_number_exact(gen_random(12, 0), 3, budget=50)
    assert not res.exhaustive
    assert max_cell(classify(gen_random(12, 0), res.witness)) == res.value


@given(general_points(3, 8))
def test_search_monotonicity(ps):
    c1 = cut_number_exact(ps, 1)
    c2 = cut_number_exact(ps, 2)
    assert c2.value <= c1.value
    assert c2.value <= math.ceil(ps.n / 4)
    sub = ps.subset(range(ps.n - 1))
    assert cut_number_exact(sub, 2).value <= c2.value
    assert c2.witness.simple


def test_halving_examples():
    A = [(-3, 0), (-2, 5), (-4, -2), (-1, 1)]
    B = [(1, 0), (2, 3), (3, -1), (4, 2)]
    ps = PointSet(A + B)
    a, b = range(4), range(4, 8)
    line = halving_line(a, b, ps, 4)
    assert all(line.side(p) > 0 for p in ps.coords)
    line = halving_line(a, b, ps, 1)
    assert sum(line.side(ps.coords[i]) > 0 for i in a) == 1
    assert sum(line.side(ps.coords[i]) > 0 for i in b) == 1


side_pts = st.lists(st.tuples(st.integers(1, 10**4), st.integers(-(10**4), 10**4)), min_size=1, max_size=7, unique=True)


@given(side_pts, side_pts)
def test_halving_recount(left, right):
    from equisep.geom import check_general_position
    from hypothesis import assume

    pts = [(-x, y) for x, y in left] + list(right)
    assume(check_general_position(pts) is None)
    ps = PointSet(pts)
    A, B = range(len(left)), range(len(left), len(pts))
    for r in range(1, min(len(left), len(right)) + 1):
        line = halving_line(A, B, ps, r)
        assert line.avoids(ps.coords)
        assert sum(line.side(ps.coords[i]) > 0 for i in A) == r
        assert sum(line.side(ps.coords[i]) > 0 for i in B) == r


def test_median_line_splits():
    ps = gen_random(11, 4)
    line = median_line(ps)
    assert sum(line.side(p) > 0 for p in ps.coords) == 5


def test_bounded_cell_examples():
    ps = gen_random(200, 2)
    arr = bounded_cell_arrangement(ps, 10)
    assert arr.K == 10 and max_cell(classify(ps, arr)) <= 10
    assert bounded_cell_arrangement(gen_random(10, 1), 5).K == 1
    for K in (2, 3, 7):
        arr = cutting_arrangement(ps, K)
        assert arr.K == K and arr.simple
        assert max_cell(classify(ps, arr)) <= math.ceil(200 / (2 * K))
        assert classify(ps, arr).occupied <= (K * K + K + 2) // 2


def test_partial_cutting_examples():
    ps = gen_random(120, 6)
    pc = partial_cutting(ps, 5, 2)
    assert len(pc.carved) == 2
    pc = partial_cutting(ps, 6, 5)
    assert len(pc.carved) == 8
    seen = set()
    for cell in pc.carved:
        assert len(cell.members) == 6
        assert pc.evaluate(cell, ps) == cell.members
        assert not seen & set(cell.members)
        seen |= set(cell.members)
    with pytest.raises(ValueError, match="max feasible L"):
        partial_cutting(ps, 20, 5)


def test_make_simple_examples():
    ps = gen_random(30, 3)
    arr = cutting_arrangement(ps, 3)
    assert make_simple(arr, ps) is arr
    par = Arrangement((L(1, 0, F(1, 3)), L(1, 0, F(2, 3)), L(0, 1, F(1, 2))))
    fixed = make_simple(par, ps)
    assert fixed.simple and classify(ps, fixed).sign_vectors == classify(ps, par).sign_vectors
    conc = Arrangement((L(1, 0, F(1, 2)), L(0, 1, F(1, 2)), L(1, 1, 1)))
    assert not conc.simple
    fixed = make_simple(conc, ps)
    assert fixed.simple and classify(ps, fixed).sign_vectors == classify(ps, conc).sign_vectors


def test_equal_separation_examples():
    ps = gen_random(9, 0)
    v = equal_separation_check(ps, 2, 1)
    assert v.threshold == 3
    assert v.verdict == (cut_number_exact(ps, 2).value <= 3)
    v = equal_separation_check(gen_convex(12, 0), 2, 1)
    assert v.threshold == 3 and v.verdict is True
    assert max_cell(classify(gen_convex(12, 0), v.witness)) <= 3
    assert equal_separation_check(ps, 2, ps.n).verdict is True
