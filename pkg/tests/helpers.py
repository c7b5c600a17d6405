"""Shared strategies and brute-force oracles."""

from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from equisep.geom import PointSet, check_general_position, cross


def general_points(min_size=3, max_size=8, span=10**4):
    coords = st.tuples(st.integers(-span, span), st.integers(-span, span))
    return (
        st.lists(coords, min_size=min_size, max_size=max_size, unique=True)
        .filter(lambda pts: check_general_position(pts) is None)
        .map(PointSet)
    )


def in_convex_position(pts):
    """Oracle: no point lies inside a triangle of three others."""
    for a, b, c in combinations(range(len(pts)), 3):
        s = cross(pts[a], pts[b], pts[c])
        for d in range(len(pts)):
            if d in (a, b, c):
                continue
            s1 = cross(pts[a], pts[b], pts[d])
            s2 = cross(pts[b], pts[c], pts[d])
            s3 = cross(pts[c], pts[a], pts[d])
            if (s > 0 and s1 > 0 and s2 > 0 and s3 > 0) or (s < 0 and s1 < 0 and s2 < 0 and s3 < 0):
                return False
    return True


def _in_triangle(p, a, b, c):
    s1, s2, s3 = cross(a, b, p), cross(b, c, p), cross(c, a, p)
    return (s1 > 0 and s2 > 0 and s3 > 0) or (s1 < 0 and s2 < 0 and s3 < 0)


def _cross_proper(p1, p2, p3, p4):
    d1, d2 = cross(p3, p4, p1), cross(p3, p4, p2)
    d3, d4 = cross(p1, p2, p3), cross(p1, p2, p4)
    return d1 * d2 < 0 and d3 * d4 < 0


def hulls_disjoint(a, b):
    """Oracle for general-position sets: hulls meet iff two segments cross or a point sits in a triangle."""
    for p, q_ in combinations(a, 2):
        for r, s in combinations(b, 2):
            if _cross_proper(p, q_, r, s):
                return False
    for one, other in ((a, b), (b, a)):
        for tri in combinations(other, 3):
            if any(_in_triangle(p, *tri) for p in one):
                return False
    return True


def separable_by_hulls(pts, subset):
    a = [pts[i] for i in subset]
    b = [pts[i] for i in range(len(pts)) if i not in subset]
    if not a or not b:
        return True
    return hulls_disjoint(a, b)


def q(x):
    return Fraction(x)


# lines printed by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE: list[str] = []
