"""Exact planar primitives.

Every coordinate is a :class:`fractions.Fraction`; there is no floating-point
path through this module.  Points sets are scaled to a common denominator
when bulk predicates are needed, and the scaled integers are pushed through
numpy as ``int64`` only when their magnitude makes that overflow-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction
Coord = tuple[Fraction, Fraction]

# |coordinate| below this keeps every cross product of differences in int64.
_INT64_COORD_LIMIT = 2**30


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


class NotSeparableError(GeometryError):
    pass


def to_rational(value) -> Fraction:
    """Convert ``value`` exactly; strings may be decimals ("0.125") or "p/q"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError("floats are rejected; pass coordinates as strings or Fractions")
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Point:
    x: Fraction
    y: Fraction
    id: int = -1

    @property
    def xy(self) -> Coord:
        return (self.x, self.y)


def _xy(p) -> Coord:
    if isinstance(p, Point):
        return p.x, p.y
    return p[0], p[1]


class PointSet:
    """An immutable, duplicate-free, ordered set of exact planar points.

    Ids are the positions ``0..N-1``.  General position is *not* enforced here
    (use :func:`check_general_position`), but duplicates are rejected.
    """

    __slots__ = ("points", "__dict__")

    def __init__(self, coords: Iterable = ()):
        pts = []
        seen: dict[Coord, int] = {}
        for i, c in enumerate(coords):
            if isinstance(c, Point):
                x, y = c.x, c.y
            else:
                x, y = to_rational(c[0]), to_rational(c[1])
            if (x, y) in seen:
                raise GeometryError(f"duplicate point: ids {seen[(x, y)]} and {i} at ({x}, {y})")
            seen[(x, y)] = i
            pts.append(Point(x, y, i))
        self.points: tuple[Point, ...] = tuple(pts)

    @property
    def n(self) -> int:
        return len(self.points)

    N = n

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"PointSet(n={self.n})"

    @cached_property
    def coords(self) -> tuple[Coord, ...]:
        return tuple(p.xy for p in self.points)

    @cached_property
    def scaled(self) -> tuple[list[int], list[int], int]:
        """Integer coordinates over the common denominator ``D``."""
        return scale_to_ints(self.coords)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Scaled coordinates as numpy arrays (int64 when overflow-safe)."""
        xs, ys, _ = self.scaled
        return int_arrays(xs, ys)

    def subset(self, ids: Iterable[int]) -> "PointSet":
        return PointSet(self.points[i].xy for i in ids)


def scale_to_ints(coords: Sequence[Coord]) -> tuple[list[int], list[int], int]:
    d = 1
    for x, y in coords:
        d = lcm(d, x.denominator, y.denominator)
    xs = [int(x * d) for x, _ in coords]
    ys = [int(y * d) for _, y in coords]
    return xs, ys, d


def int_arrays(xs: Sequence[int], ys: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    big = max((abs(v) for v in (*xs, *ys)), default=0)
    dtype = np.int64 if big < _INT64_COORD_LIMIT else object
    return np.array(xs, dtype=dtype), np.array(ys, dtype=dtype)


class Orientation(IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


def cross(p, q, r) -> Fraction:
    """(q - p) x (r - p)."""
    px, py = _xy(p)
    qx, qy = _xy(q)
    rx, ry = _xy(r)
    return (qx - px) * (ry - py) - (qy - py) * (rx - px)


def orientation(p, q, r) -> Orientation:
    s = cross(p, q, r)
    return Orientation((s > 0) - (s < 0))


def _sgn(v) -> int:
    return (v > 0) - (v < 0)


def check_general_position(points) -> tuple[int, int, int] | None:
    """Return ``None`` if all points are distinct with no collinear triple.

    Otherwise return a witness ``(i, j, k)``.  A duplicate pair ``i, j`` is
    reported in the degenerate form ``(i, j, j)``.  Runs in O(N^2) by hashing
    reduced directions from each base point.
    """
    if isinstance(points, PointSet):
        coords = points.coords
    else:
        coords = [(to_rational(x), to_rational(y)) for x, y in (_xy(p) for p in points)]
    seen: dict[Coord, int] = {}
    for i, c in enumerate(coords):
        if c in seen:
            return (seen[c], i, i)
        seen[c] = i
    n = len(coords)
    if n < 3:
        return None
    xs, ys, _ = scale_to_ints(coords)
    X, Y = int_arrays(xs, ys)
    if X.dtype == np.int64:
        for i in range(n - 2):
            dx = X[i + 1:] - X[i]
            dy = Y[i + 1:] - Y[i]
            g = np.gcd(dx, dy)
            dx //= g
            dy //= g
            flip = (dx < 0) | ((dx == 0) & (dy < 0))
            dx[flip] *= -1
            dy[flip] *= -1
            key = np.stack([dx, dy], axis=1)
            _, first, inverse, counts = np.unique(
                key, axis=0, return_index=True, return_inverse=True, return_counts=True
            )
            inverse = inverse.reshape(-1)
            dup = np.nonzero(counts[inverse] > 1)[0]
            if len(dup):
                j = int(dup[0])
                k = int(dup[1:][inverse[dup[1:]] == inverse[j]][0])
                return (i, i + 1 + j, i + 1 + k)
        return None
    for i in range(n - 2):
        dirs: dict[tuple[int, int], int] = {}
        for j in range(i + 1, n):
            dx, dy = xs[j] - xs[i], ys[j] - ys[i]
            g = gcd(dx, dy)
            dx, dy = dx // g, dy // g
            if dx < 0 or (dx == 0 and dy < 0):
                dx, dy = -dx, -dy
            if (dx, dy) in dirs:
                return (i, dirs[(dx, dy)], j)
            dirs[(dx, dy)] = j
    return None


def require_general_position(ps: PointSet) -> None:
    bad = check_general_position(ps)
    if bad is not None:
        raise GeometryError(f"point set not in general position: {bad}")


@dataclass(frozen=True)
class ConcreteLine:
    """The line ``a*x + b*y = c``; the positive side is ``a*x + b*y > c``."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise GeometryError("degenerate line: a = b = 0")

    def value(self, p) -> Fraction:
        x, y = _xy(p)
        return self.a * x + self.b * y - self.c

    def side(self, p) -> int:
        return _sgn(self.value(p))

    def flipped(self) -> "ConcreteLine":
        return ConcreteLine(-self.a, -self.b, -self.c)

    def avoids(self, points: Iterable) -> bool:
        return all(self.side(p) != 0 for p in points)

    def parallel_to(self, other: "ConcreteLine") -> bool:
        return self.a * other.b - self.b * other.a == 0


@dataclass(frozen=True)
class Bipartition:
    """A two-colouring of point ids realisable by a line.

    ``anchor = (i, j, fi, fj)`` records the line through points ``i`` and
    ``j`` perturbed so that ``i`` lands on the positive side iff ``fi`` (and
    likewise ``j``).  ``("lo", +1)``-style trivial classes use ``anchor=None``.
    """

    positive: frozenset[int]
    negative: frozenset[int]
    anchor: tuple[int, int, bool, bool] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.positive & self.negative:
            raise GeometryError("bipartition sides overlap")

    def complement(self) -> "Bipartition":
        anchor = None
        if self.anchor is not None:
            i, j, fi, fj = self.anchor
            anchor = (j, i, not fj, not fi)
        return Bipartition(self.negative, self.positive, anchor)

    def side(self, i: int) -> int:
        return 1 if i in self.positive else -1

    @property
    def mask(self) -> int:
        return ids_to_mask(self.positive)


def ids_to_mask(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def mask_to_ids(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _pack_rows(rows: np.ndarray) -> list[int]:
    packed = np.packbits(rows.astype(bool), axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def orientation_rows(ps: PointSet, i: int) -> np.ndarray:
    """Matrix ``O[j, k] = cross(p_i, p_j, p_k)`` over scaled integer coordinates."""
    X, Y = ps.arrays
    dx = X - X[i]
    dy = Y - Y[i]
    return np.outer(dx, dy) - np.outer(dy, dx)


def bipartition_masks(ps: PointSet) -> dict[int, tuple[int, int, bool, bool] | None]:
    """All line-realisable positive-side masks, each with a realising anchor.

    For every pair ``i < j`` the line through them is perturbed in all four
    ways of placing ``i`` and ``j``, in both orientations (so the result is
    closed under complement); the two trivial classes come from lines
    missing the whole set.  Iteration order (and therefore which anchor is
    kept for a mask) is lexicographic in ``(i, j, fi, fj)``.
    """
    n = ps.n
    full = (1 << n) - 1
    out: dict[int, tuple[int, int, bool, bool] | None] = {0: None, full: None}
    for i in range(n - 1):
        O = orientation_rows(ps, i)
        rows = _pack_rows(O[i + 1:] > 0)
        bi = 1 << i
        for off, base in enumerate(rows):
            j = i + 1 + off
            bj = 1 << j
            for fi in (False, True):
                for fj in (False, True):
                    m = base | (bi if fi else 0) | (bj if fj else 0)
                    if m not in out:
                        out[m] = (i, j, fi, fj)
                    if full ^ m not in out:
                        out[full ^ m] = (j, i, not fj, not fi)
    return out


def enumerate_bipartitions(ps: PointSet) -> list[Bipartition]:
    """Every linearly realisable ordered bipartition of ``ps``, deduplicated."""
    full = frozenset(range(ps.n))
    out = []
    for m, anchor in bipartition_masks(ps).items():
        pos = frozenset(mask_to_ids(m))
        out.append(Bipartition(pos, full - pos, anchor))
    return out


def _anchored_line(ps: PointSet, anchor: tuple[int, int, bool, bool]) -> ConcreteLine:
    i, j, fi, fj = anchor
    (xi, yi), (xj, yj) = ps.coords[i], ps.coords[j]
    dx, dy = xj - xi, yj - yi
    a, b = -dy, dx
    c = a * xi + b * yi
    norm2 = dx * dx + dy * dy
    si = 1 if fi else -1
    sj = 1 if fj else -1
    # Perturbation g'(p) = g(p) + eps * (si + (sj - si) * lam(p)), lam = 0 at i, 1 at j.
    eps = None
    for k, (xk, yk) in enumerate(ps.coords):
        if k == i or k == j:
            continue
        g = a * xk + b * yk - c
        lam = ((xk - xi) * dx + (yk - yi) * dy) / norm2
        bound = abs(g) / (1 + 2 * abs(lam))
        if eps is None or bound < eps:
            eps = bound
    eps = Fraction(1) if eps is None else eps / 2
    # lam(p) is affine: lam = (dx*x + dy*y - (dx*xi + dy*yi)) / norm2
    k1 = eps * (sj - si) / norm2
    a2 = a + k1 * dx
    b2 = b + k1 * dy
    c2 = c - eps * si + k1 * (dx * xi + dy * yi)
    return ConcreteLine(a2, b2, c2)


def realize_line(b: Bipartition, ps: PointSet) -> ConcreteLine:
    """An exact line with ``b.positive`` strictly above and ``b.negative`` strictly below."""
    if b.positive | b.negative != frozenset(range(ps.n)):
        raise GeometryError("bipartition does not cover the point set")
    if ps.n == 0 or not b.negative or not b.positive:
        ymin = min((y for _, y in ps.coords), default=Fraction(0))
        line = ConcreteLine(Fraction(0), Fraction(1), ymin - 1)
        if not b.positive:
            line = line.flipped()
    else:
        anchor = b.anchor
        if anchor is None:
            anchor = bipartition_masks(ps).get(b.mask, "missing")
            if anchor == "missing":
                raise NotSeparableError("not linearly separable")
        line = _anchored_line(ps, anchor)
    for k, c in enumerate(ps.coords):
        if line.side(c) != b.side(k):
            raise NotSeparableError("not linearly separable")
    return line


@dataclass(frozen=True)
class Segment:
    p: Coord
    q: Coord

    def __post_init__(self):
        if tuple(self.p) == tuple(self.q):
            raise GeometryError("segment endpoints coincide")


def _seg(s) -> tuple[Coord, Coord]:
    if isinstance(s, Segment):
        return s.p, s.q
    return s[0], s[1]


def segments_properly_cross(s1, s2) -> bool:
    a, b = _seg(s1)
    c, d = _seg(s2)
    o1, o2 = _sgn(cross(a, b, c)), _sgn(cross(a, b, d))
    o3, o4 = _sgn(cross(c, d, a)), _sgn(cross(c, d, b))
    return o1 * o2 < 0 and o3 * o4 < 0


def _on_segment(a, b, p) -> bool:
    """p collinear with ab is assumed; test it lies within the closed box."""
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(s1, s2) -> bool:
    """Closed-segment intersection (touching counts)."""
    a, b = _seg(s1)
    c, d = _seg(s2)
    o1, o2 = _sgn(cross(a, b, c)), _sgn(cross(a, b, d))
    o3, o4 = _sgn(cross(c, d, a)), _sgn(cross(c, d, b))
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def convex_hull(coords: Sequence[Coord]) -> list[int]:
    """Indices of strict hull vertices in counter-clockwise order (monotone chain)."""
    order = sorted(range(len(coords)), key=lambda i: coords[i])
    uniq = []
    for i in order:
        if not uniq or coords[uniq[-1]] != coords[i]:
            uniq.append(i)
    if len(uniq) <= 2:
        return uniq

    def half(seq):
        h: list[int] = []
        for i in seq:
            while len(h) >= 2 and cross(coords[h[-2]], coords[h[-1]], coords[i]) <= 0:
                h.pop()
            h.append(i)
        return h

    lower = half(uniq)
    upper = half(reversed(uniq))
    return lower[:-1] + upper[:-1]


def separating_line(pts_a: Sequence, pts_b: Sequence) -> ConcreteLine | None:
    """A line with every point of ``pts_a`` strictly positive, ``pts_b`` strictly negative.

    Returns ``None`` when no such line exists.  Uses separating axes taken
    from hull edges (plus pairwise directions when a hull is degenerate).
    """
    A = [_xy(p) for p in pts_a]
    B = [_xy(p) for p in pts_b]
    if not A or not B:
        pts = A or B
        ymin = min((y for _, y in pts), default=Fraction(0))
        line = ConcreteLine(Fraction(0), Fraction(1), ymin - 1)
        return line if A else line.flipped()
    ha = [A[i] for i in convex_hull(A)]
    hb = [B[i] for i in convex_hull(B)]
    axes = []
    for h in (ha, hb):
        for k in range(len(h)):
            p, q = h[k], h[(k + 1) % len(h)]
            if p != q:
                axes.append((q[1] - p[1], p[0] - q[0]))
    if len(ha) <= 2 or len(hb) <= 2:
        for p in ha:
            for q in hb:
                axes.append((p[0] - q[0], p[1] - q[1]))
        for h in (ha, hb):
            if len(h) == 2:
                axes.append((h[1][0] - h[0][0], h[1][1] - h[0][1]))
    for nx, ny in axes:
        if nx == 0 and ny == 0:
            continue
        pa = [nx * x + ny * y for x, y in ha]
        pb = [nx * x + ny * y for x, y in hb]
        if min(pa) > max(pb):
            return ConcreteLine(nx, ny, (min(pa) + max(pb)) / 2)
        if max(pa) < min(pb):
            return ConcreteLine(-nx, -ny, -(max(pa) + min(pb)) / 2)
    return None


def halfturn_cmp(u: tuple, v: tuple) -> int:
    """Order directions normalised into the half-turn [0, pi) by angle."""
    c = u[0] * v[1] - u[1] * v[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def upper_normalize(dx, dy) -> tuple[tuple, int]:
    """Map a direction into [0, pi); returns (direction, +1 if unchanged else -1)."""
    if dy < 0 or (dy == 0 and dx < 0):
        return (-dx, -dy), -1
    return (dx, dy), 1


def angle_key_full(dx, dy):
    """Exact sort key for the full-turn angle of a nonzero vector in [0, 2*pi)."""
    if dy > 0 or (dy == 0 and dx > 0):
        half = 0
    else:
        half = 1
        dx, dy = -dx, -dy
    # within a half-turn: angle increases as cot = dx/dy decreases; dy == 0 first
    if dy == 0:
        return (half, 0, Fraction(0))
    return (half, 1, Fraction(-dx) / dy)
