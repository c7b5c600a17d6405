"""Stabbing numbers of polygons and segment unions, and the curves built from them."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .geom import (
    Bipartition,
    Coord,
    GeometryError,
    PointSet,
    bipartition_masks,
    check_general_position,
    convex_hull,
    cross,
    int_arrays,
    scale_to_ints,
    segments_intersect,
    separating_line,
    to_rational,
    upper_normalize,
)


class NotSimpleError(GeometryError):
    pass


class StabIncreaseError(AssertionError):
    """A 2-opt swap raised the stabbing number; carries the offending orders."""

    def __init__(self, before: list[int], after: list[int], stab_before: int, stab_after: int):
        super().__init__(f"uncross step raised stab from {stab_before} to {stab_after}")
        self.before, self.after = before, after
        self.stab_before, self.stab_after = stab_before, stab_after


# ---------------------------------------------------------------------- types


@dataclass(frozen=True)
class PolygonalCurve:
    """A closed polygon; ``ids[k]`` is the point id at vertex ``k`` or ``None``."""

    vertices: tuple[Coord, ...]
    ids: tuple[int | None, ...] = ()

    def __post_init__(self):
        verts = tuple((to_rational(x), to_rational(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not self.ids:
            object.__setattr__(self, "ids", (None,) * len(verts))
        if len(self.ids) != len(verts):
            raise GeometryError("ids must align with vertices")
        if len(verts) < 3:
            raise GeometryError("a closed curve needs at least 3 vertices")

    @classmethod
    def from_order(cls, order: Sequence[int], ps: PointSet) -> "PolygonalCurve":
        return cls(tuple(ps.coords[i] for i in order), tuple(order))

    @property
    def member_ids(self) -> frozenset[int]:
        return frozenset(i for i in self.ids if i is not None)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> list[tuple[Coord, Coord]]:
        v = self.vertices
        return [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]

    def length2_terms(self) -> list[Fraction]:
        return [(q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2 for p, q in self.edges]


@dataclass(frozen=True)
class CurveUnion:
    segments: tuple[tuple[Coord, Coord], ...]

    def __post_init__(self):
        segs = tuple(
            ((to_rational(p[0]), to_rational(p[1])), (to_rational(q[0]), to_rational(q[1]))) for p, q in self.segments
        )
        object.__setattr__(self, "segments", segs)

    @classmethod
    def of(cls, *parts) -> "CurveUnion":
        segs = []
        for part in parts:
            if isinstance(part, PolygonalCurve):
                segs.extend(part.edges)
            elif isinstance(part, CurveUnion):
                segs.extend(part.segments)
            else:
                segs.extend(part)
        return cls(tuple(segs))


@dataclass(frozen=True)
class SpanningTree:
    edges: tuple[tuple[int, int], ...]
    n: int

    def __post_init__(self):
        if len(self.edges) != max(self.n - 1, 0):
            raise GeometryError(f"tree on {self.n} vertices needs {self.n - 1} edges, got {len(self.edges)}")
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                raise GeometryError("edge set contains a cycle")
            parent[ru] = rv

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


@dataclass(frozen=True)
class StabReport:
    """``witness`` two-colours ``points``; a generic line realising it crosses ``value`` segments."""

    value: int
    witness: Bipartition
    points: tuple[Coord, ...]
    edges: tuple[tuple[int, int], ...]

    def recount(self) -> int:
        return sum(1 for u, v in self.edges if self.witness.side(u) != self.witness.side(v))


@dataclass(frozen=True)
class DegreeResult:
    value: int
    witness: PolygonalCurve
    exact: bool


# ----------------------------------------------------------------- simplicity


def _bbox_candidates(segs: list[tuple[Coord, Coord]]) -> list[tuple[int, int]]:
    """Pairs of segments whose closed bounding boxes meet (exact integer test)."""
    if len(segs) < 2:
        return []
    xs, ys, _ = scale_to_ints([c for seg in segs for c in seg])
    X, Y = int_arrays(xs, ys)
    x0, x1 = X[0::2], X[1::2]
    y0, y1 = Y[0::2], Y[1::2]
    lo_x, hi_x = np.minimum(x0, x1), np.maximum(x0, x1)
    lo_y, hi_y = np.minimum(y0, y1), np.maximum(y0, y1)
    ox = (lo_x[:, None] <= hi_x[None, :]) & (lo_x[None, :] <= hi_x[:, None])
    oy = (lo_y[:, None] <= hi_y[None, :]) & (lo_y[None, :] <= hi_y[:, None])
    i, j = np.nonzero(np.triu(ox & oy, 1))
    return list(zip(i.tolist(), j.tolist()))


def simplicity_violation(vertices: Sequence[Coord]) -> tuple[int, int] | None:
    """First offending edge pair of a closed polygon, or ``None`` if it is simple.

    Adjacent edges may only share their common endpoint; non-adjacent edges
    may not meet at all.  Edge ``k`` joins vertex ``k`` to ``k + 1``.
    """
    n = len(vertices)
    if n < 3:
        return (0, 0)
    segs = [(vertices[k], vertices[(k + 1) % n]) for k in range(n)]
    for k, (p, q) in enumerate(segs):
        if p == q:
            return (k, k)
    for k in range(n):
        a, b = segs[k]
        c = segs[(k + 1) % n][1]
        if cross(a, b, c) == 0:
            # collinear consecutive edges must continue forward
            if (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) <= 0:
                return (k, (k + 1) % n)
    if n == 3:
        return None
    for i, j in _bbox_candidates(segs):
        if j == i + 1 or (i == 0 and j == n - 1):
            continue
        if segments_intersect(segs[i], segs[j]):
            return (i, j)
    return None


def is_simple(curve: PolygonalCurve | Sequence[Coord]) -> bool:
    verts = curve.vertices if isinstance(curve, PolygonalCurve) else curve
    return simplicity_violation(verts) is None


# --------------------------------------------------------------- stab engines


def _insertion_fix(items: list, before) -> list:
    for k in range(1, len(items)):
        cur = items[k]
        j = k - 1
        while j >= 0 and before(cur, items[j]):
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = cur
    return items


def _stab_sweep(xs: list[int], ys: list[int], edges: list[tuple[int, int]]) -> tuple[int, tuple[int, ...]]:
    """Exact max crossings of a generic line with the segments, plus its sign vector.

    Any generic line can be moved until it touches a vertex ``a`` and then
    turned about ``a`` until it touches more; the points then on the line are
    split into a prefix and a suffix by the original line.  So it suffices to
    sweep directions around each anchor and, at each critical direction, try
    every prefix/suffix split of the collinear group.  Collinear vertices are
    handled exactly.
    """
    V = len(xs)
    inc: list[list[int]] = [[] for _ in range(V)]
    for e, (u, v) in enumerate(edges):
        inc[u].append(e)
        inc[v].append(e)
    best = 0
    best_signs = tuple([1] * V)
    if not edges:
        return best, best_signs
    for a in range(V):
        ax, ay = xs[a], ys[a]
        s = [0] * V
        dirs = []
        for b in range(V):
            if b == a:
                continue
            dx, dy = xs[b] - ax, ys[b] - ay
            s[b] = (1 if dy > 0 else -1) if dy != 0 else (1 if dx > 0 else -1)
            (nx, ny), _ = upper_normalize(dx, dy)
            dirs.append((math.atan2(ny, nx), nx, ny, b))
        dirs.sort()
        _insertion_fix(dirs, lambda p, q: p[1] * q[2] - p[2] * q[1] > 0)
        base = 0
        for u, v in edges:
            if u != a and v != a and s[u] != s[v]:
                base += 1
        k = 0
        while k < len(dirs):
            _, nx, ny, _b = dirs[k]
            group = [dirs[k][3]]
            k += 1
            while k < len(dirs) and nx * dirs[k][2] - ny * dirs[k][1] == 0:
                group.append(dirs[k][3])
                k += 1
            zset = [a] + group
            zset.sort(key=lambda p: nx * (xs[p] - ax) + ny * (ys[p] - ay))
            touched = sorted({e for p in zset for e in inc[p]})
            other = base
            for e in touched:
                u, v = edges[e]
                if u != a and v != a and s[u] != s[v]:
                    other -= 1
            saved = {p: s[p] for p in zset}
            for t in range(len(zset) + 1):
                for sa in (1, -1):
                    for idx, p in enumerate(zset):
                        s[p] = sa if idx < t else -sa
                    cnt = other
                    for e in touched:
                        u, v = edges[e]
                        if s[u] != s[v]:
                            cnt += 1
                    if cnt > best:
                        best = cnt
                        best_signs = tuple(s)
            for p, val in saved.items():
                s[p] = val
            gset = set(group)
            gedges = sorted({e for p in group for e in inc[p]})
            for e in gedges:
                u, v = edges[e]
                if u != a and v != a and s[u] != s[v]:
                    base -= 1
            for p in gset:
                s[p] = -s[p]
            for e in gedges:
                u, v = edges[e]
                if u != a and v != a and s[u] != s[v]:
                    base += 1
    return best, best_signs


def _index_segments(segments: Iterable[tuple[Coord, Coord]]) -> tuple[list[Coord], list[tuple[int, int]]]:
    index: dict[Coord, int] = {}
    pts: list[Coord] = []
    edges: set[tuple[int, int]] = set()
    for p, q in segments:
        ids = []
        for c in (p, q):
            c = (to_rational(c[0]), to_rational(c[1]))
            if c not in index:
                index[c] = len(pts)
                pts.append(c)
            ids.append(index[c])
        u, v = ids
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return pts, sorted(edges)


def _report(pts, edges, value, signs) -> StabReport:
    pos = frozenset(i for i, sg in enumerate(signs) if sg > 0)
    bip = Bipartition(pos, frozenset(range(len(pts))) - pos)
    rep = StabReport(value, bip, tuple(pts), tuple(edges))
    if rep.recount() != value:
        raise AssertionError("stab witness does not reproduce its value")
    return rep


def stab_segments(segments: Iterable[tuple[Coord, Coord]]) -> StabReport:
    pts, edges = _index_segments(segments)
    xs, ys, _ = scale_to_ints(pts)
    value, signs = _stab_sweep(xs, ys, edges)
    return _report(pts, edges, value, signs)


def stab_polygon(c: PolygonalCurve, *, check: bool = True) -> StabReport:
    """Maximum number of edges a generic line properly crosses."""
    if check:
        bad = simplicity_violation(c.vertices)
        if bad is not None:
            raise NotSimpleError(f"curve is not simple: edges {bad}")
    return stab_segments(c.edges)


def stab_union(u: CurveUnion) -> StabReport:
    if not u.segments:
        raise GeometryError("empty union")
    return stab_segments(u.segments)


class BipartitionMatrix:
    """All line classes of a general-position set as a boolean ``L x N`` matrix."""

    def __init__(self, ps: PointSet):
        if check_general_position(ps) is not None:
            raise GeometryError("bipartition matrix needs general position")
        masks = sorted(bipartition_masks(ps))
        self.ps = ps
        self.masks = masks
        nbytes = (ps.n + 7) // 8
        raw = np.frombuffer(b"".join(m.to_bytes(nbytes, "little") for m in masks), dtype=np.uint8)
        bits = np.unpackbits(raw.reshape(len(masks), nbytes), axis=1, bitorder="little")
        self.B = bits[:, : ps.n].astype(bool)

    def crossing_counts(self, edges: Iterable[tuple[int, int]]) -> np.ndarray:
        edges = list(edges)
        cnt = np.zeros(len(self.masks), dtype=np.int64)
        for u, v in edges:
            cnt += self.B[:, u] != self.B[:, v]
        return cnt

    def stab(self, edges: Iterable[tuple[int, int]]) -> tuple[int, int]:
        """(value, row index of the first maximising class)."""
        cnt = self.crossing_counts(edges)
        k = int(cnt.argmax())
        return int(cnt[k]), k

    def report(self, edges: Sequence[tuple[int, int]]) -> StabReport:
        value, k = self.stab(edges)
        row = self.B[k]
        pos = frozenset(int(i) for i in np.nonzero(row)[0])
        bip = Bipartition(pos, frozenset(range(self.ps.n)) - pos)
        rep = StabReport(value, bip, self.ps.coords, tuple(edges))
        if rep.recount() != value:
            raise AssertionError("matrix stab witness mismatch")
        return rep


@lru_cache(maxsize=8)
def bipartition_matrix(ps: PointSet) -> BipartitionMatrix:
    return BipartitionMatrix(ps)


def _cycle_edges(order: Sequence[int]) -> list[tuple[int, int]]:
    return [(order[k], order[(k + 1) % len(order)]) for k in range(len(order))]


# ------------------------------------------------------------ exact lengths


def _sqrt_diff_lt(X: Fraction, Y: Fraction, c: Fraction) -> bool:
    """sqrt(X) - sqrt(Y) < c for X, Y >= 0, exactly."""
    if c >= 0:
        lhs = X - c * c - Y
        return lhs < 0 or lhs * lhs < 4 * c * c * Y
    lhs = Y - c * c - X
    return lhs > 0 and lhs * lhs > 4 * c * c * X


def sum_sqrt_lt(p, q, r, s) -> bool:
    """sqrt(p) + sqrt(q) < sqrt(r) + sqrt(s) for non-negative rationals, exactly."""
    p, q, r, s = (Fraction(v) for v in (p, q, r, s))
    # square both sides: p + q + 2 sqrt(pq) < r + s + 2 sqrt(rs)
    return _sqrt_diff_lt(p * q, r * s, (r + s - p - q) / 2)


def _d2(a, b) -> Fraction:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


# ------------------------------------------------------------ spanning trees


def _sign_matrix(ps: PointSet, max_test_lines: int, seed: int) -> np.ndarray:
    full = (1 << ps.n) - 1
    masks = sorted({m for m in bipartition_masks(ps) if not m & 1 and m not in (0, full)})
    if len(masks) > max_test_lines:
        masks = sorted(random.Random(seed).sample(masks, max_test_lines))
    if not masks:
        return np.ones((1, ps.n))
    nbytes = (ps.n + 7) // 8
    raw = np.frombuffer(b"".join(m.to_bytes(nbytes, "little") for m in masks), dtype=np.uint8)
    bits = np.unpackbits(raw.reshape(len(masks), nbytes), axis=1, bitorder="little")[:, : ps.n]
    return bits.astype(np.float64) * 2 - 1


def _sq_dists(ps: PointSet) -> np.ndarray:
    """Exact squared distances over the scaled integer coordinates."""
    X, Y = ps.arrays  # int64 only when |coord| < 2^30, so squares cannot overflow
    dx = X[:, None] - X[None, :]
    dy = Y[:, None] - Y[None, :]
    return dx * dx + dy * dy


def low_stab_spanning_tree(
    ps: PointSet, *, max_test_lines: int = 4096, factor: float = 2.0, seed: int = 0
) -> SpanningTree:
    """Spanning tree by iterative reweighting of test lines.

    Each step adds the edge between two components whose crossing weight
    (sum of the weights of test lines separating its endpoints) is least,
    ties going to the shorter edge, then multiplies by ``factor`` the weight
    of every test line the new edge crosses.  Weights only steer the choice;
    the tree's stabbing number is measured exactly afterwards.
    """
    n = ps.n
    if n < 2:
        raise GeometryError("spanning tree needs N >= 2")
    if n == 2:
        return SpanningTree(((0, 1),), 2)
    S = _sign_matrix(ps, max_test_lines, seed)
    w = np.ones(S.shape[0])
    C = (w.sum() - S.T @ (w[:, None] * S)) / 2
    D2 = _sq_dists(ps)
    comp = np.arange(n)
    edges = []
    for _ in range(n - 1):
        cross_mask = comp[:, None] != comp[None, :]
        cross_mask &= np.triu(np.ones((n, n), dtype=bool), 1)
        vals = np.where(cross_mask, C, np.inf)
        best = vals.min()
        cand = np.argwhere(vals == best)
        k = min(range(len(cand)), key=lambda t: (D2[cand[t][0], cand[t][1]], cand[t][0], cand[t][1]))
        i, j = int(cand[k][0]), int(cand[k][1])
        edges.append((i, j))
        crossed = S[:, i] != S[:, j]
        if crossed.any():
            Sm, wm = S[crossed], w[crossed] * (factor - 1)
            C += (wm.sum() - Sm.T @ (wm[:, None] * Sm)) / 2
            w[crossed] *= factor
            top = w.max()
            if top > 1e200:
                w /= top
                C /= top
        comp[comp == comp[j]] = comp[i]
    return SpanningTree(tuple(edges), n)


def tree_stab(tree: SpanningTree, ps: PointSet) -> StabReport:
    """Exact stabbing number of the tree drawn with straight edges."""
    if check_general_position(ps) is None:
        return bipartition_matrix(ps).report(list(tree.edges))
    return stab_segments([(ps.coords[u], ps.coords[v]) for u, v in tree.edges])


def _angle_key(dx, dy):
    if dy > 0 or (dy == 0 and dx > 0):
        return (0, Fraction(-dx, 1) / dy if dy else Fraction(-10**30))
    if dy == 0:
        return (1, Fraction(-10**30))
    return (1, Fraction(dx, 1) / -dy)


def preorder_tour(t: SpanningTree, root: int, ps: PointSet) -> list[int]:
    """Depth-first first-visit order; children go counter-clockwise from the parent edge."""
    if not 0 <= root < t.n:
        raise GeometryError("root out of range")
    adj = t.adjacency()
    xs, ys, _ = ps.scaled
    order = []
    stack = [(root, -1)]
    seen = set()
    while stack:
        v, parent = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        order.append(v)
        if parent < 0:
            ref_dir = (1, 0)
        else:
            ref_dir = (xs[parent] - xs[v], ys[parent] - ys[v])
        kids = [c for c in adj[v] if c != parent]

        def ccw_from_ref(c):
            dx, dy = xs[c] - xs[v], ys[c] - ys[v]
            # rotate so that the reference direction sits at angle 0
            rx, ry = ref_dir
            a = rx * dx + ry * dy
            b = rx * dy - ry * dx
            return _angle_key(a, b)

        kids.sort(key=ccw_from_ref)
        for c in reversed(kids):
            stack.append((c, v))
    if len(order) != t.n:
        raise GeometryError("tree is not connected")
    return order


# ---------------------------------------------------------------- uncrossing


@dataclass
class UncrossTrace:
    curve: PolygonalCurve
    swaps: int
    stabs: list[int] = field(default_factory=list)


def _first_crossing(order: list[int], xs: list[int], ys: list[int]) -> tuple[int, int] | None:
    n = len(order)
    pts = [(xs[i], ys[i]) for i in order]
    segs = [(pts[k], pts[(k + 1) % n]) for k in range(n)]
    for i, j in _bbox_candidates(segs):
        if j == i + 1 or (i == 0 and j == n - 1):
            continue
        if segments_intersect(segs[i], segs[j]):
            return i, j
    return None


def uncross_traced(order: Sequence[int], ps: PointSet, *, check_stab: bool = False, max_swaps: int = 10**6) -> UncrossTrace:
    """2-opt until no two edges meet; each swap is checked to shorten the tour exactly."""
    order = list(order)
    n = len(order)
    if n < 3:
        raise GeometryError("uncross needs N >= 3")
    if len(set(order)) != n:
        raise GeometryError("order repeats a vertex")
    if check_general_position(ps.subset(order)) is not None:
        raise GeometryError("uncross needs the tour's points in general position")
    xs, ys, _ = ps.scaled
    bm = bipartition_matrix(ps) if check_stab else None
    stabs = [bm.stab(_cycle_edges(order))[0]] if bm else []
    swaps = 0
    while True:
        hit = _first_crossing(order, xs, ys)
        if hit is None:
            break
        i, j = hit
        a, b, c, d = order[i], order[i + 1], order[j], order[(j + 1) % n]
        P = lambda v: (xs[v], ys[v])
        if not sum_sqrt_lt(_d2(P(a), P(c)), _d2(P(b), P(d)), _d2(P(a), P(b)), _d2(P(c), P(d))):
            raise AssertionError("2-opt swap did not shorten the tour")
        before = list(order)
        order[i + 1 : j + 1] = reversed(order[i + 1 : j + 1])
        swaps += 1
        if bm is not None:
            s_new = bm.stab(_cycle_edges(order))[0]
            if s_new > stabs[-1]:
                raise StabIncreaseError(before, list(order), stabs[-1], s_new)
            stabs.append(s_new)
        if swaps > max_swaps:
            raise AssertionError("uncross exceeded its swap limit")
    curve = PolygonalCurve.from_order(order, ps)
    if not is_simple(curve):
        raise AssertionError("uncross output is not simple")
    return UncrossTrace(curve, swaps, stabs)


def uncross(order: Sequence[int], ps: PointSet) -> PolygonalCurve:
    return uncross_traced(order, ps).curve


# ------------------------------------------------------------------ gluing


@dataclass
class _Loop:
    verts: list[Coord]
    ids: list[int | None]
    tags: list[int]  # tags[k]: source of edge k -> k + 1; -1 marks a bridge

    @property
    def edges(self):
        n = len(self.verts)
        return [(self.verts[k], self.verts[(k + 1) % n]) for k in range(n)]


def _closest_on_segment(p, a, b) -> tuple[Fraction, Fraction]:
    """(squared distance, parameter in [0, 1]) of the point of ab nearest p."""
    ux, uy = b[0] - a[0], b[1] - a[1]
    L2 = ux * ux + uy * uy
    lam = ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / L2
    lam = min(max(lam, Fraction(0)), Fraction(1))
    q = (a[0] + lam * ux, a[1] + lam * uy)
    return _d2(p, q), lam


def _ray_hit(origin, v, edges) -> tuple[Fraction, int, Fraction] | None:
    """First (mu, edge index, edge parameter) where origin + mu*v (mu > 0) meets an edge."""
    best = None
    for k, (a, b) in enumerate(edges):
        ex, ey = b[0] - a[0], b[1] - a[1]
        den = v[0] * ey - v[1] * ex
        if den == 0:
            continue
        wx, wy = a[0] - origin[0], a[1] - origin[1]
        mu = (wx * ey - wy * ex) / den
        lam = (wx * v[1] - wy * v[0]) / den
        if mu > 0 and 0 <= lam <= 1 and (best is None or mu < best[0]):
            best = (mu, k, lam)
    return best


def _segment_clear(x, y, loops: list[_Loop]) -> bool:
    """The segment xy meets the loops at most in its endpoints, never along an edge."""
    for lp in loops:
        for a, b in lp.edges:
            if not segments_intersect((x, y), (a, b)):
                continue
            ok = False
            for end, other in ((x, y), (y, x)):
                if cross(a, b, end) != 0 or not (
                    min(a[0], b[0]) <= end[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= end[1] <= max(a[1], b[1])
                ):
                    continue
                if cross(a, b, other) != 0:
                    ok = True
                else:
                    # collinear: the edge must lie behind ``end``
                    dx, dy = other[0] - end[0], other[1] - end[1]
                    ok = all((p[0] - end[0]) * dx + (p[1] - end[1]) * dy <= 0 for p in (a, b))
                break
            if not ok:
                return False
    return True


def _splice(P: _Loop, s: int, l1: Fraction, l2: Fraction, Q: _Loop, v) -> _Loop | None:
    """Bridge P's edge s (between parameters l1 < l2) to Q along direction v."""
    n = len(P.verts)
    a, b = P.verts[s], P.verts[(s + 1) % n]
    alpha = (a[0] + l1 * (b[0] - a[0]), a[1] + l1 * (b[1] - a[1]))
    beta = (a[0] + l2 * (b[0] - a[0]), a[1] + l2 * (b[1] - a[1]))
    qedges = Q.edges
    ha, hb = _ray_hit(alpha, v, qedges), _ray_hit(beta, v, qedges)
    if ha is None or hb is None:
        return None
    m = len(Q.verts)
    (_, ea, la), (_, eb, lb) = ha, hb
    if la in (0, 1) or lb in (0, 1):
        return None

    def at(e, lam):
        p, q = qedges[e]
        return (p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1]))

    ba, bb = at(ea, la), at(eb, lb)
    # keep the longer way round from ba to bb; the short way lies inside the bridge strip
    if ea == eb:
        if la < lb:
            direction, path = "bwd", [(ea - k) % m for k in range(m)]
        else:
            direction, path = "fwd", [(ea + 1 + k) % m for k in range(m)]
    else:
        fwd = [(ea + 1 + k) % m for k in range((eb - ea) % m)]
        bwd = [(ea - k) % m for k in range((ea - eb) % m)]
        direction, path = ("fwd", fwd) if len(fwd) >= len(bwd) else ("bwd", bwd)
    verts = [beta]
    ids: list[int | None] = [None]
    tags = [P.tags[s]]
    for k in range(1, n + 1):
        idx = (s + k) % n
        verts.append(P.verts[idx])
        ids.append(P.ids[idx])
        tags.append(P.tags[idx] if k < n else P.tags[s])
    verts.append(alpha)
    ids.append(None)
    tags.append(-1)
    verts.append(ba)
    ids.append(None)
    if direction == "fwd":
        tags.append(Q.tags[ea])
        for idx in path:
            verts.append(Q.verts[idx])
            ids.append(Q.ids[idx])
            tags.append(Q.tags[idx])
    else:
        tags.append(Q.tags[ea])
        for idx in path:
            verts.append(Q.verts[idx])
            ids.append(Q.ids[idx])
            tags.append(Q.tags[(idx - 1) % m])
    verts.append(bb)
    ids.append(None)
    tags.append(-1)
    return _Loop(verts, ids, tags)


def _bridge_candidates(P: _Loop, Q: _Loop, allowP, allowQ, limit: int):
    """Closest (vertex, edge) pairs between two loops, nearest first."""
    cands = []
    pe, qe = P.edges, Q.edges
    for s, (a, b) in enumerate(pe):
        if allowP is not None and P.tags[s] not in allowP:
            continue
        for t, q in enumerate(Q.verts):
            if allowQ is not None and Q.tags[t] not in allowQ and Q.tags[t - 1] not in allowQ:
                continue
            d2, lam = _closest_on_segment(q, a, b)
            cands.append((d2, 0, s, t, lam))
    for s, (a, b) in enumerate(qe):
        if allowQ is not None and Q.tags[s] not in allowQ:
            continue
        for t, p in enumerate(P.verts):
            if allowP is not None and P.tags[t] not in allowP and P.tags[t - 1] not in allowP:
                continue
            d2, lam = _closest_on_segment(p, a, b)
            cands.append((d2, 1, s, t, lam))
    cands.sort(key=lambda c: (c[0], c[1], c[2], c[3]))
    return cands[:limit]


def _glue_loops(P: _Loop, Q: _Loop, obstacles: list[_Loop], allowP=None, allowQ=None, accept=None, limit: int = 64) -> _Loop | None:
    members = {i for i in P.ids + Q.ids if i is not None}
    for d2, kind, s, t, lam in _bridge_candidates(P, Q, allowP, allowQ, limit):
        A, B = (P, Q) if kind == 0 else (Q, P)
        a, b = A.edges[s]
        x = (a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1]))
        y = B.verts[t]
        if not _segment_clear(x, y, [P, Q, *obstacles]):
            continue
        v = (y[0] - x[0], y[1] - x[1])
        plans = []
        for side, other, at, lam_at, e_at, dirn in ((A, B, x, lam, s, v), (B, A, y, None, None, (-v[0], -v[1]))):
            n = len(side.verts)
            if lam_at is not None and 0 < lam_at < 1:
                plans.append((side, other, dirn, e_at, 0, lam_at, min(lam_at, 1 - lam_at) / 2))
                continue
            vi = side.verts.index(at)
            plans.append((side, other, dirn, vi, 1, None, Fraction(1, 4)))
            plans.append((side, other, dirn, (vi - 1) % n, -1, None, Fraction(1, 4)))
        for side, other, dirn, edge, mode, centre, tau in plans:
            for _ in range(48):
                if mode == 0:
                    l1, l2 = centre - tau, centre + tau
                elif mode == 1:
                    l1, l2 = tau, 2 * tau
                else:
                    l1, l2 = 1 - 2 * tau, 1 - tau
                out = _splice(side, edge, l1, l2, other, dirn)
                if out is not None and members.issubset(out.ids) and simplicity_violation(out.verts) is None:
                    if _loop_disjoint(out, obstacles) and (accept is None or accept(out)):
                        return out
                tau /= 2
    return None


def _loop_disjoint(lp: _Loop, others: list[_Loop]) -> bool:
    if not others:
        return True
    mine = [e for e, tg in zip(lp.edges, lp.tags) if tg == -1]
    for o in others:
        for e in o.edges:
            for f in mine:
                if segments_intersect(e, f):
                    return False
    return True


def _loop_of(c: PolygonalCurve, tag: int) -> _Loop:
    return _Loop(list(c.vertices), list(c.ids), [tag] * c.n)


def _curve_of(lp: _Loop) -> PolygonalCurve:
    return PolygonalCurve(tuple(lp.verts), tuple(lp.ids))


def glue_pair(p: PolygonalCurve, q: PolygonalCurve, ps: PointSet | None = None) -> PolygonalCurve:
    """One simple polygon through both curves' members, with stab at most stab(p) + stab(q) + 2.

    Two parallel bridges run from a short stretch of ``p`` to ``q`` along the
    direction of the closest pair of boundary points; the stretches between
    the bridges are removed.  The bridge offset is halved until the result
    validates.
    """
    from .geom import NotSeparableError

    if set(p.vertices) & set(q.vertices):
        raise GeometryError("curves share a vertex")
    if separating_line(p.vertices, q.vertices) is None:
        raise NotSeparableError("glue_pair: vertex sets are not linearly separable")
    for c in (p, q):
        if not is_simple(c):
            raise NotSimpleError("glue_pair: input curve is not simple")
    bound = stab_polygon(p, check=False).value + stab_polygon(q, check=False).value + 2
    members = p.member_ids | q.member_ids

    def accept(lp: _Loop) -> bool:
        if frozenset(i for i in lp.ids if i is not None) != members:
            return False
        return stab_segments(lp.edges).value <= bound

    out = _glue_loops(_loop_of(p, 0), _loop_of(q, 1), [], accept=accept)
    if out is None:
        raise GeometryError("glue_pair: no valid bridge found")
    return _curve_of(out)


def _inside_point(c: PolygonalCurve) -> Coord:
    """Vertex centroid; for a non-convex curve fall back to a point near an ear."""
    vs = c.vertices
    cx = sum(x for x, _ in vs) / len(vs)
    cy = sum(y for _, y in vs) / len(vs)
    if _point_in_polygon((cx, cy), vs):
        return (cx, cy)
    for k in range(len(vs)):
        a, b, d = vs[k - 1], vs[k], vs[(k + 1) % len(vs)]
        for w in (Fraction(1, 3), Fraction(1, 10), Fraction(1, 100)):
            p = (b[0] + w * ((a[0] + d[0]) / 2 - b[0]), b[1] + w * ((a[1] + d[1]) / 2 - b[1]))
            if _point_in_polygon(p, vs):
                return p
    return (cx, cy)


def _point_in_polygon(p, vs) -> bool:
    inside = False
    n = len(vs)
    for k in range(n):
        a, b = vs[k], vs[(k + 1) % n]
        if (a[1] > p[1]) != (b[1] > p[1]):
            xint = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if xint == p[0]:
                return False
            if xint > p[0]:
                inside = not inside
    return inside


def glue_many(curves: Sequence[PolygonalCurve], ps: PointSet | None = None) -> PolygonalCurve:
    """Merge pairwise separable curves along a low-stab tree over interior points."""
    curves = list(curves)
    if not curves:
        raise GeometryError("glue_many needs at least one curve")
    if len(curves) == 1:
        return curves[0]
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            if separating_line(curves[i].vertices, curves[j].vertices) is None:
                raise GeometryError(f"glue_many: curves {i} and {j} are not linearly separable")
    if len(curves) == 2:
        return glue_pair(curves[0], curves[1], ps)
    reps = [_inside_point(c) for c in curves]
    seen = set()
    for k, r in enumerate(reps):
        while r in seen:
            r = (r[0] + Fraction(1, 10**12), r[1] + Fraction(1, 10**13))
        seen.add(r)
        reps[k] = r
    tree = low_stab_spanning_tree(PointSet(reps))
    comp = list(range(len(curves)))
    loops: dict[int, _Loop] = {k: _loop_of(c, k) for k, c in enumerate(curves)}
    for i, j in tree.edges:
        ci, cj = comp[i], comp[j]
        others = [lp for key, lp in loops.items() if key not in (ci, cj)]
        out = _glue_loops(loops[ci], loops[cj], others, {i}, {j})
        if out is None:
            out = _glue_loops(loops[ci], loops[cj], others)
        if out is None:
            raise GeometryError(f"glue_many: could not bridge curves {i} and {j}")
        loops[ci] = out
        del loops[cj]
        comp = [ci if c == cj else c for c in comp]
    (final,) = loops.values()
    result = _curve_of(final)
    want = frozenset().union(*(c.member_ids for c in curves))
    if result.member_ids != want or not is_simple(result):
        raise AssertionError("glue_many lost members or simplicity")
    return result


# ------------------------------------------------------------------- degree


def degree_exact(ps: PointSet) -> DegreeResult:
    """Smallest stab over all simple polygons with vertex set ``ps`` (3 <= N <= 9)."""
    n = ps.n
    if not 3 <= n <= 9:
        raise GeometryError(f"degree_exact supports 3 <= N <= 9 (got {n}); use degree_upper")
    if check_general_position(ps) is not None:
        raise GeometryError("degree_exact needs general position")
    bm = bipartition_matrix(ps)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    pidx = {p: k for k, p in enumerate(pairs)}
    X = np.stack([bm.B[:, u] != bm.B[:, v] for u, v in pairs], axis=1).astype(np.int64)
    coords = ps.coords
    meet = np.zeros((len(pairs), len(pairs)), dtype=bool)
    for a, (u, v) in enumerate(pairs):
        for b, (w, z) in enumerate(pairs):
            if b > a and len({u, v, w, z}) == 4:
                meet[a, b] = meet[b, a] = segments_intersect((coords[u], coords[v]), (coords[w], coords[z]))
    best = None
    for perm in permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        order = (0, *perm)
        idx = [pidx[(min(order[k], order[(k + 1) % n]), max(order[k], order[(k + 1) % n]))] for k in range(n)]
        if meet[np.ix_(idx, idx)].any():
            continue
        val = int(X[:, idx].sum(axis=1).max())
        if best is None or val < best[0]:
            best = (val, order)
    if best is None:
        raise AssertionError("no simple polygon found")
    curve = PolygonalCurve.from_order(best[1], ps)
    return DegreeResult(best[0], curve, True)


def _hull_peel_order(ps: PointSet) -> list[int]:
    left = list(range(ps.n))
    order = []
    while left:
        hull = convex_hull([ps.coords[i] for i in left])
        if not hull:
            hull = list(range(len(left)))
        layer = [left[k] for k in hull]
        order.extend(layer)
        used = set(layer)
        left = [i for i in left if i not in used]
    return order


def _nearest_neighbour_order(ps: PointSet) -> list[int]:
    D2 = _sq_dists(ps)
    left = set(range(1, ps.n))
    order = [0]
    while left:
        cur = order[-1]
        nxt = min(left, key=lambda j: (D2[cur, j], j))
        order.append(nxt)
        left.remove(nxt)
    return order


def _local_search(order: list[int], ps: PointSet, bm: BipartitionMatrix, max_rounds: int) -> list[int]:
    n = len(order)
    xs, ys, _ = ps.scaled
    B = bm.B

    def X(u, v):
        return (B[:, u] != B[:, v]).astype(np.int64)

    cnt = bm.crossing_counts(_cycle_edges(order))

    def score(c):
        top = int(c.max())
        return (top, int((c == top).sum()))

    cur = score(cnt)
    for _ in range(max_rounds):
        improved = False
        for i in range(n - 1):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                a, b, c, d = order[i], order[i + 1], order[j], order[(j + 1) % n]
                new = cnt - X(a, b) - X(c, d) + X(a, c) + X(b, d)
                sc = score(new)
                if sc >= cur:
                    continue
                trial = order[: i + 1] + order[i + 1 : j + 1][::-1] + order[j + 1 :]
                pts = [(xs[k], ys[k]) for k in trial]
                if simplicity_violation(pts) is not None:
                    continue
                order, cnt, cur, improved = trial, new, sc, True
                break
            if improved:
                break
        if not improved:
            break
    return order


def degree_upper(ps: PointSet, *, seed: int = 0, max_rounds: int = 200, random_starts: int = 2) -> DegreeResult:
    """Best simple polygon found by the tree route and stab-lowering 2-opt search."""
    n = ps.n
    if n < 3:
        raise GeometryError("degree_upper needs N >= 3")
    if check_general_position(ps) is not None:
        raise GeometryError("degree_upper needs general position")
    bm = bipartition_matrix(ps)
    rng = random.Random(seed)
    starts = [
        preorder_tour(low_stab_spanning_tree(ps, seed=seed), 0, ps),
        _hull_peel_order(ps),
        _nearest_neighbour_order(ps),
    ]
    for _ in range(random_starts):
        o = list(range(n))
        rng.shuffle(o)
        starts.append(o)
    best = None
    for k, start in enumerate(starts):
        order = uncross(start, ps).ids
        if k > 0:
            order = _local_search(list(order), ps, bm, max_rounds)
        val = bm.stab(_cycle_edges(order))[0]
        if best is None or val < best[0]:
            best = (val, list(order))
    curve = PolygonalCurve.from_order(best[1], ps)
    return DegreeResult(best[0], curve, False)
