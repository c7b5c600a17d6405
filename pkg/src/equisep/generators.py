"""Seeded point-set generators, including the low-convexity high-cutting family."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .arrangements import Arrangement, classify, max_cell
from .convexity import is_convex_position
from .geom import ConcreteLine, Coord, GeometryError, PointSet, check_general_position
from .stabbing import PolygonalCurve, is_simple, stab_segments


def _rng(seed: int) -> random.Random:
    return random.Random(seed)


def gen_random(N: int, seed: int = 0) -> PointSet:
    """N points with coordinates k / 10^9, k uniform in [0, 10^9], in general position."""
    if N < 0:
        raise ValueError("N must be non-negative")
    rng = _rng(seed)
    den = 10**9

    def draw() -> Coord:
        return (Fraction(rng.randint(0, den), den), Fraction(rng.randint(0, den), den))

    pts = [draw() for _ in range(N)]
    while True:
        bad = check_general_position(pts)
        if bad is None:
            return PointSet(pts)
        pts[bad[2]] = draw()


def gen_convex(N: int, seed: int = 0) -> PointSet:
    """N integer-derived points near a circle, strictly convex (checked exactly)."""
    if N < 3:
        raise ValueError("gen_convex needs N >= 3")
    rng = _rng(seed)
    R = 10**6
    for _ in range(100):
        pts = []
        for k in range(N):
            ang = 2 * math.pi * (k + rng.uniform(-0.25, 0.25)) / N
            pts.append((Fraction(round(R * math.cos(ang)), R), Fraction(round(R * math.sin(ang)), R)))
        if len(set(pts)) == N and check_general_position(pts) is None:
            ps = PointSet(pts)
            if is_convex_position(range(N), ps):
                return ps
    raise GeometryError("gen_convex could not produce a convex set")


def gen_perturbed_grid(w: int, h: int, seed: int = 0) -> PointSet:
    """The w x h integer grid, each point moved by at most 0.1 in each axis."""
    if w < 1 or h < 1:
        raise ValueError("grid dimensions must be >= 1")
    rng = _rng(seed)
    den = 10**6
    for _ in range(1000):
        pts = [
            (i + Fraction(rng.randint(-den // 10, den // 10), den), j + Fraction(rng.randint(-den // 10, den // 10), den))
            for j in range(h)
            for i in range(w)
        ]
        if check_general_position(pts) is None:
            return PointSet(pts)
    raise GeometryError("gen_perturbed_grid could not reach general position")


def grid_isolating_arrangement(ps: PointSet, w: int, h: int) -> Arrangement:
    """(w - 1) + (h - 1) near-axis lines putting every grid point in its own cell."""
    lines = []
    for i in range(1, w):
        lines.append(ConcreteLine(Fraction(1), Fraction(1, 1000 * (i + 1)), Fraction(2 * i - 1, 2)))
    for j in range(1, h):
        lines.append(ConcreteLine(Fraction(1, 1000 * (j + 1)), Fraction(1), Fraction(2 * j - 1, 2)))
    if not lines:
        lines.append(ConcreteLine(Fraction(0), Fraction(1), Fraction(-1)))
    arr = Arrangement(tuple(lines))
    if max_cell(classify(ps, arr)) != 1:
        raise GeometryError("grid arrangement failed to isolate the points")
    return arr


# --------------------------------------------------------- bumped arc family

_GRID = 2**60


def _snap(v: float | Fraction) -> Fraction:
    return Fraction(round(Fraction(v) * _GRID), _GRID)


def _pt(x, y) -> Coord:
    return (_snap(x), _snap(y))


@dataclass(frozen=True)
class Theorem32Params:
    M: int
    s: Fraction
    t: Fraction
    p: Fraction
    window: Fraction
    scale: Fraction  # cap width as a fraction of the polygon edge
    chords: int


@dataclass(frozen=True)
class Theorem32Instance:
    points: PointSet
    curve: PolygonalCurve
    params: Theorem32Params
    bump_index: dict[int, tuple[int, int]]
    G: tuple[Coord, ...]  # the single open curve, left to right
    boxes: tuple[tuple[Coord, Coord], ...]
    certificates: dict[str, int] = field(default_factory=dict)

    @property
    def point_set(self) -> PointSet:
        return self.points


def _build_G(prm: Theorem32Params):
    """The arc with 2M dents, each holding a small upper semicircle.

    Returns the chain (left to right), the dent boxes, the slice of the chain
    above the cut height, and for each dent the chain positions of its points.
    """
    M, s, t, p = prm.M, float(prm.s), float(prm.t), float(prm.p)
    ks = [k for k in range(-M, M + 1) if k]
    A = [s / p * k / (M + 1) for k in ks]
    AM = s / p * M / (M + 1)
    y_cut = math.sqrt(s * s - AM * AM) - 3 * t
    x_cut = math.sqrt(s * s - y_cut * y_cut)

    def arc(x):
        return _pt(x, math.sqrt(s * s - x * x))

    chain: list[Coord] = []
    n = prm.chords
    for j in range(n + 1):
        x = -s * math.cos(math.pi * j / n)
        if x < -x_cut:
            chain.append(_pt(x, math.sqrt(max(s * s - x * x, 0.0))))
    cut_left = len(chain)
    chain.append(arc(-x_cut))
    boxes = []
    pts_at: list[list[int]] = []
    for idx, a in enumerate(A):
        # intermediate arc vertices keep the chain strictly convex between dents
        prev = -x_cut if idx == 0 else A[idx - 1] + t
        for f in (0.25, 0.5, 0.75):
            chain.append(arc(prev + f * (a - t - prev)))
        L, R = arc(a - t), arc(a + t)
        cy = min(L[1], R[1]) - 2 * prm.t
        cx = (L[0] + R[0]) / 2
        r = (R[0] - L[0]) / 2
        chain.append(L)
        chain.append((L[0], cy))
        with_points = idx % 2 == 0
        angles = [math.pi - math.pi * j / prm.chords for j in range(1, prm.chords)]
        marks = []
        if with_points:
            w = float(prm.window)
            marks = [math.pi / 2 + w * (j / (M - 1) - 0.5) for j in range(M)]
        allang = sorted({*angles, *marks}, reverse=True)
        mine = []
        for ang in allang:
            if any(abs(ang - m) < 1e-300 for m in marks):
                mine.append(len(chain))
            chain.append((_snap(cx + Fraction(r * math.cos(ang))), _snap(cy + Fraction(r * math.sin(ang)))))
        chain.append((R[0], cy))
        chain.append(R)
        boxes.append(((L[0], cy), (R[0], max(L[1], R[1]))))
        if with_points:
            pts_at.append(mine)
    for f in (0.25, 0.5, 0.75):
        last = A[-1] + t
        chain.append(arc(last + f * (x_cut - last)))
    chain.append(arc(x_cut))
    cut_right = len(chain) - 1
    for j in range(n + 1):
        x = -s * math.cos(math.pi * j / n)
        if x > x_cut:
            chain.append(_pt(x, math.sqrt(max(s * s - x * x, 0.0))))
    return chain, boxes, (cut_left, cut_right), pts_at


def _polygon(m: int) -> list[Coord]:
    return [_pt(math.cos(2 * math.pi * k / m + math.pi / 2), math.sin(2 * math.pi * k / m + math.pi / 2)) for k in range(m)]


def _box_edges(box):
    (x0, y0), (x1, y1) = box
    c = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    return [(c[k], c[(k + 1) % 4]) for k in range(4)]


def _assemble(prm: Theorem32Params, chain, cuts, pts_at):
    lo, hi = cuts
    cap = chain[lo : hi + 1]
    half = (cap[-1][0] - cap[0][0]) / 2
    ycut = cap[0][1]
    cx0 = (cap[0][0] + cap[-1][0]) / 2
    m = max(prm.M, 3)
    poly = _polygon(m)
    verts: list[Coord] = []
    ids: list[int | None] = []
    bump_index: dict[int, tuple[int, int]] = {}
    coords: list[Coord] = []
    local = {pos - lo: (b, j) for b, lst in enumerate(pts_at) for j, pos in enumerate(lst)}
    for k in range(m):
        a, b = poly[k], poly[(k + 1) % m]
        verts.append(a)
        ids.append(None)
        if k >= prm.M:
            continue
        ex_, ey_ = b[0] - a[0], b[1] - a[1]
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        f = prm.scale / (2 * half)
        cr, ci = f * ex_, f * ey_
        for q, (x, y) in enumerate(cap):
            zx, zy = x - cx0, y - ycut
            pt = (_snap(mid[0] + cr * zx - ci * zy), _snap(mid[1] + cr * zy + ci * zx))
            verts.append(pt)
            if q in local:
                pid = len(coords)
                coords.append(pt)
                bump_index[pid] = (k, local[q][0])
                ids.append(pid)
            else:
                ids.append(None)
    return verts, ids, coords, bump_index


def gen_theorem32(
    M: int,
    seed: int = 0,
    *,
    chords: int = 16,
    max_retries: int = 24,
    stab_G: int = 10,
    stab_boxes: int = 4,
    stab_total: int = 22,
) -> Theorem32Instance:
    """Certified instance: M copies of the bumped cap inside an M-gon, N = M^3 points.

    Parameters start at t = s/(100 M^2), p = 10, window = 1/(100 M); while a
    certificate fails, t and the window halve (curve G or its dent boxes) or
    the cap scale halves (assembled curve).  ``seed`` is accepted for
    interface uniformity; the construction is deterministic.
    """
    if M < 2:
        raise ValueError("gen_theorem32 needs M >= 2")
    s = Fraction(1)
    prm = Theorem32Params(M, s, s / (100 * M * M), Fraction(10), Fraction(1, 100 * M), Fraction(1, 2), chords)
    for _ in range(max_retries):
        chain, boxes, cuts, pts_at = _build_G(prm)
        g_stab = stab_segments(list(zip(chain, chain[1:]))).value
        box_stab = stab_segments([e for bx in boxes for e in _box_edges(bx)]).value
        if g_stab > stab_G or box_stab > stab_boxes:
            prm = Theorem32Params(M, s, prm.t / 2, prm.p, prm.window / 2, prm.scale, chords)
            continue
        verts, ids, coords, bump_index = _assemble(prm, chain, cuts, pts_at)
        curve = PolygonalCurve(tuple(verts), tuple(ids))
        if len(coords) != M**3 or check_general_position(coords) is not None or not is_simple(curve):
            prm = Theorem32Params(M, s, prm.t / 2, prm.p, prm.window / 2, prm.scale / 2, chords)
            continue
        total = stab_segments(curve.edges).value
        if total > stab_total:
            prm = Theorem32Params(M, s, prm.t, prm.p, prm.window, prm.scale / 2, chords)
            continue
        certs = {"stab_G": g_stab, "stab_boxes": box_stab, "stab_curve": total}
        return Theorem32Instance(PointSet(coords), curve, prm, bump_index, tuple(chain), tuple(boxes), certs)
    raise GeometryError("gen_theorem32: certification failed after all retries")
