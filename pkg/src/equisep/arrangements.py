"""Line arrangements: cell membership, cutting numbers and the carving constructions."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .geom import (
    ConcreteLine,
    GeometryError,
    PointSet,
    bipartition_masks,
    mask_to_ids,
    realize_line,
    Bipartition,
    separating_line,
)


class ConstructionError(AssertionError):
    """An internal verification step failed; the output would be wrong."""


@dataclass(frozen=True)
class Arrangement:
    lines: tuple[ConcreteLine, ...]

    @property
    def K(self) -> int:
        return len(self.lines)

    @property
    def simple(self) -> bool:
        return is_simple(self.lines)


@dataclass(frozen=True)
class CellAssignment:
    sign_vectors: tuple[tuple[int, ...], ...]  # indexed by point id
    cells: dict[tuple[int, ...], tuple[int, ...]]

    @property
    def occupied(self) -> int:
        return len(self.cells)


def is_simple(lines: Sequence[ConcreteLine]) -> bool:
    """Pairwise non-parallel and no three lines through a common point."""
    for l1, l2 in combinations(lines, 2):
        if l1.parallel_to(l2):
            return False
    for l1, l2, l3 in combinations(lines, 3):
        det = (
            l1.a * (l2.b * l3.c - l2.c * l3.b)
            - l1.b * (l2.a * l3.c - l2.c * l3.a)
            + l1.c * (l2.a * l3.b - l2.b * l3.a)
        )
        if det == 0:
            return False
    return True


def classify(ps: PointSet, arr: Arrangement | Sequence[ConcreteLine]) -> CellAssignment:
    lines = arr.lines if isinstance(arr, Arrangement) else tuple(arr)
    vectors = []
    cells: dict[tuple[int, ...], list[int]] = {}
    for p in ps:
        vec = []
        for li, line in enumerate(lines):
            s = line.side(p.xy)
            if s == 0:
                raise GeometryError(f"line {li} passes through point {p.id}")
            vec.append(s)
        v = tuple(vec)
        vectors.append(v)
        cells.setdefault(v, []).append(p.id)
    return CellAssignment(tuple(vectors), {k: tuple(v) for k, v in cells.items()})


def max_cell(ca: CellAssignment) -> int:
    return max((len(v) for v in ca.cells.values()), default=0)


# ---------------------------------------------------------------- exact search


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    pruned: int = 0
    min_leaf: int | None = None  # smallest max-cell among evaluated leaves
    leaf_histogram: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class CutResult:
    value: int
    witness: Arrangement
    exhaustive: bool
    masks: tuple[int, ...]
    stats: SearchStats


def line_classes(ps: PointSet) -> list[tuple[int, tuple | None]]:
    """One representative mask per unordered line class, most balanced first."""
    n = ps.n
    full = (1 << n) - 1
    reps: dict[int, tuple | None] = {}
    for m, anchor in bipartition_masks(ps).items():
        key = m if not m & 1 else full ^ m
        if key not in reps:
            reps[key] = anchor if key == m else None
    half = n / 2
    return sorted(reps.items(), key=lambda kv: (abs(bin(kv[0]).count("1") - half), kv[0]))


def _popcount(m: int) -> int:
    return bin(m).count("1")


def cut_number_exact(
    ps: PointSet,
    K: int,
    budget: int = 5_000_000,
    *,
    prune: bool = True,
    target: int | None = None,
) -> CutResult:
    """Minimum over K line classes of the fullest cell, by branch and bound.

    A line's effect on ``ps`` is its bipartition, so lines range over the
    deduplicated realisable classes.  A partial choice with ``r`` lines still
    to add can at best halve each cell ``r`` times, which gives the pruning
    bound.  With ``target`` set the search stops at the first arrangement whose
    fullest cell is at most ``target``.
    """
    if K < 1 or ps.n < 1:
        raise ValueError("need K >= 1 and a non-empty point set")
    full = (1 << ps.n) - 1
    classes = line_classes(ps)
    masks = [m for m, _ in classes]
    L = len(masks)
    stats = SearchStats()
    best = [ps.n + 1, ()]
    exhausted = [False]

    def rec(start: int, cells: list[int], chosen: list[int]):
        if exhausted[0]:
            return
        stats.nodes += 1
        if stats.nodes > budget:
            exhausted[0] = True
            return
        cur = max(_popcount(c) for c in cells)
        left = K - len(chosen)
        if left == 0 or start >= L:
            # fewer than K classes exist only for tiny sets; repeating a line is harmless
            stats.leaves += 1
            stats.leaf_histogram[cur] = stats.leaf_histogram.get(cur, 0) + 1
            if stats.min_leaf is None or cur < stats.min_leaf:
                stats.min_leaf = cur
            if cur < best[0]:
                best[0], best[1] = cur, tuple(chosen)
            return
        if prune and -(-cur // (1 << left)) >= best[0]:
            stats.pruned += 1
            return
        for idx in range(start, L - left + 1 if L >= left else L):
            m = masks[idx]
            nxt = []
            for c in cells:
                a, b = c & m, c & ~m
                if a:
                    nxt.append(a)
                if b:
                    nxt.append(b)
            chosen.append(m)
            rec(idx + 1, nxt, chosen)
            chosen.pop()
            if target is not None and best[0] <= target:
                return
            if exhausted[0]:
                return

    rec(0, [full], [])
    value, chosen = best
    lines = []
    for m in chosen:
        pos = frozenset(mask_to_ids(m))
        lines.append(realize_line(Bipartition(pos, frozenset(range(ps.n)) - pos), ps))
    arr = make_simple(Arrangement(tuple(lines)), ps) if lines else Arrangement(())
    if lines and max_cell(classify(ps, arr)) != value:
        raise ConstructionError("witness arrangement does not reproduce the searched value")
    early = target is not None and value <= target
    return CutResult(value, arr, not exhausted[0] and not early, tuple(chosen), stats)


@dataclass(frozen=True)
class SeparationVerdict:
    verdict: bool | None  # None: budget exhausted before a decision
    threshold: int
    witness: Arrangement | None
    search: CutResult


def equal_separation_check(ps: PointSet, K: int, c: Fraction | int = 1, budget: int = 5_000_000) -> SeparationVerdict:
    """Is there an arrangement of K lines with every cell at most ceil(c*N/K^2)?"""
    c = Fraction(c)
    threshold = math.ceil(c * ps.n / (K * K))
    res = cut_number_exact(ps, K, budget, target=threshold)
    if res.value <= threshold:
        return SeparationVerdict(True, threshold, res.witness, res)
    if res.exhaustive:
        return SeparationVerdict(False, threshold, None, res)
    return SeparationVerdict(None, threshold, None, res)


# ------------------------------------------------------------- halving sweep


def _int_vec(a: Fraction, b: Fraction) -> tuple[int, int]:
    d = math.lcm(a.denominator, b.denominator)
    return int(a * d), int(b * d)


def _gap_value(lo, hi, others: Iterable) -> Fraction:
    """A value strictly inside (lo, hi) avoiding every value in ``others``."""
    inside = sorted({v for v in others if lo < v < hi})
    pts = [lo, *inside, hi]
    a, b = pts[0], pts[1]
    return Fraction(a + b, 2)


def _insertion_sort(items: list, before) -> None:
    """In-place exact sort; linear when the input is nearly sorted."""
    for k in range(1, len(items)):
        cur = items[k]
        j = k - 1
        while j >= 0 and before(cur, items[j]):
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = cur


class HalvingSweep:
    """Rotating sweep for half-planes holding exactly r points of A and of B.

    The direction ``u`` starts normal to a separator, pointing at ``A``, and
    turns counter-clockwise through half a turn.  Between critical directions
    (normals of lines through two points) the projection order is fixed;
    crossing one swaps two neighbours, so ``f = |A in top 2r|`` moves by at
    most one per swap.  It starts at ``>= r`` and ends at ``<= r``.
    """

    def __init__(self, A: Iterable[int], B: Iterable[int], ps: PointSet, separator: ConcreteLine | None = None):
        self.A = sorted(set(A))
        self.B = sorted(set(B))
        if set(self.A) & set(self.B):
            raise GeometryError("halving_line: A and B are not disjoint")
        self.ps = ps
        xs, ys, self.D = ps.scaled
        self.xs, self.ys = xs, ys
        if separator is None:
            separator = separating_line([ps.coords[i] for i in self.A], [ps.coords[i] for i in self.B])
            if separator is None:
                raise GeometryError("halving_line: A and B are not linearly separable")
        else:
            if any(separator.side(ps.coords[i]) <= 0 for i in self.A) or any(
                separator.side(ps.coords[i]) >= 0 for i in self.B
            ):
                raise GeometryError("halving_line: provided separator does not separate A from B")
        self.u0 = _int_vec(Fraction(separator.a), Fraction(separator.b))
        self.P = self.A + self.B
        self.inA = {i: True for i in self.A}
        ux, uy = self.u0
        self.events = self._events(ux, uy)

    def _events(self, ux: int, uy: int):
        """Critical directions strictly inside the half-turn after u0, in sweep order.

        Floats only presort; an exact insertion pass fixes the final order.
        """
        P = self.P
        if len(P) < 2:
            return []
        X = np.array([self.xs[i] for i in P], dtype=object)
        Y = np.array([self.ys[i] for i in P], dtype=object)
        ia, ib = np.triu_indices(len(P), 1)
        ex = -(Y[ib] - Y[ia])
        ey = X[ib] - X[ia]
        cr = ux * ey - uy * ex
        keep = cr != 0
        ia, ib, ex, ey, cr = ia[keep], ib[keep], ex[keep], ey[keep], cr[keep]
        neg = cr < 0
        ex = np.where(neg, -ex, ex)
        ey = np.where(neg, -ey, ey)
        cr = np.where(neg, -cr, cr)
        dot = ux * ex + uy * ey
        ang = np.arctan2(cr.astype(float), dot.astype(float))
        order = np.argsort(ang, kind="stable")
        evs = [(int(ex[k]), int(ey[k]), P[ia[k]], P[ib[k]]) for k in order.tolist()]
        _insertion_sort(evs, lambda e, f: e[0] * f[1] - e[1] * f[0] > 0)
        groups = []
        for e in evs:
            if groups and groups[-1][2][0] * e[1] - groups[-1][2][1] * e[0] == 0:
                groups[-1][1].append((e[2], e[3]))
            else:
                groups.append((None, [(e[2], e[3])], (e[0], e[1])))
        return groups

    def line(self, r: int) -> ConcreteLine:
        if r < 1:
            raise GeometryError("halving_line: r must be >= 1")
        if len(self.A) < r:
            raise GeometryError(f"halving_line: |A| = {len(self.A)} < r = {r}")
        if len(self.B) < r:
            raise GeometryError(f"halving_line: |B| = {len(self.B)} < r = {r}")
        xs, ys = self.xs, self.ys
        ux, uy = self.u0
        px, py = -uy, ux
        order = sorted(self.P, key=lambda i: (ux * xs[i] + uy * ys[i], px * xs[i] + py * ys[i]), reverse=True)
        pos = {p: k for k, p in enumerate(order)}
        top = 2 * r
        f = sum(1 for p in order[:top] if p in self.inA)
        direction = None
        if f == r:
            nxt = self.events[0][2] if self.events else (px, py)
            direction = (ux + nxt[0], uy + nxt[1])
        else:
            for g, (_, swaps, evdir) in enumerate(self.events):
                for a, b in swaps:
                    ka, kb = pos[a], pos[b]
                    if abs(ka - kb) != 1:
                        raise ConstructionError("sweep swap between non-adjacent points")
                    lo = min(ka, kb)
                    if lo == top - 1:
                        up, down = order[lo], order[lo + 1]
                        f += (down in self.inA) - (up in self.inA)
                    order[ka], order[kb] = b, a
                    pos[a], pos[b] = kb, ka
                if f == r:
                    nxt = self.events[g + 1][2] if g + 1 < len(self.events) else (-ux, -uy)
                    direction = (evdir[0] + nxt[0], evdir[1] + nxt[1])
                    break
        if direction is None:
            raise ConstructionError("sweep ended without f = r")
        return self._line_for(direction, top)

    def _line_for(self, u: tuple[int, int], top: int) -> ConcreteLine:
        xs, ys, D = self.xs, self.ys, self.D
        proj = sorted(((u[0] * xs[i] + u[1] * ys[i], i) for i in self.P), reverse=True)
        if len({v for v, _ in proj}) != len(proj):
            raise ConstructionError("representative direction is critical")
        allv = [u[0] * xs[i] + u[1] * ys[i] for i in range(self.ps.n)]
        if top < len(proj):
            c = _gap_value(proj[top][0], proj[top - 1][0], allv)
        else:
            c = _gap_value(min(allv) - 1, proj[-1][0], allv)
        line = ConcreteLine(Fraction(u[0]), Fraction(u[1]), c / D)
        inside = {i for _, i in proj[:top]}
        na = sum(1 for i in self.A if i in inside)
        nb = len(inside) - na
        if na != top // 2 or nb != top // 2:
            raise ConstructionError(f"halving line recount failed: {na}, {nb}")
        for i in self.P:
            if (line.side(self.ps.coords[i]) > 0) != (i in inside):
                raise ConstructionError("halving line side check failed")
        return line


def halving_line(A: Iterable[int], B: Iterable[int], ps: PointSet, r: int, separator: ConcreteLine | None = None) -> ConcreteLine:
    """A line whose positive open half-plane holds exactly r points of A and r of B."""
    return HalvingSweep(A, B, ps, separator).line(r)


# ------------------------------------------------------- constructive bounds


def median_line(ps: PointSet, ids: Sequence[int] | None = None) -> ConcreteLine:
    """Split ``ids`` into ceil(n/2) (negative side) and floor(n/2) (positive side).

    The sort direction is (1, delta) with delta small enough to reproduce
    lexicographic (x, y) order exactly; the offset avoids every point of ``ps``.
    """
    ids = list(range(ps.n)) if ids is None else list(ids)
    coords = ps.coords
    xs_sorted = sorted({x for x, _ in coords})
    gap = min((b - a for a, b in zip(xs_sorted, xs_sorted[1:])), default=Fraction(1))
    yspan = max(y for _, y in coords) - min(y for _, y in coords)
    delta = gap / (2 * (yspan + 1))
    vals = sorted((x + delta * y, i) for i, (x, y) in enumerate(coords) if i in set(ids))
    allv = [x + delta * y for x, y in coords]
    k = (len(vals) + 1) // 2
    if k == len(vals):
        c = _gap_value(vals[-1][0], vals[-1][0] + 1, allv)
    else:
        c = _gap_value(vals[k - 1][0], vals[k][0], allv)
    return ConcreteLine(Fraction(1), delta, c)


def _carve(ps: PointSet, H: int, cuts: int | None, cache: dict | None = None):
    """Shared iteration: median split, then cuts carving H from each oversize side.

    ``cache`` maps (R, S) to a prepared sweep so repeated runs over the same
    point set with different H skip the event sort.
    """
    split = median_line(ps)
    R = [i for i in range(ps.n) if split.side(ps.coords[i]) < 0]
    S = [i for i in range(ps.n) if split.side(ps.coords[i]) > 0]
    lines = [split]
    carved = []
    step = 0
    while (cuts is None and max(len(R), len(S)) > H) or (cuts is not None and step < cuts):
        key = (tuple(R), tuple(S))
        sweep = cache.get(key) if cache is not None else None
        if sweep is None:
            sweep = HalvingSweep(R, S, ps, separator=split.flipped())
            if cache is not None:
                cache[key] = sweep
        line = sweep.line(H)
        qR = [i for i in R if line.side(ps.coords[i]) > 0]
        qS = [i for i in S if line.side(ps.coords[i]) > 0]
        carved.append((qR, qS))
        R = [i for i in R if line.side(ps.coords[i]) < 0]
        S = [i for i in S if line.side(ps.coords[i]) < 0]
        lines.append(line)
        step += 1
    return lines, carved, R, S


def bounded_cell_arrangement(ps: PointSet, H: int) -> Arrangement:
    """ceil(N/2H) lines with every cell holding at most H points (verified)."""
    if H < 1:
        raise ValueError("H must be >= 1")
    if ps.n == 0:
        return Arrangement((ConcreteLine(Fraction(0), Fraction(1), Fraction(0)),))
    lines, _, _, _ = _carve(ps, H, None)
    expect = -(-ps.n // (2 * H))
    if len(lines) != expect:
        raise ConstructionError(f"constructed {len(lines)} lines, expected {expect}")
    arr = make_simple(Arrangement(tuple(lines)), ps)
    if max_cell(classify(ps, arr)) > H:
        raise ConstructionError("bounded_cell_arrangement produced an oversize cell")
    return arr


def cutting_arrangement(ps: PointSet, K: int) -> Arrangement:
    """Exactly K lines with max cell <= ceil(N/2K): the bounded construction, padded."""
    H = max(1, -(-ps.n // (2 * K)))
    arr = bounded_cell_arrangement(ps, H)
    lines = list(arr.lines)
    if len(lines) > K:
        raise ConstructionError("construction needs more than K lines")
    ymin = min((y for _, y in ps.coords), default=Fraction(0))
    while len(lines) < K:
        lines.append(ConcreteLine(Fraction(len(lines)), Fraction(1), ymin - 1 - len(lines)))
    out = make_simple(Arrangement(tuple(lines)), ps)
    if max_cell(classify(ps, out)) > H:
        raise ConstructionError("padding changed the cell bound")
    return out


@dataclass(frozen=True)
class CarvedCell:
    constraints: tuple[tuple[int, int], ...]  # (line index, required side); index 0 is the split line
    members: tuple[int, ...]
    cut: int  # index of the carving line
    side: int  # side of the split line


@dataclass(frozen=True)
class PartialCutting:
    split_line: ConcreteLine
    cuts: tuple[ConcreteLine, ...]  # positive side of cut i is its half-plane Q
    carved: tuple[CarvedCell, ...]
    residual: tuple[int, ...]
    H: int

    @property
    def lines(self) -> tuple[ConcreteLine, ...]:
        return (self.split_line, *self.cuts)

    def evaluate(self, cell: CarvedCell, ps: PointSet) -> tuple[int, ...]:
        """Membership of ``cell`` recomputed from its half-plane constraints."""
        lines = self.lines
        return tuple(
            p.id for p in ps if all(lines[li].side(p.xy) == s for li, s in cell.constraints)
        )


def partial_cutting(ps: PointSet, H: int, L: int, *, cache: dict | None = None) -> PartialCutting:
    """L lines: the split line plus L-1 cuts, each carving H points on both sides.

    Cell ``(cut i, side s)`` is side ``s`` of the split line, inside ``Q_i`` and
    outside every earlier ``Q``; later cuts are not extended into it.
    """
    if L < 2:
        raise ValueError("partial cutting needs L >= 2")
    if H < 1:
        raise ValueError("H must be >= 1")
    if ps.n < 2 * H * (L - 1):
        raise ValueError(
            f"insufficient points: N = {ps.n} < 2H(L-1) = {2 * H * (L - 1)}; max feasible L = {ps.n // (2 * H) + 1}"
        )
    lines, carved, R, S = _carve(ps, H, L - 1, cache)
    cells = []
    for ci, (qR, qS) in enumerate(carved, start=1):
        earlier = tuple((s, -1) for s in range(1, ci))
        for side, members in ((-1, qR), (1, qS)):
            cons = ((0, side), (ci, 1)) + earlier
            cells.append(CarvedCell(cons, tuple(sorted(members)), ci, side))
    pc = PartialCutting(lines[0], tuple(lines[1:]), tuple(cells), tuple(sorted(R + S)), H)
    seen: set[int] = set()
    for cell in pc.carved:
        if len(cell.members) != H or pc.evaluate(cell, ps) != cell.members:
            raise ConstructionError("carved cell membership mismatch")
        if seen & set(cell.members):
            raise ConstructionError("carved cells overlap")
        seen |= set(cell.members)
    return pc


# ----------------------------------------------------------------- simplicity


def make_simple(arr: Arrangement, ps: PointSet, seed: int = 0) -> Arrangement:
    """Perturb lines until the arrangement is simple, keeping every sign vector."""
    if arr.simple:
        return arr
    base = classify(ps, arr).sign_vectors
    rng = random.Random(seed)
    lines = list(arr.lines)
    for attempt in range(400):
        scale = Fraction(1, 2 ** (attempt // 4 + 4))
        trial = [lines[0]]
        for ln in lines[1:]:
            mag = abs(ln.a) + abs(ln.b) + abs(ln.c) + 1
            da, db, dc = (Fraction(rng.randint(-7, 7), 7) for _ in range(3))
            try:
                trial.append(ConcreteLine(ln.a + scale * mag * da, ln.b + scale * mag * db, ln.c + scale * mag * dc))
            except GeometryError:
                trial.append(ln)
        if not is_simple(trial):
            continue
        try:
            if classify(ps, trial).sign_vectors == base:
                return Arrangement(tuple(trial))
        except GeometryError:
            continue
    raise ConstructionError("could not perturb arrangement into a simple one")
