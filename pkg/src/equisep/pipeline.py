"""End-to-end constructions: curve witnesses for F(n, d), cut bound reports, surveys."""

from __future__ import annotations

import csv
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .arrangements import (
    classify,
    cut_number_exact,
    cutting_arrangement,
    equal_separation_check,
    max_cell,
    partial_cutting,
)
from .convexity import convex_number
from .geom import GeometryError, PointSet, check_general_position
from .stabbing import (
    CurveUnion,
    PolygonalCurve,
    degree_exact,
    degree_upper,
    glue_many,
    is_simple,
    stab_polygon,
    stab_union,
)


def ordered_map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``map`` with optional worker processes; results keep input order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ------------------------------------------------------------------ F(n, d)


@dataclass(frozen=True)
class FndConfig:
    n: int
    d: int
    h_override: int | None = None
    source_size: int | None = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.h_override is not None and self.h_override < 1:
            raise ValueError("h must be >= 1")


@dataclass
class FndWitness:
    subset_ids: tuple[int, ...]
    curve: PolygonalCurve
    measured_stab: int
    h_used: int
    per_cell_convex_sizes: list[int]
    union_stab: int | None = None
    cell_size: int | None = None
    diagnostics: list[str] = field(default_factory=list)


class FndFailure(RuntimeError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("no h produced a witness:\n" + "\n".join(diagnostics))
        self.diagnostics = diagnostics


def _h_start(d: int) -> int:
    return d // 2 - math.isqrt(d - 1) - 1 if d > 1 else 0


def _cell_convex(args):
    ps, ids = args
    return convex_number(ps, ids).witness


def fnd_witness(ps: PointSet, cfg: FndConfig, *, jobs: int = 1) -> FndWitness:
    """A curve with stab <= d through at least n points of ``ps``, fully verified.

    The carve parameter h descends from floor(d/2) - ceil(sqrt d).  For each h
    the per-cell size H climbs from the quota ceil(n/2h) by doubling until
    every one of the 2h carved cells holds a convex subset of the quota
    (larger H costs more in the exact convex search and is only tried when
    needed).  The 2h convex polygons are glued along a low-stab tree.
    """
    if cfg.source_size is not None:
        ps = ps.subset(range(min(cfg.source_size, ps.n)))
    diags: list[str] = []
    N = ps.n
    h0 = cfg.h_override if cfg.h_override is not None else _h_start(cfg.d)
    for h in range(h0, 0, -1):
        quota = max(3, -(-cfg.n // (2 * h)))  # a closed curve needs 3 vertices
        H_max = N // (2 * h)
        if H_max < quota:
            diags.append(f"h={h}: need {2 * h * quota} points for quota {quota}, have {N} (max feasible n = {2 * h * H_max})")
            continue
        H = quota
        cache: dict = {}
        while True:
            pc = partial_cutting(ps, H, h + 1, cache=cache)
            wits = ordered_map(_cell_convex, [(ps, c.members) for c in pc.carved], jobs)
            sizes = [len(w) for w in wits]
            if min(sizes) >= quota:
                break
            diags.append(f"h={h}, H={H}: convex sizes {sizes} below quota {quota}")
            if H == H_max:
                H = None
                break
            H = min(2 * H, H_max)
        if H is None:
            continue
        polys = [PolygonalCurve.from_order(w, ps) for w in wits]
        ustab = stab_union(CurveUnion.of(*polys)).value
        if ustab > 2 * h + 4:
            diags.append(f"h={h}: union stab {ustab} exceeds {2 * h + 4}")
            continue
        try:
            curve = glue_many(polys, ps)
        except GeometryError as exc:
            diags.append(f"h={h}: gluing failed: {exc}")
            continue
        measured = stab_polygon(curve).value
        members = tuple(sorted(curve.member_ids))
        if measured > cfg.d or len(members) < cfg.n:
            diags.append(f"h={h}: glued curve has stab {measured}, {len(members)} members")
            continue
        diags.append(f"h={h}, H={H}: success")
        return FndWitness(members, curve, measured, h, sizes, ustab, H, diags)
    # one convex curve: the whole ladder's degenerate rung
    res = convex_number(ps)
    if res.value >= cfg.n and res.value >= 3:
        curve = PolygonalCurve.from_order(res.witness, ps)
        measured = stab_polygon(curve).value
        if measured <= cfg.d:
            diags.append("h=0: single convex subset")
            return FndWitness(tuple(sorted(res.witness)), curve, measured, 0, [res.value], None, None, diags)
    diags.append(f"h=0: convex number {res.value} < n = {cfg.n}")
    raise FndFailure(diags)


def verify_fnd_witness(w: FndWitness, ps: PointSet, cfg: FndConfig) -> list[str]:
    """Problems found when re-checking a witness against ``ps``; empty means valid."""
    problems = []
    c = w.curve
    if not is_simple(c):
        problems.append("curve is not simple")
        return problems
    for v, i in zip(c.vertices, c.ids):
        if i is not None and (not 0 <= i < ps.n or ps.coords[i] != v):
            problems.append(f"vertex {v} is not point {i}")
    if tuple(sorted(c.member_ids)) != tuple(w.subset_ids):
        problems.append("subset ids differ from the curve's members")
    measured = stab_polygon(c).value
    if measured != w.measured_stab:
        problems.append(f"recorded stab {w.measured_stab} but measured {measured}")
    if measured > cfg.d:
        problems.append(f"stab {measured} exceeds d = {cfg.d}")
    if len(w.subset_ids) < cfg.n:
        problems.append(f"only {len(w.subset_ids)} points, need {cfg.n}")
    return problems


# ------------------------------------------------------------- cut bounds


@dataclass(frozen=True)
class LowerBound:
    description: str
    size: int
    degree_bound: int
    value: Fraction  # |Y| / (K * d_ub(Y))

    @property
    def ceiling(self) -> int:
        return math.ceil(self.value)


@dataclass(frozen=True)
class CutBoundReport:
    K: int
    N: int
    exact_cut: int | None
    exact_exhaustive: bool | None
    constructive_upper: int  # ceil(N / 2K)
    constructive_measured: int
    lower_bounds: tuple[LowerBound, ...]

    def consistent(self) -> bool:
        uppers = [self.constructive_measured] + ([self.exact_cut] if self.exact_cut is not None else [])
        return all(lb.ceiling <= u for lb in self.lower_bounds for u in uppers)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["kind", "description", "size", "degree_bound", "value", "ceiling"])
        wr.writerow(["upper", f"construction K={self.K}", self.N, "", self.constructive_measured, self.constructive_upper])
        if self.exact_cut is not None:
            tag = "exhaustive" if self.exact_exhaustive else "budget"
            wr.writerow(["exact", f"search ({tag})", self.N, "", self.exact_cut, self.exact_cut])
        for lb in self.lower_bounds:
            wr.writerow(["lower", lb.description, lb.size, lb.degree_bound, str(lb.value), lb.ceiling])
        return buf.getvalue()


def _degree_bound(ps: PointSet, ids: Sequence[int]) -> int | None:
    ids = sorted(ids)
    if len(ids) < 3:
        return None
    sub = ps.subset(ids)
    if check_general_position(sub) is not None:
        return None
    if len(ids) <= 9:
        return degree_exact(sub).value
    return degree_upper(sub).value


def cut_bound_report(
    ps: PointSet,
    K: int,
    *,
    subsets: Iterable[tuple[str, Sequence[int]]] = (),
    curve: PolygonalCurve | None = None,
    clusters: Iterable[tuple[str, Sequence[int]]] = (),
    exact_limit: int = 14,
    degree_limit: int = 64,
) -> CutBoundReport:
    """Lower bounds |Y| / (K d(Y)) over a candidate family next to the upper bounds.

    The family is: the whole set (degree bounded by ``curve`` if given, else by
    a degree computation), the largest convex subset (degree 2), any
    ``clusters`` and user ``subsets``.  Any upper bound on d(Y) gives a valid
    lower bound on the cutting number.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    N = ps.n
    arr = cutting_arrangement(ps, K) if N else None
    measured = max_cell(classify(ps, arr)) if arr else 0
    upper = -(-N // (2 * K))
    exact = exhaustive = None
    if 1 <= N <= exact_limit and K <= 3:
        res = cut_number_exact(ps, K)
        exact, exhaustive = res.value, res.exhaustive
    lbs = []

    def add(desc, ids, dub):
        if dub:
            lbs.append(LowerBound(desc, len(ids), dub, Fraction(len(ids), K * dub)))

    if curve is not None and set(curve.member_ids) == set(range(N)):
        add("whole set (given curve)", range(N), stab_polygon(curve).value)
    elif N <= degree_limit:
        add("whole set (degree search)", range(N), _degree_bound(ps, range(N)))
    if N >= 3:
        con = convex_number(ps)
        add("largest convex subset", con.witness, 2)
    for desc, ids in list(clusters) + list(subsets):
        ids = list(ids)
        if len(ids) <= degree_limit:
            add(desc, ids, _degree_bound(ps, ids))
    return CutBoundReport(K, N, exact, exhaustive, upper, measured, tuple(lbs))


# ----------------------------------------------------------------- survey

SURVEY_HEADER = ["instance", "seed", "N", "K", "threshold", "verdict", "search_value", "exhaustive", "degree_upper", "convex_number"]


def _survey_row(args) -> list:
    idx, seed, N, K, c = args
    from .generators import gen_random

    ps = gen_random(N, seed)
    ver = equal_separation_check(ps, K, c)
    if ver.witness is not None and max_cell(classify(ps, ver.witness)) > ver.threshold:
        raise AssertionError("survey witness does not meet the threshold")
    verdict = {True: "yes", False: "no", None: "unknown"}[ver.verdict]
    deg = degree_upper(ps).value if N >= 3 else ""
    con = convex_number(ps).value
    return [idx, seed, N, K, ver.threshold, verdict, ver.search.value, int(ver.search.exhaustive), deg, con]


def survey_seeds(count: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.randrange(2**31) for _ in range(count)]


def separation_survey(count: int, N: int, K: int, seed: int = 0, c: Fraction | int = 1, jobs: int = 1) -> str:
    """CSV table with one row per seeded random instance."""
    seeds = survey_seeds(count, seed)
    rows = ordered_map(_survey_row, [(i, s, N, K, Fraction(c)) for i, s in enumerate(seeds)], jobs)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SURVEY_HEADER)
    wr.writerows(rows)
    return buf.getvalue()
