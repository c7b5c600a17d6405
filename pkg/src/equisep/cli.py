"""Command-line driver.

Exit status: 0 success, 1 verification failure (a JSON failure record is
written to stderr), 2 usage error or malformed input.  ``--seed`` defaults to
the ``EQUISEP_SEED`` environment variable, else 0.  ``--jobs`` never changes
any output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io as fio
from .arrangements import (
    PartialCutting,
    bounded_cell_arrangement,
    classify,
    cut_number_exact,
    cutting_arrangement,
    max_cell,
    partial_cutting,
)
from .convexity import convex_number
from .generators import gen_convex, gen_perturbed_grid, gen_random, gen_theorem32, grid_isolating_arrangement
from .geom import GeometryError, PointSet
from .pipeline import FndConfig, FndWitness, FndFailure, cut_bound_report, fnd_witness, separation_survey, verify_fnd_witness
from .render import Scene, render_svg, render_table_svg
from .stabbing import (
    CurveUnion,
    NotSimpleError,
    PolygonalCurve,
    SpanningTree,
    degree_exact,
    degree_upper,
    glue_pair,
    is_simple,
    low_stab_spanning_tree,
    preorder_tour,
    stab_polygon,
    stab_segments,
    stab_union,
    tree_stab,
    uncross,
)

SEED_ENV = "EQUISEP_SEED"


class Failure(Exception):
    """A result that did not verify."""

    def __init__(self, command: str, problems: list[str], **extra):
        super().__init__("; ".join(problems))
        self.record = {"status": "failure", "command": command, "problems": problems, **extra}


# ------------------------------------------------------------------ helpers


def _load_points(path: str) -> PointSet:
    return fio.parse_points(fio.read_text(path), source=path)


def _load_curve(path: str, ps: PointSet | None = None) -> PolygonalCurve:
    c = fio.parse_curve(fio.read_text(path), source=path)
    if ps is not None:
        for k, (v, i) in enumerate(zip(c.vertices, c.ids)):
            if i is not None and (not 0 <= i < ps.n or ps.coords[i] != v):
                raise fio.FormatError(f"vertex {k} does not match point {i}", None, None, path)
    return c


def _load_json(path: str, kind: type):
    obj = fio.from_json(fio.read_text(path), source=path)
    if not isinstance(obj, kind):
        raise fio.FormatError(f"expected a {kind.__name__} record", None, None, path)
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        fio.write_text(out, text)
    else:
        sys.stdout.write(text)


def _say(*parts) -> None:
    print(*parts)


def _svg_beside(csv_path: str | None) -> str | None:
    return str(Path(csv_path).with_suffix(".svg")) if csv_path else None


# ------------------------------------------------------------------ commands


def cmd_gen(a) -> None:
    if a.family == "random":
        ps = gen_random(a.n, a.seed)
    elif a.family == "convex":
        ps = gen_convex(a.n, a.seed)
    elif a.family == "grid":
        ps = gen_perturbed_grid(a.w, a.h, a.seed)
        if a.arrangement_out:
            fio.write_text(a.arrangement_out, fio.dump_arrangement(grid_isolating_arrangement(ps, a.w, a.h)))
    else:
        try:
            inst = gen_theorem32(a.m, a.seed)
        except GeometryError as exc:
            raise Failure("gen", [str(exc)]) from None
        ps = inst.points
        if a.curve_out:
            fio.write_text(a.curve_out, fio.dump_curve(inst.curve))
        print(json.dumps(inst.certificates, sort_keys=True), file=sys.stderr)
    _emit(fio.dump_points(ps), a.output)


def cmd_con(a) -> None:
    ps = _load_points(a.points)
    res = convex_number(ps)
    if res.value >= 3:
        if not is_simple(PolygonalCurve.from_order(res.witness, ps)):
            raise Failure("con", ["witness polygon is not convex"])
        if a.output:
            fio.write_text(a.output, fio.dump_curve(PolygonalCurve.from_order(res.witness, ps)))
    _say(res.value)


def cmd_cut_exact(a) -> None:
    ps = _load_points(a.points)
    res = cut_number_exact(ps, a.k, a.budget)
    got = max_cell(classify(ps, res.witness))
    if got != res.value:
        raise Failure("cut-exact", [f"witness max cell {got} differs from reported {res.value}"])
    if a.output:
        fio.write_text(a.output, fio.dump_arrangement(res.witness))
    if a.stats:
        fio.write_text(a.stats, fio.to_json(res))
    _say(res.value if res.exhaustive else f"{res.value} (budget reached, upper bound)")


def cmd_cut_construct(a) -> None:
    ps = _load_points(a.points)
    if (a.k is None) == (a.h is None):
        raise GeometryError("give exactly one of --k or --h")
    if a.k is not None:
        arr = cutting_arrangement(ps, a.k)
        bound = -(-ps.n // (2 * a.k))
    else:
        arr = bounded_cell_arrangement(ps, a.h)
        bound = a.h
    got = max_cell(classify(ps, arr))
    if got > bound:
        raise Failure("cut-construct", [f"max cell {got} exceeds {bound}"])
    _emit(fio.dump_arrangement(arr), a.output)
    print(f"K={arr.K} max_cell={got}", file=sys.stderr)


def cmd_partial_cut(a) -> None:
    ps = _load_points(a.points)
    pc = partial_cutting(ps, a.h, a.l)
    problems = [f"cell {k} evaluates to {len(pc.evaluate(c, ps))} points" for k, c in enumerate(pc.carved) if len(pc.evaluate(c, ps)) != a.h]
    if problems:
        raise Failure("partial-cut", problems)
    _emit(fio.to_json(pc), a.output)


def cmd_stab(a) -> None:
    if a.kind == "polygon":
        c = _load_curve(a.files[0])
        if not is_simple(c):
            raise Failure("stab", ["curve is not simple"])
        rep = stab_polygon(c)
    elif a.kind == "union":
        rep = stab_union(CurveUnion.of(*(_load_curve(f) for f in a.files)))
    else:
        if len(a.files) != 2:
            raise GeometryError("stab tree needs POINTS TREE")
        ps = _load_points(a.files[0])
        tree = _load_json(a.files[1], SpanningTree)
        if tree.n != ps.n:
            raise fio.FormatError("tree size does not match the point set", None, None, a.files[1])
        rep = tree_stab(tree, ps)
    if rep.recount() != rep.value:
        raise Failure("stab", ["witness line does not realise the reported count"])
    _say(rep.value)


def cmd_tree(a) -> None:
    ps = _load_points(a.points)
    tree = low_stab_spanning_tree(ps, max_test_lines=a.max_test_lines, seed=a.seed)
    _emit(fio.to_json(tree), a.output)
    print(f"stab={tree_stab(tree, ps).value}", file=sys.stderr)


def cmd_tour(a) -> None:
    ps = _load_points(a.points)
    tree = _load_json(a.tree, SpanningTree)
    order = preorder_tour(tree, a.root, ps)
    _emit(fio.dump_curve(PolygonalCurve.from_order(order, ps)), a.output)


def cmd_uncross(a) -> None:
    ps = _load_points(a.points)
    tour = _load_curve(a.curve, ps)
    if None in tour.ids:
        raise fio.FormatError("a tour may only visit points", None, None, a.curve)
    before = stab_segments(tour.edges).value
    out = uncross(list(tour.ids), ps)
    after = stab_polygon(out).value
    if not is_simple(out) or after > before:
        raise Failure("uncross", [f"output simple={is_simple(out)}, stab {before} -> {after}"])
    _emit(fio.dump_curve(out), a.output)
    print(f"stab {before} -> {after}", file=sys.stderr)


def cmd_glue(a) -> None:
    ps = _load_points(a.points) if a.points else None
    p, q = (_load_curve(f, ps) for f in a.curves)
    try:
        out = glue_pair(p, q, ps)
    except NotSimpleError:
        raise
    except GeometryError as exc:
        if "not linearly separable" in str(exc) or "share a vertex" in str(exc):
            raise
        raise Failure("glue", [str(exc)]) from None
    bound = stab_polygon(p).value + stab_polygon(q).value + 2
    got = stab_polygon(out).value
    problems = []
    if got > bound:
        problems.append(f"stab {got} exceeds {bound}")
    if out.member_ids != p.member_ids | q.member_ids:
        problems.append("members not preserved")
    if problems:
        raise Failure("glue", problems)
    _emit(fio.dump_curve(out), a.output)
    print(f"stab={got} bound={bound}", file=sys.stderr)


def cmd_degree(a) -> None:
    ps = _load_points(a.points)
    res = degree_exact(ps) if a.mode == "exact" else degree_upper(ps, seed=a.seed)
    w = res.witness
    if not is_simple(w) or w.member_ids != frozenset(range(ps.n)) or stab_polygon(w).value != res.value:
        raise Failure("degree", ["witness does not certify the value"])
    if a.output:
        fio.write_text(a.output, fio.dump_curve(w))
    _say(res.value)


def cmd_fnd(a) -> None:
    ps = _load_points(a.points)
    cfg = FndConfig(a.n, a.d, a.h, a.source_size)
    if a.verify:
        w = _load_json(a.verify, FndWitness)
    else:
        try:
            w = fnd_witness(ps, cfg, jobs=a.jobs)
        except FndFailure as exc:
            raise Failure("fnd", exc.diagnostics) from None
    sub = ps.subset(range(min(cfg.source_size, ps.n))) if cfg.source_size else ps
    problems = verify_fnd_witness(w, sub, cfg)
    if problems:
        raise Failure("fnd", problems)
    if not a.verify:
        _emit(fio.to_json(w), a.output)
    print(f"points={len(w.subset_ids)} stab={w.measured_stab} h={w.h_used}", file=sys.stderr)


def cmd_cut_report(a) -> None:
    ps = _load_points(a.points)
    curve = _load_curve(a.curve, ps) if a.curve else None
    rep = cut_bound_report(ps, a.k, curve=curve)
    text = rep.to_csv()
    _emit(text, a.output)
    svg = _svg_beside(a.output)
    if svg:
        render_table_svg(text, "ceiling", "description", svg, title=f"cut bounds, K={a.k}, N={ps.n}")
    if not rep.consistent():
        raise Failure("cut-report", ["a lower bound exceeds an upper bound"])


def cmd_survey(a) -> None:
    text = separation_survey(a.count, a.n, a.k, a.seed, Fraction(a.c), a.jobs)
    _emit(text, a.output)
    svg = _svg_beside(a.output)
    if svg:
        render_table_svg(text, "search_value", "instance", svg, title=f"best max cell, N={a.n}, K={a.k}")


def cmd_render(a) -> None:
    ps = _load_points(a.points) if a.points else None
    scene = Scene(
        points=ps,
        arrangement=fio.parse_arrangement(fio.read_text(a.arrangement), a.arrangement) if a.arrangement else None,
        cutting=_load_json(a.cutting, PartialCutting) if a.cutting else None,
        curves=[_load_curve(f, ps) for f in a.curve],
        trees=[_load_json(f, SpanningTree) for f in a.tree],
        title=a.title,
    )
    render_svg(scene, a.output)


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get(SEED_ENV, "0")
    try:
        default_seed = int(env_seed)
    except ValueError:
        default_seed = 0
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed, help=f"RNG seed (default ${SEED_ENV} or 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes; outputs do not depend on it")

    p = argparse.ArgumentParser(prog="equisep", description="Exact cutting, convexity and stabbing computations.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=fn)
        return sp

    g = add("gen", cmd_gen, "generate a point set")
    g.add_argument("family", choices=["random", "convex", "grid", "theorem32"])
    g.add_argument("--n", type=int, default=20, help="number of points (random, convex)")
    g.add_argument("--w", type=int, default=4, help="grid width")
    g.add_argument("--h", type=int, default=4, help="grid height")
    g.add_argument("--m", type=int, default=2, help="theorem32 parameter M (N = M^3)")
    g.add_argument("--curve-out", help="theorem32: write the certified curve here")
    g.add_argument("--arrangement-out", help="grid: write the isolating arrangement here")
    g.add_argument("-o", "--output", help="points file (default stdout)")

    c = add("con", cmd_con, "print the convex number")
    c.add_argument("points")
    c.add_argument("-o", "--output", help="write the convex polygon here")

    c = add("cut-exact", cmd_cut_exact, "exact cutting number by branch and bound")
    c.add_argument("points")
    c.add_argument("--k", type=int, required=True, help="number of lines")
    c.add_argument("--budget", type=int, default=5_000_000, help="search node limit")
    c.add_argument("-o", "--output", help="write the witness arrangement here")
    c.add_argument("--stats", help="write the search record (JSON) here")

    c = add("cut-construct", cmd_cut_construct, "bounded-cell arrangement (give --k or --h)")
    c.add_argument("points")
    c.add_argument("--k", type=int, help="number of lines")
    c.add_argument("--h", type=int, help="cell bound H")
    c.add_argument("-o", "--output", help="arrangement file (default stdout)")

    c = add("partial-cut", cmd_partial_cut, "partial cutting with cells of exactly H points")
    c.add_argument("points")
    c.add_argument("--h", type=int, required=True, help="cell size H")
    c.add_argument("--l", type=int, required=True, help="number of lines L")
    c.add_argument("-o", "--output", help="JSON file (default stdout)")

    c = add("stab", cmd_stab, "exact stabbing number")
    c.add_argument("kind", choices=["polygon", "union", "tree"])
    c.add_argument("files", nargs="+", help="curve file(s), or POINTS TREE for 'tree'")

    c = add("tree", cmd_tree, "low-stabbing spanning tree")
    c.add_argument("points")
    c.add_argument("--max-test-lines", type=int, default=4096, help="sampled test line classes")
    c.add_argument("-o", "--output", help="JSON file (default stdout)")

    c = add("tour", cmd_tour, "preorder tour of a tree, as a curve file")
    c.add_argument("points")
    c.add_argument("tree")
    c.add_argument("--root", type=int, default=0, help="root point id")
    c.add_argument("-o", "--output", help="curve file (default stdout)")

    c = add("uncross", cmd_uncross, "2-opt uncrossing of a tour into a simple polygon")
    c.add_argument("points")
    c.add_argument("curve", help="tour as a curve file")
    c.add_argument("-o", "--output", help="curve file (default stdout)")

    c = add("glue", cmd_glue, "glue two separable simple curves")
    c.add_argument("curves", nargs=2)
    c.add_argument("--points", help="points file the curve ids refer to")
    c.add_argument("-o", "--output", help="curve file (default stdout)")

    c = add("degree", cmd_degree, "degree: exact (N <= 9) or heuristic upper bound")
    c.add_argument("mode", choices=["exact", "upper"])
    c.add_argument("points")
    c.add_argument("-o", "--output", help="write the witness curve here")

    c = add("fnd", cmd_fnd, "curve through n points with stab <= d")
    c.add_argument("points")
    c.add_argument("--n", type=int, required=True, help="points required on the curve")
    c.add_argument("--d", type=int, required=True, help="stabbing bound")
    c.add_argument("--h", type=int, help="start the h ladder here")
    c.add_argument("--source-size", type=int, help="use only the first S points")
    c.add_argument("--verify", metavar="WITNESS", help="re-verify a saved witness instead of building one")
    c.add_argument("-o", "--output", help="witness JSON (default stdout)")

    c = add("cut-report", cmd_cut_report, "cutting-number bounds as CSV (SVG figure beside it)")
    c.add_argument("points")
    c.add_argument("--k", type=int, required=True, help="number of lines")
    c.add_argument("--curve", help="curve through all points, bounds the degree")
    c.add_argument("-o", "--output", help="CSV file (default stdout)")

    c = add("survey", cmd_survey, "equal-separation survey over seeded random sets")
    c.add_argument("--count", type=int, default=10, help="instances")
    c.add_argument("--n", type=int, default=10, help="points per instance")
    c.add_argument("--k", type=int, default=2, help="number of lines")
    c.add_argument("--c", default="1", help="threshold factor (rational)")
    c.add_argument("-o", "--output", help="CSV file (default stdout)")

    c = add("render", cmd_render, "render a scene to SVG")
    c.add_argument("-o", "--output", required=True, help="SVG file")
    c.add_argument("--points")
    c.add_argument("--arrangement")
    c.add_argument("--cutting", help="partial cutting JSON")
    c.add_argument("--curve", action="append", default=[])
    c.add_argument("--tree", action="append", default=[], help="tree JSON (needs --points)")
    c.add_argument("--title", default="")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        a.func(a)
    except Failure as f:
        print(json.dumps(f.record, sort_keys=True), file=sys.stderr)
        return 1
    except (NotSimpleError, AssertionError) as exc:
        print(json.dumps({"status": "failure", "command": a.command, "problems": [str(exc)]}, sort_keys=True), file=sys.stderr)
        return 1
    except fio.FormatError as exc:
        print(f"equisep: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"equisep: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
