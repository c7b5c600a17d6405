"""Text formats for every artifact.

Point sets, arrangements and curves use a line format::

    # equisep points v1
    N 3
    0 1/2 0
    1 3 -7/4
    2 0 1

(``K`` and rows ``a b c`` for arrangements; ``V`` and rows ``x y id`` with
``-`` for auxiliary vertices for curves).  Structured results are JSON with
rationals written as ``"p/q"`` strings and keys sorted.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .arrangements import Arrangement, CarvedCell, CutResult, PartialCutting
from .geom import ConcreteLine, PointSet, format_rational, to_rational
from .pipeline import FndWitness
from .stabbing import PolygonalCurve, SpanningTree

POINTS_MAGIC = "# equisep points v1"
ARRANGEMENT_MAGIC = "# equisep arrangement v1"
CURVE_MAGIC = "# equisep curve v1"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = "<input>"):
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.line, self.column = line, column


def _rat(tok: str, line: int, col: int, source: str) -> Fraction:
    try:
        return to_rational(tok)
    except (ValueError, ZeroDivisionError, TypeError):
        raise FormatError(f"not an exact rational: {tok!r}", line, col, source) from None


def _tokens(text: str, magic: str, count_key: str, source: str):
    """Yield (line number, [(column, token), ...]) for data rows after the header."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != magic:
        raise FormatError(f"expected header {magic!r}", 1, 1, source)
    count = None
    rows = []
    for no, raw in enumerate(lines[1:], start=2):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        toks = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            toks.append((col + 1, part))
            col += len(part)
        if count is None:
            if len(toks) != 2 or toks[0][1] != count_key:
                raise FormatError(f"expected '{count_key} <count>'", no, 1, source)
            try:
                count = int(toks[1][1])
            except ValueError:
                raise FormatError("count must be an integer", no, toks[1][0], source) from None
            if count < 0:
                raise FormatError("count must be non-negative", no, toks[1][0], source)
            continue
        rows.append((no, toks))
    if count is None:
        raise FormatError(f"missing '{count_key}' line", len(lines) + 1, 1, source)
    if len(rows) != count:
        raise FormatError(f"{count_key} says {count} rows, found {len(rows)}", len(lines), 1, source)
    return rows


# ------------------------------------------------------------------ points


def dump_points(ps: PointSet) -> str:
    out = [POINTS_MAGIC, f"N {ps.n}"]
    for p in ps:
        out.append(f"{p.id} {format_rational(p.x)} {format_rational(p.y)}")
    return "\n".join(out) + "\n"


def parse_points(text: str, source: str = "<input>") -> PointSet:
    coords = []
    for k, (no, toks) in enumerate(_tokens(text, POINTS_MAGIC, "N", source)):
        if len(toks) != 3:
            raise FormatError("expected 'id x y'", no, toks[0][0], source)
        if toks[0][1] != str(k):
            raise FormatError(f"ids must be dense from 0; expected {k}", no, toks[0][0], source)
        coords.append((_rat(toks[1][1], no, toks[1][0], source), _rat(toks[2][1], no, toks[2][0], source)))
    try:
        return PointSet(coords)
    except ValueError as exc:
        raise FormatError(str(exc), None, None, source) from None


# ------------------------------------------------------------ arrangements


def dump_arrangement(arr: Arrangement) -> str:
    out = [ARRANGEMENT_MAGIC, f"K {arr.K}"]
    for ln in arr.lines:
        out.append(" ".join(format_rational(v) for v in (ln.a, ln.b, ln.c)))
    return "\n".join(out) + "\n"


def parse_arrangement(text: str, source: str = "<input>") -> Arrangement:
    lines = []
    for no, toks in _tokens(text, ARRANGEMENT_MAGIC, "K", source):
        if len(toks) != 3:
            raise FormatError("expected 'a b c'", no, toks[0][0], source)
        a, b, c = (_rat(t, no, col, source) for col, t in toks)
        if a == 0 and b == 0:
            raise FormatError("degenerate line a = b = 0", no, 1, source)
        lines.append(ConcreteLine(a, b, c))
    return Arrangement(tuple(lines))


# ------------------------------------------------------------------ curves


def dump_curve(c: PolygonalCurve) -> str:
    out = [CURVE_MAGIC, f"V {c.n}"]
    for (x, y), i in zip(c.vertices, c.ids):
        out.append(f"{format_rational(x)} {format_rational(y)} {'-' if i is None else i}")
    return "\n".join(out) + "\n"


def parse_curve(text: str, source: str = "<input>") -> PolygonalCurve:
    verts, ids = [], []
    for no, toks in _tokens(text, CURVE_MAGIC, "V", source):
        if len(toks) != 3:
            raise FormatError("expected 'x y id'", no, toks[0][0], source)
        verts.append((_rat(toks[0][1], no, toks[0][0], source), _rat(toks[1][1], no, toks[1][0], source)))
        tok = toks[2][1]
        if tok == "-":
            ids.append(None)
        else:
            try:
                ids.append(int(tok))
            except ValueError:
                raise FormatError("id must be an integer or '-'", no, toks[2][0], source) from None
    try:
        return PolygonalCurve(tuple(verts), tuple(ids))
    except ValueError as exc:
        raise FormatError(str(exc), None, None, source) from None


# -------------------------------------------------------------------- JSON


def _q(v: Fraction) -> str:
    return format_rational(Fraction(v))


def _line_json(ln: ConcreteLine) -> list[str]:
    return [_q(ln.a), _q(ln.b), _q(ln.c)]


def _line_from(v) -> ConcreteLine:
    return ConcreteLine(*(to_rational(x) for x in v))


def _curve_json(c: PolygonalCurve) -> dict:
    return {"vertices": [[_q(x), _q(y)] for x, y in c.vertices], "ids": list(c.ids)}


def _curve_from(d) -> PolygonalCurve:
    return PolygonalCurve(tuple((to_rational(x), to_rational(y)) for x, y in d["vertices"]), tuple(d["ids"]))


def to_json(obj: Any) -> str:
    if isinstance(obj, PartialCutting):
        data = {
            "kind": "partial-cutting",
            "H": obj.H,
            "split": _line_json(obj.split_line),
            "cuts": [_line_json(c) for c in obj.cuts],
            "carved": [
                {"constraints": [list(c) for c in cell.constraints], "members": list(cell.members), "cut": cell.cut, "side": cell.side}
                for cell in obj.carved
            ],
            "residual": list(obj.residual),
        }
    elif isinstance(obj, SpanningTree):
        data = {"kind": "tree", "n": obj.n, "edges": [list(e) for e in obj.edges]}
    elif isinstance(obj, PolygonalCurve):
        data = {"kind": "curve", **_curve_json(obj)}
    elif isinstance(obj, CutResult):
        data = {
            "kind": "cut-result",
            "value": obj.value,
            "exhaustive": obj.exhaustive,
            "lines": [_line_json(ln) for ln in obj.witness.lines],
            "stats": {
                "nodes": obj.stats.nodes,
                "leaves": obj.stats.leaves,
                "pruned": obj.stats.pruned,
                "min_leaf": obj.stats.min_leaf,
            },
        }
    elif isinstance(obj, FndWitness):
        data = {
            "kind": "fnd-witness",
            "subset_ids": list(obj.subset_ids),
            "curve": _curve_json(obj.curve),
            "measured_stab": obj.measured_stab,
            "h_used": obj.h_used,
            "per_cell_convex_sizes": list(obj.per_cell_convex_sizes),
            "union_stab": obj.union_stab,
            "cell_size": obj.cell_size,
        }
    elif isinstance(obj, dict):
        data = obj
    else:
        raise TypeError(f"no JSON form for {type(obj).__name__}")
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def from_json(text: str, source: str = "<input>"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno, source) from None
    kind = data.get("kind") if isinstance(data, dict) else None
    try:
        if kind == "partial-cutting":
            cells = tuple(
                CarvedCell(tuple(tuple(c) for c in d["constraints"]), tuple(d["members"]), d["cut"], d["side"])
                for d in data["carved"]
            )
            return PartialCutting(
                _line_from(data["split"]), tuple(_line_from(c) for c in data["cuts"]), cells, tuple(data["residual"]), data["H"]
            )
        if kind == "tree":
            return SpanningTree(tuple(tuple(e) for e in data["edges"]), data["n"])
        if kind == "curve":
            return _curve_from(data)
        if kind == "fnd-witness":
            return FndWitness(
                tuple(data["subset_ids"]),
                _curve_from(data["curve"]),
                data["measured_stab"],
                data["h_used"],
                list(data["per_cell_convex_sizes"]),
                data.get("union_stab"),
                data.get("cell_size"),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed {kind} record: {exc}", None, None, source) from None
    raise FormatError(f"unknown record kind {kind!r}", 1, 1, source)


def read_text(path: str | Path) -> str:
    return Path(path).read_text()


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text)


__all__ = [
    "FormatError",
    "dump_points",
    "parse_points",
    "dump_arrangement",
    "parse_arrangement",
    "dump_curve",
    "parse_curve",
    "to_json",
    "from_json",
]
