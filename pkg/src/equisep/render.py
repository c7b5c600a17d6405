"""SVG figures.  The only place where exact coordinates become floats."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from .arrangements import Arrangement, PartialCutting  # noqa: E402
from .geom import ConcreteLine, PointSet  # noqa: E402
from .stabbing import PolygonalCurve, SpanningTree  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "equisep"
matplotlib.rcParams["svg.fonttype"] = "none"


class SceneError(ValueError):
    pass


@dataclass
class Scene:
    points: PointSet | None = None
    arrangement: Arrangement | None = None
    cutting: PartialCutting | None = None
    curves: list[PolygonalCurve] = field(default_factory=list)
    trees: list[SpanningTree] = field(default_factory=list)
    highlight: Sequence[int] = ()
    title: str = ""

    def validate(self) -> None:
        n = self.points.n if self.points is not None else 0
        for t in self.trees:
            if self.points is None or t.n != n:
                raise SceneError("tree does not match the scene's point set")
        for i in self.highlight:
            if not 0 <= i < n:
                raise SceneError(f"highlighted id {i} is not a scene point")
        if self.cutting is not None:
            for cell in self.cutting.carved:
                if any(not 0 <= i < n for i in cell.members):
                    raise SceneError("carved cell refers to missing points")


def _bbox(scene: Scene) -> tuple[float, float, float, float]:
    xs, ys = [], []
    if scene.points is not None:
        xs += [float(x) for x, _ in scene.points.coords]
        ys += [float(y) for _, y in scene.points.coords]
    for c in scene.curves:
        xs += [float(x) for x, _ in c.vertices]
        ys += [float(y) for _, y in c.vertices]
    if not xs:
        return (0.0, 1.0, 0.0, 1.0)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    m = 0.08 * span
    return (x0 - m, x1 + m, y0 - m, y1 + m)


def _clip(line: ConcreteLine, box, halfplanes: Sequence[tuple[ConcreteLine, int]] = ()):
    """Portion of ``line`` inside ``box`` and on the given sides of other lines."""
    a, b, c = float(line.a), float(line.b), float(line.c)
    x0, x1, y0, y1 = box
    # parametrise p(t) = p0 + t * d
    n2 = a * a + b * b
    p0 = (a * c / n2, b * c / n2)
    d = (-b, a)
    lo, hi = -1e300, 1e300
    for coef, off, low, high in ((d[0], p0[0], x0, x1), (d[1], p0[1], y0, y1)):
        if abs(coef) < 1e-300:
            if not low <= off <= high:
                return None
            continue
        t1, t2 = (low - off) / coef, (high - off) / coef
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    for other, sign in halfplanes:
        oa, ob, oc = float(other.a) * sign, float(other.b) * sign, float(other.c) * sign
        # oa*x + ob*y - oc > 0 along p(t)
        k = oa * d[0] + ob * d[1]
        base = oa * p0[0] + ob * p0[1] - oc
        if abs(k) < 1e-300:
            if base <= 0:
                return None
            continue
        t = -base / k
        if k > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if lo >= hi:
        return None
    return (p0[0] + lo * d[0], p0[1] + lo * d[1]), (p0[0] + hi * d[0], p0[1] + hi * d[1])


def _save(fig: Figure, path: str | Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def render_svg(scene: Scene, path: str | Path) -> None:
    scene.validate()
    box = _bbox(scene)
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot(1, 1, 1)
    ax.set_xlim(box[0], box[1])
    ax.set_ylim(box[2], box[3])
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    if scene.title:
        ax.set_title(scene.title)
    if scene.arrangement is not None:
        for ln in scene.arrangement.lines:
            seg = _clip(ln, box)
            if seg:
                ax.plot([seg[0][0], seg[1][0]], [seg[0][1], seg[1][1]], color="0.45", lw=0.8)
    if scene.cutting is not None:
        pc = scene.cutting
        seg = _clip(pc.split_line, box)
        if seg:
            ax.plot([seg[0][0], seg[1][0]], [seg[0][1], seg[1][1]], color="black", lw=1.2)
        for k, cut in enumerate(pc.cuts):
            # later cuts stop where they enter an earlier carved half-plane
            seg = _clip(cut, box, [(pc.cuts[s], -1) for s in range(k)])
            if seg:
                ax.plot([seg[0][0], seg[1][0]], [seg[0][1], seg[1][1]], color="tab:blue", lw=1.0)
        if scene.points is not None:
            for ci, cell in enumerate(pc.carved):
                pts = [scene.points.coords[i] for i in cell.members]
                ax.scatter([float(x) for x, _ in pts], [float(y) for _, y in pts], s=10, color=f"C{ci % 10}", zorder=3)
    for tree in scene.trees:
        co = scene.points.coords
        for u, v in tree.edges:
            ax.plot([float(co[u][0]), float(co[v][0])], [float(co[u][1]), float(co[v][1])], color="tab:green", lw=0.8)
    for ci, curve in enumerate(scene.curves):
        xs = [float(x) for x, _ in curve.vertices] + [float(curve.vertices[0][0])]
        ys = [float(y) for _, y in curve.vertices] + [float(curve.vertices[0][1])]
        ax.plot(xs, ys, color="tab:red" if ci == 0 else f"C{(ci + 3) % 10}", lw=1.0)
    if scene.points is not None and scene.cutting is None:
        co = scene.points.coords
        ax.scatter([float(x) for x, _ in co], [float(y) for _, y in co], s=8, color="black", zorder=3)
    if scene.highlight:
        co = scene.points.coords
        ax.scatter(
            [float(co[i][0]) for i in scene.highlight], [float(co[i][1]) for i in scene.highlight], s=22, color="tab:orange", zorder=4
        )
    _save(fig, path)


def render_table_svg(csv_text: str, value_column: str, label_column: str, path: str | Path, title: str = "") -> None:
    """Bar chart of one numeric CSV column."""
    rows = list(csv.DictReader(io.StringIO(csv_text)))
    labels, vals = [], []
    for r in rows:
        try:
            vals.append(float(r[value_column]))
        except (KeyError, ValueError):
            continue
        labels.append(r.get(label_column, ""))
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot(1, 1, 1)
    ax.bar(range(len(vals)), vals, color="tab:blue")
    ax.set_xticks(range(len(vals)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel(value_column)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
