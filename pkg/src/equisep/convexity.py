"""Largest subsets in convex position."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from typing import Sequence

import numpy as np

from .geom import PointSet, convex_hull, cross


@dataclass(frozen=True)
class ConvexResult:
    value: int
    witness: tuple[int, ...]  # hull order, counter-clockwise from the lowest point


def is_convex_position(ids: Sequence[int], ps: PointSet) -> bool:
    """True iff every listed point is a strict vertex of the hull of the listed points."""
    ids = list(ids)
    if len(set(ids)) != len(ids):
        raise ValueError("ids must be distinct")
    if len(ids) <= 3:
        return True
    coords = [ps.coords[i] for i in ids]
    return len(convex_hull(coords)) == len(ids)


def convex_number(ps: PointSet, ids: Sequence[int] | None = None) -> ConvexResult:
    """Exact size of the largest subset in convex position, with a witness.

    For every choice of lowest vertex ``p`` the points above it are sorted by
    angle; ``best[j, k]`` is the longest convex chain ``p, ..., q_j, q_k``,
    extended from ``best[i, j]`` whenever ``q_i, q_j, q_k`` turn left.  Each
    ``j``-step is one vectorised orientation block.

    Ties keep the first maximum in (lowest point, chain) scan order.
    """
    ids = list(range(ps.n)) if ids is None else list(ids)
    n = len(ids)
    if n <= 2:
        return ConvexResult(n, tuple(sorted(ids, key=lambda i: (ps.coords[i][1], ps.coords[i][0]))))
    xs_all, ys_all, _ = ps.scaled
    X, Y = ps.arrays
    order = sorted(ids, key=lambda i: (ys_all[i], xs_all[i]))
    best_val, best_wit = 0, ()
    for bpos, p in enumerate(order):
        above = order[bpos + 1:]
        m = len(above)
        if m + 1 <= best_val or m < 2:
            if m == 1 and best_val < 2:
                best_val, best_wit = 2, (p, above[0])
            continue
        px, py = xs_all[p], ys_all[p]

        def cmp(a, b):
            c = (xs_all[a] - px) * (ys_all[b] - py) - (ys_all[a] - py) * (xs_all[b] - px)
            return -1 if c > 0 else 1

        q = sorted(above, key=cmp_to_key(cmp))
        qx, qy = X[q], Y[q]
        dp = np.full((m, m), 3, dtype=np.int64)
        back = np.full((m, m), -1, dtype=np.int64)
        for j in range(1, m - 1):
            ux = qx[j] - qx[:j]
            uy = qy[j] - qy[:j]
            vx = qx[j + 1:] - qx[j]
            vy = qy[j + 1:] - qy[j]
            left = (np.outer(ux, vy) - np.outer(uy, vx)) > 0
            cand = np.where(left, dp[:j, j][:, None], 0)
            arg = cand.argmax(axis=0)
            val = cand[arg, np.arange(m - j - 1)]
            ext = val + 1 > 3
            dp[j, j + 1:] = np.where(ext, val + 1, 3)
            back[j, j + 1:] = np.where(ext, arg, -1)
        tri = np.triu(dp, 1)
        flat = int(tri.argmax())
        j, k = divmod(flat, m)
        val = int(tri[j, k])
        if val > best_val:
            chain = [k, j]
            while back[chain[-1], chain[-2]] >= 0:
                chain.append(int(back[chain[-1], chain[-2]]))
            best_val = val
            best_wit = (p,) + tuple(q[c] for c in reversed(chain))
    return ConvexResult(best_val, best_wit)


def convex_number_bruteforce(ps: PointSet) -> int:
    """Exhaustive oracle over all subsets (use only for small N)."""
    n = ps.n
    best = min(n, 2)
    for mask in range(1 << n):
        size = bin(mask).count("1")
        if size <= best:
            continue
        ids = [i for i in range(n) if mask >> i & 1]
        if is_convex_position(ids, ps):
            best = size
    return best


def four_point_probe(ps: PointSet) -> tuple[int, int, int, int] | None:
    """``None`` if ``ps`` is in convex position, else four ids not in convex position.

    A non-hull point lies in some fan triangle ``(h0, h_t, h_t+1)`` of the
    hull; those four points cannot be in convex position.
    """
    if ps.n < 4:
        raise ValueError("four_point_probe needs at least 4 points")
    hull = convex_hull(ps.coords)
    if len(hull) == ps.n:
        return None
    on_hull = set(hull)
    inner = next(i for i in range(ps.n) if i not in on_hull)
    c = ps.coords
    h0 = hull[0]
    for t in range(1, len(hull) - 1):
        a, b = hull[t], hull[t + 1]
        if cross(c[h0], c[a], c[inner]) >= 0 and cross(c[a], c[b], c[inner]) >= 0 and cross(c[b], c[h0], c[inner]) >= 0:
            return (h0, a, b, inner)
    raise AssertionError("interior point not located in the hull fan")
