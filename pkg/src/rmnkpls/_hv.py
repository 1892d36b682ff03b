"""Jitted exact hypervolume kernels (maximization, reference point at the origin).

Single shared implementation used by both the archivers and the quality
indicators.  The algorithm is a dimension sweep: points are processed in
decreasing order of the last objective; each slab contributes
``height * hv(front of the projections active in the slab)``, and the
lower-dimensional hypervolume is maintained incrementally through exclusive
contributions of newly activated points.  The 2-D base case is a plain
staircase sweep.

All kernels are robust to dominated or duplicated input rows (they contribute
exactly zero), and all floating-point accumulation orders are fixed by stable
sorts, so results are deterministic for a given input array.
"""

import numpy as np
from numba import njit

__all__ = ["hv_nd", "exclusive_contribution", "nondominated_compact"]


@njit(cache=True)
def nondominated_compact(pts, count):
    """Compact pts[:count] to its mutually nondominated, distinct rows.

    Keeps the first occurrence of duplicated vectors; preserves relative
    order of survivors.  Returns the new row count.
    """
    m = pts.shape[1]
    w = 0
    for i in range(count):
        keep = True
        for j in range(count):
            if j == i:
                continue
            ge = True
            eq = True
            for d in range(m):
                if pts[j, d] < pts[i, d]:
                    ge = False
                    break
                if pts[j, d] != pts[i, d]:
                    eq = False
            if ge and not eq:
                keep = False
                break
            if ge and eq and j < i:
                keep = False
                break
        if keep:
            if w != i:
                for d in range(m):
                    pts[w, d] = pts[i, d]
            w += 1
    return w


@njit(cache=True)
def _lexsort_rows(pts, count):
    """In-place insertion sort of pts[:count] into ascending lexicographic order."""
    m = pts.shape[1]
    row = np.empty(m, dtype=np.float64)
    for i in range(1, count):
        for d in range(m):
            row[d] = pts[i, d]
        j = i - 1
        while j >= 0:
            larger = False
            for d in range(m):
                if pts[j, d] != row[d]:
                    larger = pts[j, d] > row[d]
                    break
            if not larger:
                break
            for d in range(m):
                pts[j + 1, d] = pts[j, d]
            j -= 1
        for d in range(m):
            pts[j + 1, d] = row[d]


@njit(cache=True)
def _hv2(pts, count):
    """2-D staircase sweep; tolerates dominated rows (zero-width strips)."""
    if count == 0:
        return 0.0
    order = np.argsort(pts[:count, 0], kind="mergesort")
    total = 0.0
    ymax = 0.0
    for t in range(count - 1, -1, -1):
        i = order[t]
        if pts[i, 1] > ymax:
            total += pts[i, 0] * (pts[i, 1] - ymax)
            ymax = pts[i, 1]
    return total


@njit(cache=True)
def _hv3(pts, count):
    if count == 0:
        return 0.0
    neg = np.empty(count, dtype=np.float64)
    for i in range(count):
        neg[i] = -pts[i, 2]
    order = np.argsort(neg, kind="mergesort")
    front = np.empty((count, 2), dtype=np.float64)
    clip = np.empty((count, 2), dtype=np.float64)
    nfront = 0
    area = 0.0
    total = 0.0
    for t in range(count):
        i = order[t]
        x = pts[i, 0]
        y = pts[i, 1]
        dominated = False
        for f in range(nfront):
            if front[f, 0] >= x and front[f, 1] >= y:
                dominated = True
                break
        if not dominated:
            for f in range(nfront):
                clip[f, 0] = min(front[f, 0], x)
                clip[f, 1] = min(front[f, 1], y)
            area += x * y - _hv2(clip, nfront)
            w = 0
            for f in range(nfront):
                if front[f, 0] <= x and front[f, 1] <= y:
                    continue
                if w != f:
                    front[w, 0] = front[f, 0]
                    front[w, 1] = front[f, 1]
                w += 1
            front[w, 0] = x
            front[w, 1] = y
            nfront = w + 1
        z_next = pts[order[t + 1], 2] if t + 1 < count else 0.0
        total += area * (pts[i, 2] - z_next)
    return total


@njit(cache=True)
def _hv4(pts, count):
    if count == 0:
        return 0.0
    neg = np.empty(count, dtype=np.float64)
    for i in range(count):
        neg[i] = -pts[i, 3]
    order = np.argsort(neg, kind="mergesort")
    front = np.empty((count, 3), dtype=np.float64)
    clip = np.empty((count, 3), dtype=np.float64)
    nfront = 0
    area = 0.0
    total = 0.0
    for t in range(count):
        i = order[t]
        dominated = False
        for f in range(nfront):
            if front[f, 0] >= pts[i, 0] and front[f, 1] >= pts[i, 1] and front[f, 2] >= pts[i, 2]:
                dominated = True
                break
        if not dominated:
            for f in range(nfront):
                for d in range(3):
                    clip[f, d] = min(front[f, d], pts[i, d])
            nclip = nondominated_compact(clip, nfront)
            area += pts[i, 0] * pts[i, 1] * pts[i, 2] - _hv3(clip, nclip)
            w = 0
            for f in range(nfront):
                if front[f, 0] <= pts[i, 0] and front[f, 1] <= pts[i, 1] and front[f, 2] <= pts[i, 2]:
                    continue
                if w != f:
                    for d in range(3):
                        front[w, d] = front[f, d]
                w += 1
            for d in range(3):
                front[w, d] = pts[i, d]
            nfront = w + 1
        z_next = pts[order[t + 1], 3] if t + 1 < count else 0.0
        total += area * (pts[i, 3] - z_next)
    return total


@njit(cache=True)
def _hv5(pts, count):
    if count == 0:
        return 0.0
    neg = np.empty(count, dtype=np.float64)
    for i in range(count):
        neg[i] = -pts[i, 4]
    order = np.argsort(neg, kind="mergesort")
    front = np.empty((count, 4), dtype=np.float64)
    clip = np.empty((count, 4), dtype=np.float64)
    nfront = 0
    area = 0.0
    total = 0.0
    for t in range(count):
        i = order[t]
        dominated = False
        for f in range(nfront):
            if (
                front[f, 0] >= pts[i, 0]
                and front[f, 1] >= pts[i, 1]
                and front[f, 2] >= pts[i, 2]
                and front[f, 3] >= pts[i, 3]
            ):
                dominated = True
                break
        if not dominated:
            for f in range(nfront):
                for d in range(4):
                    clip[f, d] = min(front[f, d], pts[i, d])
            nclip = nondominated_compact(clip, nfront)
            vol = pts[i, 0] * pts[i, 1] * pts[i, 2] * pts[i, 3]
            area += vol - _hv4(clip, nclip)
            w = 0
            for f in range(nfront):
                if (
                    front[f, 0] <= pts[i, 0]
                    and front[f, 1] <= pts[i, 1]
                    and front[f, 2] <= pts[i, 2]
                    and front[f, 3] <= pts[i, 3]
                ):
                    continue
                if w != f:
                    for d in range(4):
                        front[w, d] = front[f, d]
                w += 1
            for d in range(4):
                front[w, d] = pts[i, d]
            nfront = w + 1
        z_next = pts[order[t + 1], 4] if t + 1 < count else 0.0
        total += area * (pts[i, 4] - z_next)
    return total


@njit(cache=True)
def hv_nd(pts, count):
    """Exact hypervolume of pts[:count] for 1 to 5 objectives."""
    m = pts.shape[1]
    if count == 0:
        return 0.0
    if m == 1:
        best = 0.0
        for i in range(count):
            if pts[i, 0] > best:
                best = pts[i, 0]
        return best
    if m == 2:
        return _hv2(pts, count)
    if m == 3:
        return _hv3(pts, count)
    if m == 4:
        return _hv4(pts, count)
    return _hv5(pts, count)


@njit(cache=True)
def exclusive_contribution(objs, count, idx):
    """Volume dominated only by row idx among objs[:count].

    Computed as vol(box(idx)) minus the hypervolume of the other boxes
    clipped into box(idx).  The clipped set is reduced and sorted into a
    canonical order first, so the result depends only on the *set* of
    clipped vectors, not on the ordering of the archive that produced it.
    """
    m = objs.shape[1]
    vol = 1.0
    for d in range(m):
        vol *= objs[idx, d]
    clip = np.empty((count - 1 if count > 0 else 0, m), dtype=np.float64)
    w = 0
    for j in range(count):
        if j == idx:
            continue
        for d in range(m):
            clip[w, d] = min(objs[j, d], objs[idx, d])
        w += 1
    w = nondominated_compact(clip, w)
    _lexsort_rows(clip, w)
    return vol - hv_nd(clip, w)
