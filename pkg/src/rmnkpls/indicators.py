"""Set-quality indicators against an exact reference front (maximization).

The hypervolume reference point is the origin.  hvr is the relative
hypervolume shortfall (hv(P) - hv(A)) / hv(P); mult_epsilon is the smallest
factor by which A must be scaled so that it weakly dominates P:
max over p of min over a of max over coordinates of p_i / a_i.
"""

from __future__ import annotations

import numpy as np

from . import _hv, _kernels
from .pareto import nondominated_filter

__all__ = ["hypervolume", "hvr", "mult_epsilon"]


def _as_points(points, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array-like of objective vectors")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def hypervolume(points) -> float:
    """Measure of the union of boxes [0, p_1] x ... x [0, p_m].

    Exact for up to five objectives (a slower recursive path covers more);
    coordinates must be nonnegative.  An empty set has hypervolume 0.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    arr = _as_points(arr, "points")
    if arr.min() < 0.0:
        raise ValueError("hypervolume requires nonnegative coordinates")
    if arr.shape[1] <= 5:
        return float(_hv.hv_nd(arr, arr.shape[0]))
    return _hv_highdim(arr)


def _hv_highdim(pts: np.ndarray) -> float:
    # slab sweep over the last objective; exact but quadratic, only used
    # beyond five objectives
    if pts.shape[1] <= 5:
        arr = np.ascontiguousarray(pts)
        return float(_hv.hv_nd(arr, arr.shape[0]))
    order = np.argsort(-pts[:, -1], kind="stable")
    total = 0.0
    for t in range(len(order)):
        z = pts[order[t], -1]
        z_next = pts[order[t + 1], -1] if t + 1 < len(order) else 0.0
        if z > z_next:
            front = nondominated_filter(pts[order[: t + 1], :-1])
            total += (z - z_next) * _hv_highdim(front)
    return total


def hvr(a_points, p_points) -> float:
    """Relative hypervolume shortfall of A against the exact front P.

    Requires hv(P) > 0 and every point of A weakly dominated by some point
    of P; then the value lies in [0, 1), with 0 exactly when the two sets
    induce the same hypervolume.
    """
    hv_p = hypervolume(p_points)
    if hv_p == 0.0:
        raise ValueError("hvr undefined: reference front has zero hypervolume")
    return (hv_p - hypervolume(a_points)) / hv_p


def mult_epsilon(a_points, p_points) -> float:
    """Smallest multiplicative shift of A that weakly dominates P.

    Requires strictly positive coordinates in A (a zero coordinate is an
    error, never silently floored).  At least 1 whenever A lies in the
    region weakly dominated by P; exactly 1 when A weakly dominates P.
    """
    a = _as_points(a_points, "a_points")
    p = _as_points(p_points, "p_points")
    if a.shape[0] == 0 or p.shape[0] == 0:
        raise ValueError("mult_epsilon requires nonempty point sets")
    if a.shape[1] != p.shape[1]:
        raise ValueError("dimension mismatch between the two point sets")
    if a.min() <= 0.0:
        raise ValueError("mult_epsilon requires strictly positive coordinates in A")
    return float(_kernels.epsilon_max_min_ratio(a, p))
