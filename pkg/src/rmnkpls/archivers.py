"""Archive update policies: unbounded, hypervolume (hva), multi-level grid (mga).

Each policy consumes one candidate at a time (a mu+1 step with one offspring).
All three first apply the unbounded rule: reject a candidate weakly dominated
by an entry, otherwise insert it unvisited and drop entries it dominates.
The bounded policies then evict exactly one entry whenever the archive would
exceed its capacity:

* hva removes the entry with the smallest exclusive hypervolume contribution
  (reference point at the origin); ties go to the lexicographically smallest
  objective vector, then the smallest insertion index.
* mga discretizes objectives to a 2**30 grid, finds the smallest level b at
  which some entry's box is covered by another's (componentwise >= on
  box coordinates floor-divided by 2**b), rejects the candidate if it is
  covered at that level, and otherwise removes the oldest covered entry.

The evicted entry may be the candidate itself; the archive is then unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, pareto
from .indicators import hypervolume
from .pareto import Archive, ArchiveEntry

__all__ = [
    "AddResult",
    "ARCHIVER_NAMES",
    "unbounded_add",
    "hva_add",
    "mga_add",
    "archiver_add",
    "hv_contribution",
    "discretize",
    "GRID_DEPTH",
]

ARCHIVER_NAMES = ("unb", "hva", "mga")
_ARCHIVER_CODES = {
    "unb": _kernels.ARCHIVER_UNB,
    "hva": _kernels.ARCHIVER_HVA,
    "mga": _kernels.ARCHIVER_MGA,
}
GRID_DEPTH = _kernels.GRID_DEPTH


@dataclass
class AddResult:
    """Outcome of one archiver step.

    accepted is False when the candidate was rejected or was itself the
    evicted entry; the archive is then unchanged and removed is empty.
    """

    accepted: bool
    removed: list[ArchiveEntry] = field(default_factory=list)


def _add(archive: Archive, solution: int, objectives, name: str) -> AddResult:
    obj = np.asarray(objectives, dtype=np.float64)
    if obj.shape != (archive.m,):
        raise ValueError(f"objective vector must have shape ({archive.m},)")
    if not 0 <= solution < (1 << archive.n):
        raise ValueError(f"solution out of range for n={archive.n}")
    code = _ARCHIVER_CODES[name]
    if name == "unb":
        if archive.capacity is not None:
            raise ValueError("unbounded_add requires an archive without capacity")
        if len(archive) + 2 > archive.sols.shape[0]:
            archive.grow(len(archive) + 2)
        mu = -1
    else:
        if archive.capacity is None:
            raise ValueError(f"{name}_add requires a bounded archive")
        if len(archive) > archive.capacity:
            raise ValueError("archive already exceeds its capacity")
        mu = archive.capacity
    accepted, removed_count = _kernels.archive_add(
        archive.sols,
        archive.objs,
        archive.visited,
        archive.ins,
        archive.contribs,
        archive.stale,
        archive.grid,
        archive.meta,
        code,
        mu,
        solution,
        obj,
        archive.rem_sols,
        archive.rem_objs,
        archive.rem_visited,
        archive.rem_ins,
    )
    removed = [
        ArchiveEntry(
            solution=int(archive.rem_sols[i]),
            objectives=archive.rem_objs[i].copy(),
            visited=bool(archive.rem_visited[i]),
            insertion_index=int(archive.rem_ins[i]),
        )
        for i in range(removed_count)
    ]
    if pareto.DEBUG_CHECKS:
        archive.check_invariants()
    return AddResult(accepted=bool(accepted), removed=removed)


def unbounded_add(archive: Archive, solution: int, objectives) -> AddResult:
    """Unbounded rule: accept unless weakly dominated; drop dominated entries."""
    return _add(archive, solution, objectives, "unb")


def hva_add(archive: Archive, solution: int, objectives) -> AddResult:
    """Unbounded rule, then evict the minimal hypervolume contributor on overflow."""
    return _add(archive, solution, objectives, "hva")


def mga_add(archive: Archive, solution: int, objectives) -> AddResult:
    """Unbounded rule, then evict by critical-level grid coverage on overflow."""
    return _add(archive, solution, objectives, "mga")


def archiver_add(name: str, archive: Archive, solution: int, objectives) -> AddResult:
    """Dispatch by archiver identifier: unb, hva, or mga."""
    if name not in _ARCHIVER_CODES:
        raise ValueError(f"unknown archiver {name!r}; expected one of {ARCHIVER_NAMES}")
    return _add(archive, solution, objectives, name)


def hv_contribution(points, index: int) -> float:
    """Leave-one-out hypervolume contribution of points[index].

    hv(points) - hv(points without the indexed row), reference at the origin;
    points must be mutually nondominated.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("points must be a 2-D array-like")
    if not 0 <= index < arr.shape[0]:
        raise IndexError(f"index {index} out of range for {arr.shape[0]} points")
    rest = np.delete(arr, index, axis=0)
    return hypervolume(arr) - hypervolume(rest)


def discretize(v, depth: int) -> np.ndarray:
    """Grid coordinates floor(v * 2**depth); requires every v_i in [0, 1).

    Monotone: componentwise v <= w implies coords(v) <= coords(w), and the
    scaling by a power of two is exact, so coordinates stay below 2**depth.
    """
    arr = np.asarray(v, dtype=np.float64)
    if depth < 0 or depth > 62:
        raise ValueError("depth must be in [0, 62]")
    if arr.size and (arr.min() < 0.0 or arr.max() >= 1.0):
        raise ValueError("values must lie in [0, 1)")
    return np.floor(arr * float(1 << depth)).astype(np.int64)
