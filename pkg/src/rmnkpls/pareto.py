"""Pareto dominance relations and the mutually nondominated archive.

All comparisons maximize.  A vector dominates another when it is
componentwise >= and not equal; equal vectors never dominate each other.
The archive keeps entries pairwise mutually nondominated with pairwise
distinct objective vectors: candidates weakly dominated by (including equal
to) an existing entry are rejected, which keeps duplicates out and matches
the weak-dominance coverage used for maximal PLO-sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .landscape import bits_to_str

__all__ = [
    "Dominance",
    "compare",
    "weakly_dominates",
    "nondominated_filter",
    "ArchiveEntry",
    "Archive",
]

# archiver python ops assert archive invariants after every update when set
DEBUG_CHECKS = False


class Dominance(Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.ndim != 1 or bv.ndim != 1 or av.shape != bv.shape:
        raise ValueError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    return av, bv


def compare(a, b) -> Dominance:
    """Dominance relation between two objective vectors (maximization)."""
    av, bv = _pair(a, b)
    a_ge = bool(np.all(av >= bv))
    b_ge = bool(np.all(bv >= av))
    if a_ge and b_ge:
        return Dominance.EQUAL
    if a_ge:
        return Dominance.DOMINATES
    if b_ge:
        return Dominance.DOMINATED_BY
    return Dominance.INCOMPARABLE


def weakly_dominates(a, b) -> bool:
    """True when a >= b componentwise."""
    av, bv = _pair(a, b)
    return bool(np.all(av >= bv))


def nondominated_filter(points) -> np.ndarray:
    """Distinct nondominated vectors of a multiset, lexicographically sorted.

    Dominated points are dropped; duplicated vectors collapse to one
    representative.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, arr.shape[1] if arr.ndim == 2 else 0)
    if arr.ndim != 2:
        raise ValueError("points must be a 2-D array-like of objective vectors")
    arr = np.ascontiguousarray(arr)
    mask = _kernels.pareto_mask(arr)
    return np.unique(arr[mask], axis=0)


@dataclass
class ArchiveEntry:
    solution: int
    objectives: np.ndarray
    visited: bool
    insertion_index: int


class Archive:
    """Mutually nondominated entries in insertion order, optionally bounded.

    Entries carry a visited flag for PLS and a monotone insertion index used
    as a deterministic tie-breaker by the bounded archivers.  The underlying
    numpy arrays are shared with the jitted kernels; one archive belongs to
    one run at a time.
    """

    def __init__(self, n: int, m: int, capacity: int | None = None):
        if n < 1 or m < 2:
            raise ValueError("need n >= 1 and m >= 2")
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be at least 1 when set")
        self.n = n
        self.m = m
        self.capacity = capacity
        # bounded archives hold at most capacity+1 entries transiently; the
        # extra n slots let a full PLS iteration run without regrowth
        size = capacity + n + 1 if capacity is not None else max(256, n + 2)
        self._alloc(size)
        self.meta = np.zeros(_kernels.META_SIZE, dtype=np.int64)

    def _alloc(self, size: int) -> None:
        self.sols = np.empty(size, dtype=np.int64)
        self.objs = np.empty((size, self.m), dtype=np.float64)
        self.visited = np.empty(size, dtype=np.bool_)
        self.ins = np.empty(size, dtype=np.int64)
        self.contribs = np.empty(size, dtype=np.float64)
        self.stale = np.zeros(size, dtype=np.bool_)
        self.grid = np.empty((size, self.m), dtype=np.int64)
        self.rem_sols = np.empty(size, dtype=np.int64)
        self.rem_objs = np.empty((size, self.m), dtype=np.float64)
        self.rem_visited = np.empty(size, dtype=np.bool_)
        self.rem_ins = np.empty(size, dtype=np.int64)

    def grow(self, minimum: int) -> None:
        size = max(2 * self.sols.shape[0], minimum)
        old = (self.sols, self.objs, self.visited, self.ins, self.contribs)
        count = len(self)
        self._alloc(size)
        self.sols[:count] = old[0][:count]
        self.objs[:count] = old[1][:count]
        self.visited[:count] = old[2][:count]
        self.ins[:count] = old[3][:count]
        self.contribs[:count] = old[4][:count]

    def __len__(self) -> int:
        return int(self.meta[_kernels.META_COUNT])

    def entries(self) -> list[ArchiveEntry]:
        return [
            ArchiveEntry(
                solution=int(self.sols[i]),
                objectives=self.objs[i].copy(),
                visited=bool(self.visited[i]),
                insertion_index=int(self.ins[i]),
            )
            for i in range(len(self))
        ]

    def image(self) -> np.ndarray:
        """Copy of the objective vectors in insertion order."""
        return self.objs[: len(self)].copy()

    def solutions(self) -> np.ndarray:
        return self.sols[: len(self)].copy()

    def unvisited_count(self) -> int:
        return int(np.count_nonzero(~self.visited[: len(self)]))

    def snapshot_lines(self) -> list[str]:
        """Export form: `<bits> <f_1> ... <f_m> <visited>` per entry."""
        lines = []
        for i in range(len(self)):
            values = " ".join(format(v, ".17g") for v in self.objs[i])
            lines.append(
                f"{bits_to_str(int(self.sols[i]), self.n)} {values} {int(self.visited[i])}"
            )
        return lines

    def check_invariants(self) -> None:
        """Assert mutual nondominance, distinct vectors, and the size bound."""
        count = len(self)
        if self.capacity is not None and count > self.capacity:
            raise AssertionError(f"archive holds {count} > capacity {self.capacity}")
        if count and not _kernels.set_mutually_nondominated_distinct(
            np.ascontiguousarray(self.objs[:count])
        ):
            raise AssertionError("archive entries not mutually nondominated and distinct")
