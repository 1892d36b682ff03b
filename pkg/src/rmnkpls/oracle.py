"""Ground truth by exhaustive enumeration.

Enumerates the full solution space (guarded to n <= 24), extracts the exact
Pareto front, counts Pareto-optimal solutions, lists Pareto local optima,
and verifies PLO-sets and maximal PLO-sets returned by search.

Objective-vector comparisons are exact: all values derive deterministically
from the same component tables, so no tolerance is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .landscape import Instance

__all__ = [
    "MAX_ENUM_N",
    "EnumerationResult",
    "enumerate_space",
    "census_plo_solutions",
    "is_plo_set",
    "is_maximal_plo_set",
]

MAX_ENUM_N = 24


@dataclass
class EnumerationResult:
    """all_vectors[p] is the objective vector of bit pattern p; pareto_front
    holds the distinct nondominated vectors (lexicographically sorted);
    pareto_set_size counts Pareto-optimal solutions."""

    all_vectors: np.ndarray
    pareto_front: np.ndarray
    pareto_set_size: int


def _check_enumerable(n: int) -> None:
    if n > MAX_ENUM_N:
        raise ValueError(
            f"enumeration is limited to n <= {MAX_ENUM_N} (2^{n} solutions would "
            f"not fit in memory); evaluate solutions individually instead"
        )


def enumerate_space(instance: Instance) -> EnumerationResult:
    """Evaluate every solution and extract the exact Pareto front."""
    _check_enumerable(instance.n)
    out = np.empty((1 << instance.n, instance.m), dtype=np.float64)
    _kernels.enumerate_into(instance.tables, instance.links, out)
    mask = _kernels.pareto_mask(out)
    front = np.unique(out[mask], axis=0)
    return EnumerationResult(
        all_vectors=out,
        pareto_front=front,
        pareto_set_size=int(np.count_nonzero(mask)),
    )


def _lookup_or_sentinel(instance: Instance, all_vectors: np.ndarray | None) -> np.ndarray:
    if all_vectors is None:
        return np.empty((0, instance.m), dtype=np.float64)
    arr = np.ascontiguousarray(np.asarray(all_vectors, dtype=np.float64))
    if arr.shape != (1 << instance.n, instance.m):
        raise ValueError("all_vectors must hold one row per bit pattern")
    return arr


def _member_objectives(instance: Instance, sols: np.ndarray, lookup: np.ndarray) -> np.ndarray:
    if lookup.shape[0]:
        return np.ascontiguousarray(lookup[sols])
    objs = np.empty((len(sols), instance.m), dtype=np.float64)
    for i, s in enumerate(sols):
        _kernels.eval_into(instance.tables, instance.links, np.int64(s), objs[i])
    return objs


def _solution_array(instance: Instance, solutions) -> np.ndarray:
    sols = np.unique(np.asarray(list(solutions), dtype=np.int64))
    if sols.size == 0:
        raise ValueError("solution set must be nonempty")
    if sols.min() < 0 or sols.max() >= (1 << instance.n):
        raise ValueError(f"solutions out of range for n={instance.n}")
    return sols


def census_plo_solutions(instance: Instance, all_vectors: np.ndarray | None = None) -> np.ndarray:
    """All Pareto local optima: solutions no 1-bit-flip neighbor dominates."""
    _check_enumerable(instance.n)
    if all_vectors is None:
        all_vectors = enumerate_space(instance).all_vectors
    else:
        all_vectors = _lookup_or_sentinel(instance, all_vectors)
    mask = _kernels.plo_mask(all_vectors, instance.n)
    return np.nonzero(mask)[0].astype(np.int64)


def is_plo_set(instance: Instance, solutions, all_vectors: np.ndarray | None = None) -> bool:
    """True when every member is a PLO and the images are pairwise
    nondominated and distinct."""
    sols = _solution_array(instance, solutions)
    lookup = _lookup_or_sentinel(instance, all_vectors)
    if not _kernels.set_is_plo(lookup, instance.tables, instance.links, instance.n, sols):
        return False
    objs = _member_objectives(instance, sols, lookup)
    return bool(_kernels.set_mutually_nondominated_distinct(objs))


def is_maximal_plo_set(
    instance: Instance, solutions, all_vectors: np.ndarray | None = None
) -> bool:
    """True for PLO-sets whose members' neighbors are all weakly dominated
    by some member (maximality implies the PLO-set property)."""
    if not is_plo_set(instance, solutions, all_vectors):
        return False
    sols = _solution_array(instance, solutions)
    lookup = _lookup_or_sentinel(instance, all_vectors)
    objs = _member_objectives(instance, sols, lookup)
    return bool(
        _kernels.set_is_maximal(
            lookup, instance.tables, instance.links, instance.n, sols, objs
        )
    )
