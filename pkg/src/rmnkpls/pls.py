"""Pareto local search: expand random unvisited archive entries until none remain.

Each iteration picks one unvisited entry uniformly at random, evaluates all n
1-bit-flip neighbors in a uniformly shuffled order, feeds them one at a time
to the archive policy (newly accepted entries enter unvisited), and finally
marks the expanded entry visited if it is still present.  One iteration costs
exactly n evaluations.  If the policy evicts the expanded entry mid-iteration,
expansion continues from the retained neighbor list and the visited marking is
simply skipped.

Runs are deterministic: the SplitMix64 stream seeded with search_seed is
consumed in a fixed order (initial-solution draw, then per iteration one
selection draw followed by the shuffle draws).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .archivers import ARCHIVER_NAMES, _ARCHIVER_CODES
from .landscape import Instance
from .pareto import Archive, ArchiveEntry
from .rng import SplitMix64

__all__ = ["PlsConfig", "RunStats", "pls_run", "select_unvisited", "build_lookup"]

# precompute the full objective table when the space is this small; direct
# per-neighbor evaluation produces bit-identical values either way
LOOKUP_MAX_N = 20

_UNLIMITED = 1 << 62


@dataclass(frozen=True)
class PlsConfig:
    """archiver: unb | hva | mga; mu is required exactly for the bounded ones.

    max_iterations is a safety cap (absent by default); snapshot_every
    records the archive image every that many iterations for monotonicity
    analysis.
    """

    archiver: str
    mu: int | None = None
    search_seed: int = 0
    max_iterations: int | None = None
    snapshot_every: int | None = None

    def __post_init__(self):
        if self.archiver not in ARCHIVER_NAMES:
            raise ValueError(f"unknown archiver {self.archiver!r}")
        if self.archiver == "unb":
            if self.mu is not None:
                raise ValueError("mu must be absent for the unbounded archiver")
        else:
            if self.mu is None or self.mu < 1:
                raise ValueError(f"{self.archiver} requires mu >= 1")
        if not 0 <= self.search_seed < 2**64:
            raise ValueError("search_seed must be an unsigned 64-bit integer")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive when set")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be positive when set")


@dataclass
class RunStats:
    """One run's outcome; evaluations always equals length * n.

    completed is False only when max_iterations cut the run short; plo_set
    then holds the partial archive.
    """

    plo_set: Archive
    length: int
    evaluations: int
    seed: int
    completed: bool
    wall_ms: float
    snapshots: list[np.ndarray] | None = field(default=None)


def build_lookup(instance: Instance) -> np.ndarray:
    """Full (2^n, m) objective table, row p = f(bit pattern p)."""
    out = np.empty((1 << instance.n, instance.m), dtype=np.float64)
    _kernels.enumerate_into(instance.tables, instance.links, out)
    return out


def pls_run(instance: Instance, config: PlsConfig, lookup: np.ndarray | None = None) -> RunStats:
    """Run PLS on the instance; deterministic in (instance, config)."""
    n, m = instance.n, instance.m
    if lookup is None and n <= LOOKUP_MAX_N:
        lookup = build_lookup(instance)
    if lookup is None:
        lookup = np.empty((0, m), dtype=np.float64)
    else:
        lookup = np.ascontiguousarray(np.asarray(lookup, dtype=np.float64))
        if lookup.shape not in ((0, m), ((1 << n), m)):
            raise ValueError("lookup must hold one row per bit pattern")
    started = time.perf_counter()
    archive = Archive(n, m, capacity=config.mu)
    rng_state = np.array([config.search_seed], dtype=np.uint64)
    code = _ARCHIVER_CODES[config.archiver]
    mu = config.mu if config.mu is not None else -1
    max_iters = config.max_iterations if config.max_iterations is not None else _UNLIMITED
    snapshots: list[np.ndarray] | None = [] if config.snapshot_every else None
    next_snapshot = config.snapshot_every if config.snapshot_every else _UNLIMITED
    last_snapshot_at = -1
    completed = False
    while True:
        length = int(archive.meta[_kernels.META_LENGTH])
        if length >= max_iters:
            break
        status = _kernels.pls_segment(
            lookup,
            instance.tables,
            instance.links,
            n,
            archive.sols,
            archive.objs,
            archive.visited,
            archive.ins,
            archive.contribs,
            archive.stale,
            archive.grid,
            archive.meta,
            archive.rem_sols,
            archive.rem_objs,
            archive.rem_visited,
            archive.rem_ins,
            rng_state,
            code,
            mu,
            min(max_iters, next_snapshot) - length,
        )
        length = int(archive.meta[_kernels.META_LENGTH])
        if snapshots is not None and length >= next_snapshot:
            snapshots.append(archive.image())
            last_snapshot_at = length
            next_snapshot = length + config.snapshot_every
        if status == 0:
            completed = True
            break
        if status == 2:
            archive.grow(len(archive) + n + 1)
    length = int(archive.meta[_kernels.META_LENGTH])
    if snapshots is not None and length != last_snapshot_at:
        snapshots.append(archive.image())
    wall_ms = (time.perf_counter() - started) * 1000.0
    return RunStats(
        plo_set=archive,
        length=length,
        evaluations=length * n,
        seed=config.search_seed,
        completed=completed,
        wall_ms=wall_ms,
        snapshots=snapshots,
    )


def select_unvisited(archive: Archive, rng: SplitMix64) -> ArchiveEntry:
    """Uniform draw over the unvisited entries, in insertion order.

    Mirrors the in-run selection exactly: one rand_below(#unvisited) draw,
    then the r-th unvisited entry.
    """
    count = len(archive)
    unvisited = archive.unvisited_count()
    if unvisited == 0:
        raise ValueError("archive has no unvisited entries")
    r = rng.rand_below(unvisited)
    seen = 0
    for i in range(count):
        if not archive.visited[i]:
            if seen == r:
                return ArchiveEntry(
                    solution=int(archive.sols[i]),
                    objectives=archive.objs[i].copy(),
                    visited=False,
                    insertion_index=int(archive.ins[i]),
                )
            seen += 1
    raise AssertionError("unreachable: unvisited entry not found")
