import numpy as np
import pytest

from rmnkpls import Archive, ArchiveEntry, Dominance, compare, nondominated_filter, weakly_dominates
from rmnkpls import unbounded_add


def quadratic_filter(points):
    """All-pairs oracle: keep points no other point dominates, dedupe."""
    kept = []
    for i, p in enumerate(points):
        dominated = False
        for j, q in enumerate(points):
            if i == j:
                continue
            if all(qc >= pc for qc, pc in zip(q, p)) and tuple(q) != tuple(p):
                dominated = True
                break
        if not dominated and tuple(p) not in {tuple(x) for x in kept}:
            kept.append(list(p))
    return sorted(kept)


class TestCompare:
    def test_examples(self):
        assert compare((1, 0), (0, 0)) is Dominance.DOMINATES
        assert compare((0, 0), (1, 0)) is Dominance.DOMINATED_BY
        assert compare((1, 0), (0, 1)) is Dominance.INCOMPARABLE
        assert compare((0.5, 0.5), (0.5, 0.5)) is Dominance.EQUAL

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            compare((1, 0), (1, 0, 0))
        with pytest.raises(ValueError):
            weakly_dominates((1,), (1, 0))

    def test_antisymmetry_on_random_vectors(self):
        rng = np.random.default_rng(3)
        flipped = {
            Dominance.DOMINATES: Dominance.DOMINATED_BY,
            Dominance.DOMINATED_BY: Dominance.DOMINATES,
            Dominance.EQUAL: Dominance.EQUAL,
            Dominance.INCOMPARABLE: Dominance.INCOMPARABLE,
        }
        for _ in range(300):
            m = int(rng.integers(2, 6))
            a = rng.integers(0, 4, size=m).astype(float)  # coarse grid forces ties
            b = rng.integers(0, 4, size=m).astype(float)
            assert compare(b, a) is flipped[compare(a, b)]

    def test_strict_dominance_transitive_irreflexive(self):
        rng = np.random.default_rng(4)
        checked = 0
        for _ in range(2000):
            m = int(rng.integers(2, 5))
            a = rng.integers(0, 5, size=m).astype(float)
            b = rng.integers(0, 5, size=m).astype(float)
            c = rng.integers(0, 5, size=m).astype(float)
            assert compare(a, a) is Dominance.EQUAL
            if compare(a, b) is Dominance.DOMINATES and compare(b, c) is Dominance.DOMINATES:
                assert compare(a, c) is Dominance.DOMINATES
                checked += 1
        assert checked > 10

    def test_weak_dominance(self):
        assert weakly_dominates((1, 1), (1, 0))
        assert not weakly_dominates((1, 0), (0, 1))
        v = (0.3, 0.7, 0.1)
        assert weakly_dominates(v, v)


class TestNondominatedFilter:
    def test_mutually_incomparable_all_kept(self):
        # none of these dominates another under maximization: (0.2, 0.2) has
        # a strictly larger second coordinate than (1, 0) and a strictly
        # larger first than (0, 1)
        got = nondominated_filter([(1, 0), (0, 1), (0.2, 0.2)])
        assert sorted(map(tuple, got)) == [(0.0, 1.0), (0.2, 0.2), (1.0, 0.0)]

    def test_dominated_point_removed(self):
        got = nondominated_filter([(1, 0.3), (0, 1), (0.2, 0.2)])
        assert sorted(map(tuple, got)) == [(0.0, 1.0), (1.0, 0.3)]

    def test_singleton(self):
        got = nondominated_filter([(0.4, 0.6)])
        assert [tuple(r) for r in got] == [(0.4, 0.6)]

    def test_duplicates_collapse(self):
        got = nondominated_filter([(1, 2), (1, 2), (1, 2)])
        assert got.shape == (1, 2)

    def test_matches_quadratic_oracle(self):
        rng = np.random.default_rng(7)
        for trial in range(30):
            pts = rng.integers(0, 8, size=(100, 3)).astype(float)
            got = sorted(map(list, nondominated_filter(pts)))
            assert got == quadratic_filter(pts.tolist())

    def test_ties_in_first_objective(self):
        # equal first coordinate with domination through the rest
        pts = [(1.0, 5.0, 1.0), (1.0, 5.0, 2.0), (1.0, 4.0, 3.0)]
        got = sorted(map(tuple, nondominated_filter(pts)))
        assert got == [(1.0, 4.0, 3.0), (1.0, 5.0, 2.0)]


class TestArchive:
    def test_entries_in_insertion_order(self):
        arch = Archive(n=3, m=2)
        unbounded_add(arch, 0, (0.2, 0.8))
        unbounded_add(arch, 1, (0.8, 0.2))
        unbounded_add(arch, 2, (0.5, 0.5))
        entries = arch.entries()
        assert [e.solution for e in entries] == [0, 1, 2]
        assert [e.insertion_index for e in entries] == [0, 1, 2]
        assert all(isinstance(e, ArchiveEntry) and not e.visited for e in entries)

    def test_snapshot_lines(self):
        arch = Archive(n=3, m=2)
        unbounded_add(arch, 5, (0.25, 0.75))
        line = arch.snapshot_lines()[0]
        bits, f1, f2, visited = line.split()
        assert bits == "101"
        assert float(f1) == 0.25 and float(f2) == 0.75
        assert visited == "0"

    def test_invariant_checker_catches_corruption(self):
        arch = Archive(n=3, m=2)
        unbounded_add(arch, 0, (0.2, 0.8))
        unbounded_add(arch, 1, (0.8, 0.2))
        arch.check_invariants()
        arch.objs[1] = (0.9, 0.9)  # simulate corruption: dominates entry 0
        with pytest.raises(AssertionError):
            arch.check_invariants()

    def test_capacity_validation(self):
        with pytest.raises(ValueError):
            Archive(n=3, m=2, capacity=0)
        with pytest.raises(ValueError):
            Archive(n=0, m=2)
