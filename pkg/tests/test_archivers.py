import numpy as np
import pytest

import rmnkpls.pareto as pareto_mod
from rmnkpls import (
    Archive,
    discretize,
    hv_contribution,
    hva_add,
    hypervolume,
    mga_add,
    unbounded_add,
    weakly_dominates,
)
from rmnkpls._hv import exclusive_contribution
from rmnkpls._kernels import GRID_DEPTH


@pytest.fixture(autouse=True)
def invariant_checks():
    pareto_mod.DEBUG_CHECKS = True
    yield
    pareto_mod.DEBUG_CHECKS = False


def filled_archive(vectors, capacity=None, n=8):
    arch = Archive(n=n, m=len(vectors[0]), capacity=capacity)
    for i, v in enumerate(vectors):
        result = (unbounded_add if capacity is None else hva_add)(arch, i, v)
        assert result.accepted
    return arch


def image_tuples(archive):
    return [tuple(e.objectives) for e in archive.entries()]


def random_nd_set(rng, count, m):
    pts = rng.random((count * 4, m))
    kept = []
    for p in pts:
        if any(weakly_dominates(q, p) for q in kept):
            continue
        kept = [q for q in kept if not weakly_dominates(p, q)] + [p]
        if len(kept) == count:
            break
    return np.array(kept)


class TestUnbounded:
    def test_incomparable_accepted(self):
        arch = filled_archive([(1.0, 0.0)])
        r = unbounded_add(arch, 9, (0.0, 1.0))
        assert r.accepted and r.removed == []
        assert len(arch) == 2

    def test_dominated_member_removed(self):
        arch = filled_archive([(0.2, 0.2)])
        r = unbounded_add(arch, 9, (0.5, 0.5))
        assert r.accepted
        assert [tuple(e.objectives) for e in r.removed] == [(0.2, 0.2)]
        assert image_tuples(arch) == [(0.5, 0.5)]

    def test_duplicate_rejected(self):
        arch = filled_archive([(0.5, 0.5)])
        r = unbounded_add(arch, 9, (0.5, 0.5))
        assert not r.accepted and r.removed == []
        assert len(arch) == 1

    def test_never_rejects_nondominated_nonduplicate(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            arch = Archive(n=8, m=3)
            for sol in range(40):
                v = rng.random(3)
                dominated = any(
                    weakly_dominates(e.objectives, v) for e in arch.entries()
                )
                r = unbounded_add(arch, sol, v)
                assert r.accepted == (not dominated)


class TestHva:
    def test_tied_minimal_contributors_lexicographic(self):
        arch = filled_archive([(0.9, 0.1), (0.1, 0.9)], capacity=2)
        r = hva_add(arch, 7, (0.5, 0.5))
        assert r.accepted
        assert [tuple(e.objectives) for e in r.removed] == [(0.1, 0.9)]
        assert image_tuples(arch) == [(0.9, 0.1), (0.5, 0.5)]

    def test_candidate_can_be_discarded(self):
        arch = filled_archive([(0.9, 0.1), (0.5, 0.5)], capacity=2)
        before = image_tuples(arch)
        r = hva_add(arch, 7, (0.05, 0.05))
        assert not r.accepted and r.removed == []
        assert image_tuples(arch) == before

    def test_below_capacity_no_removal(self):
        arch = filled_archive([(0.9, 0.1), (0.1, 0.9)], capacity=3)
        r = hva_add(arch, 7, (0.5, 0.5))
        assert r.accepted and r.removed == []
        assert len(arch) == 3

    def test_leave_one_out_optimality_random_scenarios(self):
        # after any eviction, the post-removal hypervolume equals the best
        # achievable by removing a single entry (exhaustive check)
        rng = np.random.default_rng(1)
        evictions = 0
        for trial in range(60):
            m = int(rng.integers(2, 5))
            mu = int(rng.integers(2, 12))
            arch = Archive(n=10, m=m, capacity=mu)
            for sol in range(60):
                v = rng.random(m)
                before = arch.image()
                r = hva_add(arch, sol, v)
                overflowed = r.accepted and len(before) == mu or (
                    not r.accepted
                    and len(before) == mu
                    and not any(weakly_dominates(q, v) for q in before)
                )
                if overflowed:
                    evictions += 1
                    union = np.vstack([before, v])
                    loo_best = max(
                        hypervolume(np.delete(union, i, axis=0))
                        for i in range(len(union))
                    )
                    assert hypervolume(arch.image()) == loo_best
        assert evictions > 100

    def test_incremental_contributions_match_fresh_recomputation(self):
        # the maintained contribution cache must be bit-identical to a
        # from-scratch recomputation after arbitrary update sequences
        rng = np.random.default_rng(2)
        for trial in range(20):
            m = int(rng.integers(2, 6))
            mu = int(rng.integers(2, 10))
            arch = Archive(n=10, m=m, capacity=mu)
            for sol in range(40):
                hva_add(arch, sol, rng.random(m))
            count = len(arch)
            objs = np.ascontiguousarray(arch.objs[:count])
            for i in range(count):
                assert arch.contribs[i] == exclusive_contribution(objs, count, i)

    def test_contribution_matches_leave_one_out(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            m = int(rng.integers(2, 5))
            pts = random_nd_set(rng, int(rng.integers(2, 10)), m)
            arr = np.ascontiguousarray(pts)
            for i in range(len(arr)):
                direct = exclusive_contribution(arr, len(arr), i)
                loo = hv_contribution(arr, i)
                assert direct == pytest.approx(loo, abs=1e-12)


class TestHvContribution:
    def test_singleton_whole_box(self):
        assert hv_contribution([(0.5, 0.5)], 0) == 0.25

    def test_middle_point_of_three(self):
        pts = [(0.9, 0.1), (0.5, 0.5), (0.1, 0.9)]
        assert hv_contribution(pts, 1) == pytest.approx(0.16, abs=1e-12)

    def test_contributions_sum_below_hypervolume(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            m = int(rng.integers(2, 5))
            pts = random_nd_set(rng, 8, m)
            total = hypervolume(pts)
            contrib_sum = sum(hv_contribution(pts, i) for i in range(len(pts)))
            assert contrib_sum <= total + 1e-12

    def test_index_bounds(self):
        with pytest.raises(IndexError):
            hv_contribution([(0.5, 0.5)], 1)


def grid_vector(*coords):
    # exactly representable objective values whose discretized coordinates
    # are the given integers
    return tuple(c / float(1 << GRID_DEPTH) for c in coords)


def critical_level_oracle(vectors):
    """Full linear scan from level 0: (level, covered flags)."""
    grid = [[int(v * (1 << GRID_DEPTH)) for v in vec] for vec in vectors]
    for level in range(GRID_DEPTH + 1):
        boxes = [[c >> level for c in row] for row in grid]
        covered = [
            any(
                j != i and all(bj >= bi for bj, bi in zip(boxes[j], boxes[i]))
                for j in range(len(boxes))
            )
            for i in range(len(boxes))
        ]
        if any(covered):
            return level, covered
    raise AssertionError("unreachable: full coverage at the deepest level")


class TestMga:
    def test_worked_grid_example(self):
        arch = Archive(n=8, m=2, capacity=2)
        assert mga_add(arch, 0, grid_vector(5, 3)).accepted
        assert mga_add(arch, 1, grid_vector(3, 5)).accepted
        r = mga_add(arch, 2, grid_vector(4, 4))
        assert r.accepted
        assert [tuple(e.objectives) for e in r.removed] == [grid_vector(5, 3)]
        assert image_tuples(arch) == [grid_vector(3, 5), grid_vector(4, 4)]

    def test_duplicate_rejected_by_unbounded_stage(self):
        arch = Archive(n=8, m=2, capacity=2)
        mga_add(arch, 0, grid_vector(4, 4))
        mga_add(arch, 1, grid_vector(3, 5))
        r = mga_add(arch, 2, grid_vector(4, 4))
        assert not r.accepted and len(arch) == 2

    def test_mu_one_against_scan_oracle(self):
        arch = Archive(n=8, m=2, capacity=1)
        assert mga_add(arch, 0, grid_vector(5, 3)).accepted
        r = mga_add(arch, 1, grid_vector(3, 5))
        level, covered = critical_level_oracle([grid_vector(5, 3), grid_vector(3, 5)])
        # candidate is covered at the critical level: rejected, archive kept
        assert level == 3 and covered == [True, True]
        assert not r.accepted
        assert image_tuples(arch) == [grid_vector(5, 3)]

    def test_random_scenarios_match_scan_oracle(self):
        rng = np.random.default_rng(5)
        evictions = 0
        for trial in range(40):
            m = int(rng.integers(2, 5))
            mu = int(rng.integers(1, 10))
            arch = Archive(n=10, m=m, capacity=mu)
            for sol in range(50):
                v = rng.random(m)
                before = [tuple(e.objectives) for e in arch.entries()]
                before_ins = [e.insertion_index for e in arch.entries()]
                overflow = len(before) == mu and not any(
                    weakly_dominates(np.array(q), v) for q in before
                ) and not any(
                    weakly_dominates(v, np.array(q)) and tuple(v) != q for q in before
                )
                r = mga_add(arch, sol, v)
                if not overflow:
                    continue
                evictions += 1
                union = before + [tuple(v)]
                level, covered = critical_level_oracle(union)
                if covered[-1]:
                    assert not r.accepted
                    assert [tuple(e.objectives) for e in arch.entries()] == before
                else:
                    assert r.accepted
                    victims = [i for i in range(len(before)) if covered[i]]
                    oldest = min(victims, key=lambda i: before_ins[i])
                    expected = before[:oldest] + before[oldest + 1 :] + [tuple(v)]
                    assert [tuple(e.objectives) for e in arch.entries()] == expected
        assert evictions > 50


class TestBoundedInvariants:
    @pytest.mark.parametrize("policy", [hva_add, mga_add])
    def test_capacity_and_mutual_nondominance(self, policy):
        rng = np.random.default_rng(6)
        for trial in range(20):
            m = int(rng.integers(2, 6))
            mu = int(rng.integers(1, 8))
            arch = Archive(n=10, m=m, capacity=mu)
            for sol in range(60):
                policy(arch, sol, rng.random(m))
                assert len(arch) <= mu
                arch.check_invariants()

    @pytest.mark.parametrize("policy", [hva_add, mga_add])
    def test_monotone_under_domination(self, policy):
        # a later archive is never strictly worse: every earlier snapshot
        # member must not weakly dominate the whole later image while the
        # images differ in the wrong direction
        rng = np.random.default_rng(7)
        violations = 0
        for trial in range(60):
            m = int(rng.integers(2, 4))
            mu = int(rng.integers(2, 6))
            arch = Archive(n=10, m=m, capacity=mu)
            snapshots = []
            for sol in range(40):
                policy(arch, sol, rng.random(m))
                snapshots.append(arch.image())
            for a in range(len(snapshots)):
                for b in range(a + 1, len(snapshots)):
                    if _strictly_better(snapshots[a], snapshots[b]):
                        violations += 1
        assert violations == 0

    @pytest.mark.parametrize("policy", [hva_add, mga_add])
    def test_accepts_outside_dominating_region(self, policy):
        # candidates incomparable to every member: the policy must either
        # accept or reject through its documented eviction path, never corrupt
        rng = np.random.default_rng(8)
        accepted = 0
        scenarios = 0
        for trial in range(40):
            mu = 4
            arch = Archive(n=10, m=2, capacity=mu)
            for sol, v in enumerate(np.linspace(0.1, 0.9, mu)):
                policy(arch, sol, (v, 1.0 - v))
            image = arch.image()
            cand = rng.random(2) * 0.5 + np.array([0.25, 0.25])
            incomparable = all(
                not weakly_dominates(q, cand) and not weakly_dominates(cand, q)
                for q in image
            )
            if not incomparable:
                continue
            scenarios += 1
            r = policy(arch, 99, cand)
            assert len(arch) <= mu
            if r.accepted:
                accepted += 1
            else:
                assert [tuple(q) for q in arch.image()] == [tuple(q) for q in image]
        assert scenarios > 10 and accepted > 0


def _strictly_better(earlier, later):
    """earlier strictly better: every later member weakly dominated by some
    earlier member, and the images differ."""
    earlier_set = {tuple(r) for r in earlier}
    later_set = {tuple(r) for r in later}
    if earlier_set == later_set:
        return False
    for b in later:
        if not any(weakly_dominates(a, b) for a in earlier):
            return False
    return True


class TestDiscretize:
    def test_examples(self):
        assert discretize((0.0, 0.0), 4).tolist() == [0, 0]
        assert discretize((0.5, 0.25), 2).tolist() == [2, 1]

    def test_monotone(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            m = int(rng.integers(2, 6))
            v = rng.random(m)
            w = np.minimum(v + rng.random(m) * 0.2, np.nextafter(1.0, 0.0))
            dv, dw = discretize(v, GRID_DEPTH), discretize(w, GRID_DEPTH)
            assert np.all(dv <= dw)
            assert np.all(dv >= 0) and np.all(dv < 1 << GRID_DEPTH)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            discretize((0.2, 1.0), 4)
        with pytest.raises(ValueError):
            discretize((-0.1, 0.5), 4)


class TestValidation:
    def test_unbounded_requires_no_capacity(self):
        arch = Archive(n=4, m=2, capacity=3)
        with pytest.raises(ValueError):
            unbounded_add(arch, 0, (0.5, 0.5))

    def test_bounded_requires_capacity(self):
        arch = Archive(n=4, m=2)
        with pytest.raises(ValueError):
            hva_add(arch, 0, (0.5, 0.5))
        with pytest.raises(ValueError):
            mga_add(arch, 0, (0.5, 0.5))

    def test_dimension_mismatch(self):
        arch = Archive(n=4, m=2)
        with pytest.raises(ValueError):
            unbounded_add(arch, 0, (0.5, 0.5, 0.5))
