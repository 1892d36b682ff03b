from itertools import combinations

import numpy as np
import pytest

from rmnkpls import (
    InstanceParams,
    enumerate_space,
    generate_instance,
    hvr,
    hypervolume,
    mult_epsilon,
    weakly_dominates,
)


def inclusion_exclusion_hv(points):
    """Oracle: union volume of origin-anchored boxes by inclusion-exclusion."""
    total = 0.0
    idx = range(len(points))
    for r in range(1, len(points) + 1):
        for subset in combinations(idx, r):
            vol = 1.0
            for d in range(len(points[0])):
                vol *= min(points[i][d] for i in subset)
            total += vol if r % 2 == 1 else -vol
    return total


def epsilon_oracle(A, P):
    """Independent triple loop over reference points, set points, coordinates."""
    best_overall = None
    for p in P:
        best_for_p = None
        for a in A:
            worst = max(pc / ac for pc, ac in zip(p, a))
            if best_for_p is None or worst < best_for_p:
                best_for_p = worst
        if best_overall is None or best_for_p > best_overall:
            best_overall = best_for_p
    return best_overall


def random_nd_points(rng, count, m):
    pts = []
    while len(pts) < count:
        v = rng.random(m)
        if any(weakly_dominates(q, v) or weakly_dominates(v, q) for q in pts):
            continue
        pts.append(v)
    return np.array(pts)


class TestHypervolume:
    def test_single_box(self):
        assert hypervolume([(0.5, 0.5)]) == 0.25

    def test_three_point_staircase(self):
        pts = [(0.9, 0.1), (0.5, 0.5), (0.1, 0.9)]
        assert hypervolume(pts) == pytest.approx(0.33, abs=1e-12)

    def test_empty(self):
        assert hypervolume(np.empty((0, 3))) == 0.0

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_matches_inclusion_exclusion(self, m):
        rng = np.random.default_rng(10 + m)
        for _ in range(60):
            count = int(rng.integers(1, 9))
            pts = random_nd_points(rng, count, m)
            assert hypervolume(pts) == pytest.approx(
                inclusion_exclusion_hv(pts.tolist()), abs=1e-12
            )

    def test_five_objectives_against_oracle(self):
        rng = np.random.default_rng(20)
        for _ in range(30):
            pts = random_nd_points(rng, int(rng.integers(1, 8)), 5)
            assert hypervolume(pts) == pytest.approx(
                inclusion_exclusion_hv(pts.tolist()), abs=1e-12
            )

    def test_six_objectives_fallback(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            pts = random_nd_points(rng, 5, 6)
            assert hypervolume(pts) == pytest.approx(
                inclusion_exclusion_hv(pts.tolist()), abs=1e-12
            )

    def test_dominated_and_duplicate_rows_contribute_nothing(self):
        base = [(0.9, 0.1), (0.5, 0.5)]
        noisy = base + [(0.4, 0.4), (0.5, 0.5)]
        assert hypervolume(noisy) == hypervolume(base)

    def test_monotone_in_points(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            m = int(rng.integers(2, 5))
            pts = random_nd_points(rng, 6, m)
            before = hypervolume(pts[:-1])
            after = hypervolume(pts)
            assert after >= before
            assert hypervolume(pts[1:]) <= after

    def test_permutation_invariance(self):
        rng = np.random.default_rng(23)
        pts = random_nd_points(rng, 12, 4)
        reference = hypervolume(pts)
        for _ in range(5):
            rows = rng.permutation(len(pts))
            cols = rng.permutation(4)
            assert hypervolume(pts[rows][:, cols]) == pytest.approx(
                reference, rel=1e-12
            )

    def test_rejects_negative_coordinates(self):
        with pytest.raises(ValueError):
            hypervolume([(0.5, -0.1)])


class TestHvr:
    def test_identity(self):
        pts = [(0.9, 0.1), (0.5, 0.5), (0.1, 0.9)]
        assert hvr(pts, pts) == 0.0

    def test_scaled_single_point(self):
        delta = 0.1
        p = [(1 - delta, 1 - delta)]
        a = [(0.5 * (1 - delta), 0.5 * (1 - delta))]
        assert hvr(a, p) == pytest.approx(0.75, abs=1e-12)

    def test_strict_subset_positive_on_enumerated_instance(self):
        inst = generate_instance(InstanceParams(n=8, m=2, k=3, rho=0.0, gen_seed=31))
        front = enumerate_space(inst).pareto_front
        assert len(front) >= 2
        subset = front[:-1]
        assert hvr(subset, front) > 0.0

    def test_zero_reference_front_rejected(self):
        with pytest.raises(ValueError):
            hvr([(0.5, 0.5)], np.empty((0, 2)))


class TestMultEpsilon:
    def test_identity(self):
        pts = [(0.9, 0.1), (0.5, 0.5), (0.1, 0.9)]
        assert mult_epsilon(pts, pts) == 1.0

    def test_single_point_ratio(self):
        assert mult_epsilon([(0.4, 0.4)], [(0.8, 0.4)]) == 2.0

    def test_matches_triple_loop_oracle_bit_exact(self):
        rng = np.random.default_rng(32)
        for _ in range(40):
            m = int(rng.integers(2, 5))
            A = rng.random((int(rng.integers(1, 12)), m)) * 0.9 + 0.05
            P = rng.random((int(rng.integers(1, 12)), m)) * 0.9 + 0.05
            assert mult_epsilon(A, P) == epsilon_oracle(A.tolist(), P.tolist())

    def test_enumerated_fronts_bit_exact(self):
        inst = generate_instance(InstanceParams(n=8, m=3, k=2, rho=0.2, gen_seed=33))
        front = enumerate_space(inst).pareto_front
        subset = front[::2]
        assert mult_epsilon(subset, front) == epsilon_oracle(
            subset.tolist(), front.tolist()
        )
        assert mult_epsilon(subset, front) >= 1.0

    def test_zero_coordinate_rejected(self):
        with pytest.raises(ValueError):
            mult_epsilon([(0.0, 0.5)], [(0.5, 0.5)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mult_epsilon(np.empty((0, 2)), [(0.5, 0.5)])
