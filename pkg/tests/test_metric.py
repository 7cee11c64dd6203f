import math

import numpy as np
import pytest

from fractalsym.cloud import PointCloud
from fractalsym.errors import EmptyWindow, RadiusMismatch
from fractalsym.metric import (
    SimilarityResult,
    best_similarity,
    circle_samples,
    hausdorff,
    hausdorff_brute,
    max_nn_spacing,
    resolution_floor,
    selfsim_profile,
    truncate,
)


def random_cloud(rng, n, spread=4.0):
    return rng.standard_normal(n) * spread + 1j * rng.standard_normal(n) * spread


class TestTruncate:
    def test_single_point(self):
        t = truncate(np.array([0j]), 1.0, 64)
        assert len(t.interior_points) == 1
        assert t.boundary_samples == 64
        assert np.allclose(np.abs(t.boundary_points), 1.0)

    def test_all_outside(self):
        t = truncate(np.array([3 + 0j, 0 + 5j]), 1.0, 64)
        assert len(t.interior_points) == 0

    def test_circle_cloud_kept(self):
        pts = circle_samples(2.0, 128)
        t = truncate(pts, 2.0, 128)
        assert len(t.interior_points) == 128
        assert np.max(np.abs(t.interior_points)) <= 2.0 + 1e-12

    def test_idempotent(self):
        # set semantics: re-truncation re-attaches the circle, the set is unchanged
        rng = np.random.default_rng(0)
        pts = random_cloud(rng, 500, 1.5)
        t1 = truncate(pts, 1.0, 128)
        t2 = truncate(t1.all_points, 1.0, 128)
        assert set(t1.all_points.tolist()) == set(t2.all_points.tolist())

    def test_min_boundary_samples(self):
        with pytest.raises(ValueError):
            truncate(np.array([0j]), 1.0, 32)


class TestHausdorff:
    def test_self_distance_zero(self):
        rng = np.random.default_rng(1)
        t = truncate(random_cloud(rng, 200), 5.0)
        assert hausdorff(t, t) == 0.0

    def test_worked_example(self):
        A = truncate(np.array([0j]), 5.0, 256)
        B = truncate(np.array([3 + 0j, 4 + 0j]), 5.0, 256)
        d = hausdorff(A, B)
        assert d == hausdorff_brute(A, B)
        assert abs(d - 3.0) < 1e-12

    def test_indexed_equals_brute_random(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            A = truncate(random_cloud(rng, 1000), 5.0, 128)
            B = truncate(random_cloud(rng, 1000), 5.0, 128)
            assert hausdorff(A, B) == hausdorff_brute(A, B)

    def test_radius_mismatch(self):
        rng = np.random.default_rng(3)
        A = truncate(random_cloud(rng, 10), 1.0)
        B = truncate(random_cloud(rng, 10), 2.0)
        with pytest.raises(RadiusMismatch):
            hausdorff(A, B)

    def test_pseudometric_properties(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            A = truncate(random_cloud(rng, 40), 3.0, 64)
            B = truncate(random_cloud(rng, 40), 3.0, 64)
            C = truncate(random_cloud(rng, 40), 3.0, 64)
            dab, dba = hausdorff(A, B), hausdorff(B, A)
            assert dab == dba  # symmetry exact
            assert hausdorff(A, C) <= dab + hausdorff(B, C) + 1e-12


class TestSpacing:
    def test_grid_spacing(self):
        xs = np.linspace(0, 1, 11)
        pts = (xs[:, None] + 1j * xs[None, :]).ravel()
        assert abs(max_nn_spacing(pts) - 0.1) < 1e-12


class TestSelfsimProfile:
    def test_exactly_self_similar_set(self):
        # B = union of rho^-k scalings of a base ring: rho B = B near 0
        rng = np.random.default_rng(5)
        rho = 2.0
        base = np.exp(2j * math.pi * rng.random(4000)) * (0.5 + 0.5 * rng.random(4000))
        layers = [base * rho**-k for k in range(12)]
        B = np.concatenate(layers)
        model = B.copy()
        prof = selfsim_profile(B, 0j, rho, model, 1.0, range(1, 4))
        spacing = max_nn_spacing(truncate(model, 1.0).all_points)
        assert all(v <= 2 * spacing for v in prof)

    def test_empty_window(self):
        B = np.array([10 + 10j])
        model = np.array([0.1 + 0j])
        with pytest.raises(EmptyWindow):
            selfsim_profile(B, 0j, 1.0, model, 1.0, range(1, 3))


class TestBestSimilarity:
    def _selfsim_cloud(self, rng, rho, n=900):
        base = np.exp(2j * math.pi * rng.random(n)) * (1 / abs(rho) + (1 - 1 / abs(rho)) * rng.random(n))
        mask = rng.random(n) < 0.5  # sparsify to give the set some shape
        pts = base[mask] * np.exp(0.3j * np.sin(7 * np.angle(base[mask])))
        layers = [pts * rho ** float(-k) for k in range(8)]
        return np.concatenate(layers)

    def test_self_comparison_floor(self):
        rng = np.random.default_rng(6)
        B = self._selfsim_cloud(rng, 2.0)
        res = best_similarity(B, B, 2.0, 1.0)
        floor = res.resolution_floor
        assert res.dist_star <= 2 * max(floor, 0.05)

    def test_recovers_synthetic_rescale(self):
        rng = np.random.default_rng(7)
        rho = 2.0 * np.exp(0.5j)
        B = self._selfsim_cloud(rng, rho)
        mu = 1.3 * np.exp(0.4j)
        A = mu * B
        res = best_similarity(A, B, rho, 1.0)
        # lambda* should invert mu modulo powers of rho
        val = res.lambda_star * mu
        k = round(math.log(abs(val)) / math.log(abs(rho)))
        ratio = val / rho**k
        assert abs(ratio - 1) < 0.15
        floor = res.resolution_floor
        assert res.dist_star <= 3 * max(floor, 0.02)


class TestObjectiveRhoPeriodicity:
    def test_on_saturated_cloud(self):
        rng = np.random.default_rng(8)
        rho = 2.0
        base = np.exp(2j * math.pi * rng.random(3000)) * (0.5 + 0.5 * rng.random(3000))
        B = np.concatenate([base * rho**-k for k in range(12)])
        A = B.copy()
        lam = 1.17
        t1 = truncate(A * lam, 1.0)
        t2 = truncate(A * (lam * rho), 1.0)
        bt = truncate(B, 1.0)
        d1, d2 = hausdorff(t1, bt), hausdorff(t2, bt)
        spacing = max_nn_spacing(bt.all_points)
        assert abs(d1 - d2) <= 2 * spacing + 0.02
