import numpy as np
import pytest
from numpy.testing import assert_allclose

from simplexreg import (
    CubatureConfig,
    Design,
    batch_estimate,
    gm_estimate,
    gm_weights,
    kappa,
    ll_batch,
    ll_estimate,
    nw_batch,
    nw_estimate,
    uniform_simplex_sample,
    voronoi_partition,
)
from simplexreg.errors import (
    AllWeightsVanishedError,
    InsufficientDataError,
    MismatchError,
)

from conftest import random_interior_points


def noiseless(points, fn):
    return Design(points=points, responses=fn(points))


class TestDesign:
    def test_validates_lengths(self):
        with pytest.raises(MismatchError):
            Design(points=np.array([[0.1, 0.2]]), responses=np.array([1.0, 2.0]))

    def test_rejects_nonfinite_responses(self):
        with pytest.raises(MismatchError):
            Design(points=np.array([[0.1, 0.2]]), responses=np.array([np.inf]))


class TestGm:
    def test_constant_responses(self, mesh7, partition7):
        cfg = CubatureConfig()
        design = Design(points=mesh7, responses=np.full(28, 4.2))
        value = gm_estimate(design, partition7, 0.1, [0.3, 0.3], cfg)
        assert abs(value - 4.2) <= 20 * cfg.relative_tolerance * 4.2

    def test_single_cell_design_returns_its_response(self):
        pts = np.array([[0.3, 0.3]])
        part = voronoi_partition(pts)
        design = Design(points=pts, responses=np.array([7.5]))
        value = gm_estimate(design, part, 0.15, [0.2, 0.5])
        assert value == pytest.approx(7.5, rel=5e-3)

    def test_matches_tight_tolerance_self_oracle(self, mesh7, partition7):
        design = noiseless(mesh7, lambda p: p[:, 0] * (1 + p[:, 1]))
        s = [1 / 3, 1 / 3]
        coarse = gm_estimate(design, partition7, 0.1, s, CubatureConfig(1e-3))
        fine = gm_estimate(design, partition7, 0.1, s, CubatureConfig(1e-7))
        assert coarse == pytest.approx(fine, rel=5e-3)

    def test_weights_sum_to_one_for_interior_points(self, partition7):
        cfg = CubatureConfig()
        for s in random_interior_points(5, 21):
            w = gm_weights(partition7, 0.12, s, cfg)
            assert np.all(w.weights >= 0.0)
            assert abs(w.total - 1.0) <= 20 * cfg.relative_tolerance
            assert w.flagged_cells == ()

    def test_partition_design_mismatch(self, mesh7, partition10):
        design = Design(points=mesh7, responses=np.zeros(28))
        with pytest.raises(MismatchError):
            gm_estimate(design, partition10, 0.1, [0.3, 0.3])


class TestNw:
    def test_constant_responses_exact(self, mesh7):
        design = Design(points=mesh7, responses=np.full(28, -2.5))
        assert nw_estimate(design, 0.07, [0.4, 0.2]) == pytest.approx(-2.5, abs=1e-10)

    def test_single_point_design(self):
        design = Design(points=np.array([[0.25, 0.5]]), responses=np.array([3.25]))
        assert nw_estimate(design, 0.1, [0.6, 0.1]) == pytest.approx(3.25, abs=1e-12)

    def test_matches_direct_summation_oracle(self, mesh7):
        design = noiseless(mesh7, lambda p: np.log1p(p[:, 0] + p[:, 1]))
        s = np.array([0.2, 0.3])
        b = 0.05
        weights = np.array([kappa(s, b, x) for x in design.points])
        oracle = float(weights @ design.responses / weights.sum())
        assert nw_estimate(design, b, s) == pytest.approx(oracle, rel=1e-12)

    def test_log_sum_exp_survives_tiny_bandwidths(self, mesh7):
        design = noiseless(mesh7, lambda p: p[:, 0])
        s = [0.93, 0.035]
        b = 3e-5
        value = nw_estimate(design, b, s)
        assert np.isfinite(value)
        naive = np.array([kappa(s, b, x) for x in design.points])
        assert naive.sum() == 0.0  # the naive path underflows completely

    def test_agrees_with_naive_path_where_it_does_not_underflow(self, mesh7):
        rng = np.random.default_rng(5)
        design = Design(points=mesh7, responses=rng.normal(size=28))
        for s in random_interior_points(10, 77):
            for b in (0.05, 0.15, 0.5):
                w = np.array([kappa(s, b, x) for x in design.points])
                if w.sum() <= 1e-280:
                    continue
                naive = float(w @ design.responses / w.sum())
                assert nw_estimate(design, b, s) == pytest.approx(naive, rel=1e-12)

    def test_all_weights_vanished_raises(self):
        # boundary design points with positive exponents give exact zeros
        design = Design(
            points=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            responses=np.array([1.0, 2.0, 3.0]),
        )
        with pytest.raises(AllWeightsVanishedError):
            nw_estimate(design, 0.2, [0.4, 0.3])


class TestLl:
    def test_reproduces_affine_functions_exactly(self, mesh7):
        design = noiseless(mesh7, lambda p: 2.0 + 3.0 * p[:, 0] - p[:, 1])
        for s in random_interior_points(10, 31):
            for b in (0.05, 0.2, 0.8):
                expected = 2.0 + 3.0 * s[0] - s[1]
                assert ll_estimate(design, b, s) == pytest.approx(expected, abs=1e-8)

    def test_constant_responses(self, mesh7):
        design = Design(points=mesh7, responses=np.full(28, 1.25))
        assert ll_estimate(design, 0.1, [0.3, 0.25]) == pytest.approx(1.25, abs=1e-10)

    def test_matches_high_precision_wls_oracle(self, mesh10):
        # frozen 60-digit solve of the 3x3 weighted normal equations
        # for m(s) = sin(s1) + cos(s2), b = 0.08, at (0.25, 0.25)
        design = noiseless(mesh10, lambda p: np.sin(p[:, 0]) + np.cos(p[:, 1]))
        value = ll_estimate(design, 0.08, [0.25, 0.25])
        assert value == pytest.approx(1.209827156134599325389, rel=1e-12)

    def test_insufficient_data(self):
        design = Design(points=np.array([[0.3, 0.3], [0.4, 0.2]]), responses=np.zeros(2))
        with pytest.raises(InsufficientDataError):
            ll_estimate(design, 0.1, [0.3, 0.3])

    def test_singular_system_falls_back_to_nw(self, mesh14):
        # a tiny bandwidth at a far corner concentrates all weight on one
        # design point, collapsing the normal equations
        design = noiseless(mesh14, lambda p: p[:, 0] + p[:, 1] ** 2)
        est, fell_back = ll_batch(design, 5e-4, np.array([[0.9, 0.05]]))
        assert fell_back[0]
        nw = nw_batch(design, 5e-4, np.array([[0.9, 0.05]]))
        assert est[0] == pytest.approx(nw[0], rel=1e-12)


class TestBatch:
    def test_singleton_matches_single_call(self, mesh7, partition7):
        design = noiseless(mesh7, lambda p: np.exp(p[:, 0]) - p[:, 1])
        s = np.array([[0.22, 0.41]])
        assert batch_estimate("NW", design, 0.1, s)[0] == pytest.approx(
            nw_estimate(design, 0.1, s[0]), rel=1e-15
        )
        assert batch_estimate("LL", design, 0.1, s)[0] == pytest.approx(
            ll_estimate(design, 0.1, s[0]), rel=1e-15
        )
        gm_b = batch_estimate("GM", design, 0.1, s, partition=partition7)[0]
        assert gm_b == pytest.approx(gm_estimate(design, partition7, 0.1, s[0]), rel=1e-6)

    def test_permutation_equivariance(self, mesh7):
        design = noiseless(mesh7, lambda p: p[:, 0] ** 2 + p[:, 1])
        pts = random_interior_points(40, 3)
        perm = np.random.default_rng(0).permutation(40)
        vals = batch_estimate("NW", design, 0.1, pts)
        vals_perm = batch_estimate("NW", design, 0.1, pts[perm])
        assert np.array_equal(vals[perm], vals_perm)

    def test_nw_batch_matches_loop(self, mesh7):
        design = noiseless(mesh7, lambda p: np.log1p(p[:, 0] + p[:, 1]))
        pts = uniform_simplex_sample(1000, 99)
        batch = batch_estimate("NW", design, 0.1, pts)
        # repeated batch calls are bit-identical
        assert np.array_equal(batch, batch_estimate("NW", design, 0.1, pts))
        # looped single calls agree to reduction-order rounding (the BLAS
        # dot-product order differs between matrix shapes)
        loop = np.array([nw_estimate(design, 0.1, s) for s in pts[:200]])
        assert_allclose(batch[:200], loop, rtol=1e-14)
        sq_batch = np.mean((batch[:200] - loop) ** 2)
        assert sq_batch < 1e-28

    def test_gm_requires_partition(self, mesh7):
        design = noiseless(mesh7, lambda p: p[:, 0])
        with pytest.raises(MismatchError):
            batch_estimate("GM", design, 0.1, np.array([[0.3, 0.3]]))

    def test_diagnostics_collect_failures(self):
        design = Design(
            points=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            responses=np.array([1.0, 2.0, 3.0]),
        )
        diags = []
        out = batch_estimate(
            "NW", design, 0.2, np.array([[0.4, 0.3], [0.0, 0.0]]), diagnostics=diags
        )
        assert np.isnan(out[0])
        assert np.isfinite(out[1])  # the corner point sits on a design point
        assert any(i == 0 for i, _ in diags)


class TestEquivariance:
    @pytest.mark.parametrize("method", ["NW", "LL"])
    def test_shift_and_scale(self, mesh7, method):
        rng = np.random.default_rng(12)
        y = rng.normal(size=28)
        pts = random_interior_points(8, 8)
        base = batch_estimate(method, Design(points=mesh7, responses=y), 0.12, pts)
        shifted = batch_estimate(
            method, Design(points=mesh7, responses=y + 3.7), 0.12, pts
        )
        scaled = batch_estimate(
            method, Design(points=mesh7, responses=2.5 * y), 0.12, pts
        )
        assert_allclose(shifted, base + 3.7, atol=1e-10)
        assert_allclose(scaled, 2.5 * base, rtol=1e-10)

    def test_gm_shift_within_cubature_error(self, mesh7, partition7):
        cfg = CubatureConfig()
        rng = np.random.default_rng(3)
        y = rng.normal(size=28)
        s = [0.3, 0.4]
        base = gm_estimate(Design(points=mesh7, responses=y), partition7, 0.15, s, cfg)
        shifted = gm_estimate(
            Design(points=mesh7, responses=y + 2.0), partition7, 0.15, s, cfg
        )
        assert shifted - base == pytest.approx(2.0, abs=40 * cfg.relative_tolerance)
        scaled = gm_estimate(
            Design(points=mesh7, responses=3.0 * y), partition7, 0.15, s, cfg
        )
        assert scaled == pytest.approx(3.0 * base, abs=40 * cfg.relative_tolerance)
