import numpy as np
import pytest

from momentls import (
    Ar1Spec,
    MomentLSFit,
    RepresentingMeasure,
    Weight,
    assemble_qp,
    build_grid,
    exp_inner,
    fit_pipeline,
    modified_weight,
    poisson_kernel,
    project,
    simulate_ar1,
    support_size_bound,
    tune_delta,
    weight_from_values,
)
from momentls.projection import _support_edge


def random_weight_coeffs(rng, n_terms=3):
    """Coefficients of a random admissible weight (positive cosine polynomial)."""
    coeffs = rng.uniform(-1.0, 1.0, n_terms)
    base = 0.2 + np.abs(coeffs).sum()
    return base, coeffs


def weight_on_grid(base, coeffs, m0):
    omegas = 2.0 * np.pi * np.arange(m0) / m0
    vals = base + sum(c * np.cos((j + 1) * omegas) for j, c in enumerate(coeffs))
    return weight_from_values(vals)


def random_weight(rng, m0, n_terms=3):
    """Random admissible weight: positive cosine polynomial on the grid."""
    base, coeffs = random_weight_coeffs(rng, n_terms)
    return weight_on_grid(base, coeffs, m0)


def random_peaked_sequence(rng, max_lags=30):
    """Random even sequence with a peak at lag 0."""
    k = int(rng.integers(2, max_lags + 1))
    tail = rng.uniform(-1.0, 1.0, k - 1)
    r0 = np.abs(tail).max() * rng.uniform(1.0, 2.0) + 0.1
    return np.concatenate([[r0], tail])


def quadrature_inner(x, y, weight_values, m0):
    """Discretized weighted inner product of two lag sequences."""
    from momentls.sequences import dtft_on_grid

    xf = dtft_on_grid(x, m0)
    yf = dtft_on_grid(y, m0)
    return float(np.sum(xf * yf / weight_values**2) / m0)


class TestBuildGrid:
    def test_three_point_grid(self):
        grid = build_grid(0.5, 3)
        np.testing.assert_allclose(grid.points, [-0.5, 0.0, 0.5])

    def test_large_grid_spacing(self):
        grid = build_grid(0.1, 1000)
        assert grid.size == 1000
        assert grid.points[0] == pytest.approx(-0.9)
        assert grid.points[-1] == pytest.approx(0.9)
        np.testing.assert_allclose(np.diff(grid.points), 1.8 / 999)

    def test_degenerate_interval_collapses_to_origin(self):
        grid = build_grid(1.0, 2)
        np.testing.assert_allclose(grid.points, [0.0])

    @pytest.mark.parametrize("delta", [0.0, -0.1, 1.5])
    def test_delta_out_of_range(self, delta):
        with pytest.raises(ValueError):
            build_grid(delta, 10)

    def test_size_too_small(self):
        with pytest.raises(ValueError):
            build_grid(0.5, 1)


class TestAssembleQp:
    def test_unweighted_gram_matches_closed_form(self):
        grid = build_grid(0.05, 21)
        r = np.array([1.0, 0.2, 0.1])
        qp = assemble_qp(r, grid, None, 8192)
        expected = exp_inner(grid.points[:, None], grid.points[None, :])
        np.testing.assert_allclose(qp.B, expected, rtol=1e-6)

    def test_zero_sequence_gives_zero_data(self):
        grid = build_grid(0.2, 11)
        qp = assemble_qp(np.zeros(4), grid, None, 64)
        np.testing.assert_allclose(qp.a, 0.0, atol=1e-15)
        assert qp.constant == 0.0

    def test_doubling_weight_scales_by_quarter(self):
        rng = np.random.default_rng(8)
        grid = build_grid(0.3, 9)
        r = random_peaked_sequence(rng, 10)
        m0 = 128
        w1 = random_weight(rng, m0)
        w2 = weight_from_values(2.0 * w1.values)
        qp1 = assemble_qp(r, grid, w1, m0)
        qp2 = assemble_qp(r, grid, w2, m0)
        np.testing.assert_allclose(qp2.a, qp1.a / 4.0, rtol=1e-12)
        np.testing.assert_allclose(qp2.B, qp1.B / 4.0, rtol=1e-12)
        assert qp2.constant == pytest.approx(qp1.constant / 4.0, rel=1e-12)

    def test_grid_size_mismatch_rejected(self):
        grid = build_grid(0.3, 5)
        w = weight_from_values(np.ones(64))
        with pytest.raises(ValueError):
            assemble_qp(np.ones(3), grid, w, 128)
        with pytest.raises(ValueError):
            assemble_qp(np.ones(3), grid, None, 64, 128)

    def test_entries_match_slow_quadrature(self):
        rng = np.random.default_rng(13)
        grid = build_grid(0.4, 4)
        r = random_peaked_sequence(rng, 6)
        m0 = 64
        w = random_weight(rng, m0)
        qp = assemble_qp(r, grid, w, m0)
        omegas = 2.0 * np.pi * np.arange(m0) / m0
        from momentls.sequences import dtft_on_grid

        rf = dtft_on_grid(r, m0)
        for i, ai in enumerate(grid.points):
            expect_a = np.mean(poisson_kernel(ai, omegas) * rf / w.values**2)
            assert qp.a[i] == pytest.approx(expect_a, rel=1e-12)
            for j, aj in enumerate(grid.points):
                expect_b = np.mean(
                    poisson_kernel(ai, omegas) * poisson_kernel(aj, omegas) / w.values**2
                )
                assert qp.B[i, j] == pytest.approx(expect_b, rel=1e-12)


class TestProject:
    def test_unit_sequence_recovers_point_mass_at_zero(self):
        fit = project([1.0, 0.0, 0.0], build_grid(0.5, 3))
        np.testing.assert_allclose(fit.measure.support, [0.0])
        np.testing.assert_allclose(fit.measure.masses, [1.0])
        assert fit.objective == pytest.approx(0.0, abs=1e-14)

    def test_geometric_member_on_grid_recovers_exactly(self):
        # spacing 1.9/988 puts 0.5 exactly on the grid
        r = 0.5 ** np.arange(100)
        fit = project(r, build_grid(0.05, 989))
        assert abs(fit.measure.total_mass - 1.0) < 1e-6
        assert fit.objective < 1e-10
        peak = fit.measure.support[np.argmax(fit.measure.masses)]
        assert peak == pytest.approx(0.5, abs=1e-12)

    def test_geometric_member_off_grid_splits_neighbors(self):
        r = 0.5 ** np.arange(100)
        fit = project(r, build_grid(0.05, 1001))
        assert abs(fit.measure.total_mass - 1.0) < 5e-6
        assert fit.objective < 1e-9
        assert np.all(np.abs(fit.measure.support - 0.5) < 0.01)

    def test_zero_sequence_gives_null_fit(self):
        fit = project(np.zeros(8), build_grid(0.1, 50))
        assert fit.measure.is_null
        assert fit.objective == 0.0
        assert fit.avar == 0.0

    def test_peak_violation_rejected(self):
        with pytest.raises(ValueError):
            project([1.0, 2.0], build_grid(0.1, 50))
        with pytest.raises(ValueError):
            project([-1.0, 0.5], build_grid(0.1, 50))

    def test_total_mass_equals_fitted_lag0(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            r = random_peaked_sequence(rng, 12)
            fit = project(r, build_grid(0.1, 101))
            assert fit.measure.total_mass == pytest.approx(
                float(fit.autocovariance([0])[0]), rel=1e-12
            )

    def test_weighted_projection_of_member_is_identity(self):
        rng = np.random.default_rng(33)
        grid = build_grid(0.2, 81)
        m0 = 256
        w = random_weight(rng, m0)
        member = 2.0 * grid.points[30] ** np.arange(20)
        fit = project(member, grid, w, m0)
        np.testing.assert_allclose(fit.autocovariance(np.arange(20)), member,
                										 atol=1e-7)


class TestOptimalityInvariants:
    def test_grid_optimality_and_slackness(self):
        rng = np.random.default_rng(55)
        tol = 1e-6
        m0 = 256
        for trial in range(25):
            r = random_peaked_sequence(rng, 20)
            delta = rng.uniform(0.02, 0.5)
            grid = build_grid(delta, 150)
            weight = random_weight(rng, m0) if trial % 2 else None
            fit = project(r, grid, weight, m0)
            if weight is None:
                a, B, _ = _qp_arrays(r, grid, None, m0)
            else:
                a, B, _ = _qp_arrays(r, grid, weight, m0)
            w = np.zeros(grid.size)
            keep = np.isin(grid.points, fit.measure.support)
            w[keep] = fit.measure.masses
            g = B @ w - a
            assert g.min(initial=0.0) >= -tol * max(1.0, np.abs(a).max())
            assert abs(w @ B @ w - a @ w) <= tol * max(1.0, abs(w @ B @ w))
            sup = np.abs(w * g) / np.maximum(1.0, np.abs(a))
            assert sup.max(initial=0.0) <= tol

    def test_projection_is_idempotent(self):
        rng = np.random.default_rng(66)
        m0 = 512
        for trial in range(10):
            r = random_peaked_sequence(rng, 15)
            delta = rng.uniform(0.05, 0.4)
            grid = build_grid(delta, 120)
            weight = random_weight(rng, m0) if trial % 2 else None
            fit = project(r, grid, weight, m0)
            n_tail = _tail_length(fit.measure)
            fitted_seq = fit.autocovariance(np.arange(n_tail))
            refit = project(fitted_seq, grid, weight, max(m0, 2 * n_tail))
            lags = np.arange(max(n_tail, 50))
            err = np.linalg.norm(refit.autocovariance(lags) - fit.autocovariance(lags))
            assert err <= 1e-8

    def test_norm_equivalence_sandwich(self):
        rng = np.random.default_rng(44)
        m0 = 512
        grid = build_grid(0.3, 5)
        for _ in range(10):
            x = random_peaked_sequence(rng, 16)
            w = random_weight(rng, m0)
            qp = assemble_qp(x, grid, w, m0)
            norm_phi = np.sqrt(qp.constant)
            norm_2 = np.sqrt(x[0] ** 2 + 2.0 * np.sum(x[1:] ** 2))
            assert norm_2 / w.c1 <= norm_phi + 1e-9
            assert norm_phi <= norm_2 / w.c0 + 1e-9

    def test_nonnegative_spectral_density_and_avar(self):
        rng = np.random.default_rng(10)
        omegas = np.linspace(-np.pi, np.pi, 301)
        for _ in range(10):
            r = random_peaked_sequence(rng, 12)
            fit = project(r, build_grid(0.1, 101))
            assert np.all(fit.spectral_density(omegas) >= 0)
            assert fit.avar >= 0
            assert fit.avar == pytest.approx(float(fit.spectral_density(0.0)[0]),
                                             rel=1e-12)

    def test_l1_norm_reported_finite(self):
        rng = np.random.default_rng(14)
        r = random_peaked_sequence(rng, 10)
        fit = project(r, build_grid(0.05, 201))
        expected = np.sum(fit.measure.masses * (1 + np.abs(fit.measure.support))
                          / (1 - np.abs(fit.measure.support)))
        assert fit.l1_norm == pytest.approx(expected, rel=1e-12)
        assert np.isfinite(fit.l1_norm)

    def test_support_cluster_diagnostic(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            n_comp = rng.integers(1, 4)
            alphas = rng.uniform(-0.9, 0.9, n_comp)
            masses = rng.uniform(0.5, 2.0, n_comp)
            lags = np.arange(20)
            r = (alphas[None, :] ** lags[:, None]) @ masses
            r[0] = masses.sum()
            fit = project(r, build_grid(0.02, 2001))
            assert fit.support_clusters <= support_size_bound(20)

    def test_support_size_bound_values(self):
        assert support_size_bound(20) == 11
        assert support_size_bound(21) == 12
        assert support_size_bound(300) == 151


def _qp_arrays(r, grid, weight, m0):
    from momentls.projection import _closed_form_qp

    if weight is None:
        return _closed_form_qp(np.asarray(r, dtype=float), grid.points)
    qp = assemble_qp(r, grid, weight, m0)
    return qp.a, qp.B, qp.constant


def _tail_length(measure, eps=1e-15):
    if measure.is_null:
        return 2
    amax = np.abs(measure.support).max()
    if amax == 0.0:
        return 2
    return max(2, int(np.ceil(np.log(eps) / np.log(amax))))


class TestMeasureSummaries:
    def test_point_mass_at_zero_flat_spectrum(self):
        m = RepresentingMeasure(np.array([0.0]), np.array([2.5]))
        omegas = np.linspace(-np.pi, np.pi, 17)
        np.testing.assert_allclose(m.spectral_density(omegas), 2.5)
        assert m.asymptotic_variance() == pytest.approx(1.0 * 2.5)

    def test_persistent_point_mass_reaches_target_avar(self):
        mass = 1.0 / (1.0 - 0.81)
        m = RepresentingMeasure(np.array([0.9]), np.array([mass]))
        assert m.asymptotic_variance() == pytest.approx(100.0)
        assert float(m.spectral_density(0.0)[0]) == pytest.approx(mass * 19.0)
        assert float(m.spectral_density(np.pi)[0]) == pytest.approx(
            mass * 0.19 / 3.61)

    def test_null_measure_summaries(self):
        m = RepresentingMeasure(np.empty(0), np.empty(0))
        assert m.asymptotic_variance() == 0.0
        assert m.l1_norm() == 0.0
        np.testing.assert_allclose(m.spectral_density([0.0, 1.0]), 0.0)

    def test_unit_point_mass_avar(self):
        m = RepresentingMeasure(np.array([0.0]), np.array([1.0]))
        assert m.asymptotic_variance() == 1.0

    def test_measure_validation(self):
        with pytest.raises(ValueError):
            RepresentingMeasure(np.array([1.0]), np.array([1.0]))
        with pytest.raises(ValueError):
            RepresentingMeasure(np.array([0.5]), np.array([0.0]))

    def test_degenerate_grid_white_noise_model(self):
        r = np.array([2.0, 0.1, 0.05])
        fit = project(r, build_grid(1.0, 2))
        np.testing.assert_allclose(fit.measure.support, [0.0])
        np.testing.assert_allclose(fit.measure.masses, [2.0])


class TestModifiedWeight:
    def test_point_mass_at_zero_gives_flat_weight(self):
        fit = project([2.0, 0.0], build_grid(0.5, 3))
        w = modified_weight(fit, 32)
        np.testing.assert_allclose(w.values, 1.0)
        assert w.c0 == pytest.approx(0.5 / 1.5)
        assert w.c1 == pytest.approx(1.5 / 0.5)

    def test_null_fit_gives_flat_weight(self):
        fit = project(np.zeros(4), build_grid(0.5, 3))
        w = modified_weight(fit, 16)
        np.testing.assert_allclose(w.values, 1.0)
        assert (w.c0, w.c1) == (1.0, 1.0)

    def test_point_mass_shape_and_bounds(self):
        measure = RepresentingMeasure(np.array([0.5]), np.array([1.0]))
        fit = MomentLSFit(measure, delta=0.5, weight=None, objective=0.0,
                          kkt_residual=0.0, grid_size=3)
        w = modified_weight(fit, 64)
        assert w.values[0] == pytest.approx(3.0)
        assert w.values[32] == pytest.approx(1.0 / 3.0)
        assert w.c0 == pytest.approx(0.5 / 1.5)
        assert w.c1 == pytest.approx(1.5 / 0.5)
        assert np.all(w.values >= w.c0 - 1e-12)
        assert np.all(w.values <= w.c1 + 1e-12)

    def test_weight_is_even_on_torus(self):
        r = 0.8 ** np.arange(30)
        fit = project(r, build_grid(0.1, 101))
        for m0 in (33, 64):
            w = modified_weight(fit, m0)
            np.testing.assert_allclose(w.values[1:], w.values[:0:-1], atol=1e-12)


class TestTuneDelta:
    def test_iid_chain_yields_large_delta(self):
        chain = simulate_ar1(Ar1Spec(rho=0.0, tau=1.0, length=50000, seed=7))
        assert tune_delta(chain, 5) >= 0.5

    def test_persistent_chain_yields_small_delta(self):
        chain = simulate_ar1(Ar1Spec(rho=0.9, tau=1.0, length=50000, seed=42))
        assert tune_delta(chain, 5) <= 0.12

    def test_single_batch_runs(self):
        chain = simulate_ar1(Ar1Spec(rho=0.5, tau=1.0, length=10000, seed=1))
        d = tune_delta(chain, 1)
        assert 1e-3 <= d <= 1.0

    def test_chain_too_short(self):
        with pytest.raises(ValueError):
            tune_delta(np.arange(30.0), 5)

    def test_support_edge_ignores_tail_mass(self):
        measure = RepresentingMeasure(np.array([0.1, 0.95]),
                                      np.array([1.0, 0.01]))
        assert _support_edge(measure, 0.05) == pytest.approx(0.1)
        assert _support_edge(measure, 0.0) == pytest.approx(0.95)


class TestFitPipeline:
    def test_constant_chain_gives_null_fit(self):
        fit = fit_pipeline(np.full(100, 3.14), delta=0.2, grid_size=50,
                           mode="unweighted")
        assert fit.measure.is_null
        assert fit.avar == 0.0

    def test_weighted_mode_records_weight_and_delta(self):
        chain = simulate_ar1(Ar1Spec(rho=0.5, tau=1.0, length=2000, seed=9))
        fit = fit_pipeline(chain, delta=0.2, grid_size=100, mode="weighted")
        assert fit.mode == "weighted"
        assert fit.weight is not None
        assert fit.delta == pytest.approx(0.2)

    def test_seeded_persistent_chain_avar_in_bracket(self):
        chain = simulate_ar1(Ar1Spec(rho=0.9, tau=1.0, length=10000, seed=3))
        fit = fit_pipeline(chain, delta="auto", grid_size=200, mode="weighted")
        assert 60.0 <= fit.avar <= 140.0

    def test_invalid_mode_rejected(self):
        with pytest.raises(ValueError):
            fit_pipeline(np.arange(100.0), mode="midweight")

    def test_invalid_delta_string_rejected(self):
        with pytest.raises(ValueError):
            fit_pipeline(np.arange(100.0), delta="automagic")
