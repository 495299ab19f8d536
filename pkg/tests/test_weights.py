import numpy as np
import pytest

from cadzow.series import embed
from cadzow.weights import (
    alpha_metric,
    alpha_series_weights,
    averaged_metric,
    averaged_metric_profile,
    averaged_series_weights,
    matrix_weights_from_series,
    normalize_weights,
    series_weight_profile,
    series_weights_from_matrix,
    trapezoid_weights,
)


def column_constant(metric, window):
    return np.broadcast_to(metric, (window, metric.size)).copy()


class TestTrapezoid:
    def test_n5_l3(self):
        assert np.array_equal(trapezoid_weights(5, 3), [1, 2, 3, 2, 1])

    def test_n4_l2(self):
        assert np.array_equal(trapezoid_weights(4, 2), [1, 2, 2, 1])

    def test_symmetric_in_window_and_k(self):
        assert np.array_equal(trapezoid_weights(11, 3), trapezoid_weights(11, 9))


class TestSeriesMatrixConversions:
    def test_trapezoid_gives_unit_matrix(self):
        q = trapezoid_weights(9, 4)
        assert np.array_equal(matrix_weights_from_series(q, 4), np.ones((4, 6)))

    def test_unit_series_gives_inverse_trapezoid(self):
        m = matrix_weights_from_series(np.ones(7), 3)
        w = trapezoid_weights(7, 3)
        i = np.add.outer(np.arange(3), np.arange(5))
        assert np.allclose(m, 1.0 / w[i], atol=0)

    def test_zero_series_gives_zero_matrix(self):
        assert np.array_equal(matrix_weights_from_series(np.zeros(6), 2), np.zeros((2, 5)))

    def test_unit_matrix_gives_trapezoid(self):
        assert np.array_equal(series_weights_from_matrix(np.ones((4, 6))), trapezoid_weights(9, 4))

    def test_comb_matrix_gives_unit_series(self):
        # stride-L comb of unit columns, N / L integer: every series point is
        # covered by exactly one unit cell
        n, window = 40, 8
        m = column_constant(alpha_metric(n, window, 0.0), window)
        assert np.allclose(series_weights_from_matrix(m), np.ones(n), atol=1e-12)

    def test_zero_matrix_gives_zero_series(self):
        assert np.array_equal(series_weights_from_matrix(np.zeros((3, 4))), np.zeros(6))

    def test_round_trip_exact(self):
        rng = np.random.default_rng(0)
        for n, window in [(8, 3), (12, 5), (30, 7)]:
            q = rng.uniform(0.0, 4.0, n)
            back = series_weights_from_matrix(matrix_weights_from_series(q, window))
            assert np.allclose(back, q, rtol=1e-12, atol=1e-12)


class TestAlphaMetric:
    def test_alpha_one_is_identity(self):
        assert np.array_equal(alpha_metric(40, 8, 1.0), np.ones(33))

    def test_comb_positions(self):
        c = alpha_metric(40, 8, 0.0)
        assert np.array_equal(np.flatnonzero(c == 1.0) + 1, [1, 9, 17, 25, 33])
        assert np.count_nonzero(c) == 40 // 8  # rank h at alpha = 0

    def test_non_integer_ratio_uses_floor(self):
        c = alpha_metric(20, 6, 0.5)
        assert np.array_equal(np.flatnonzero(c == 1.0) + 1, [1, 7, 13])

    def test_validation(self):
        with pytest.raises(ValueError, match="alpha"):
            alpha_metric(10, 3, 1.5)


class TestAveragedMetric:
    def test_middle_is_one_over_window(self):
        c = averaged_metric(40, 8)
        assert np.allclose(c[7:26], 1.0 / 8.0, atol=0)

    def test_boundary_value_against_direct_sum(self):
        # oracle: sum 1 / w directly for the first column at L = 4
        w = trapezoid_weights(9, 4)
        expected = np.mean(1.0 / w[:4])
        assert averaged_metric(9, 4)[0] == pytest.approx(expected, abs=0)
        assert expected == pytest.approx(25.0 / 48.0, rel=1e-15)

    def test_symmetry(self):
        c = averaged_metric(30, 6)
        assert np.allclose(c, c[::-1], atol=1e-15)

    def test_profile_matches_direct_sum(self):
        for n, window in [(8, 2), (12, 3), (15, 5), (21, 5), (40, 8), (27, 10)]:
            if n < 3 * (window - 1):
                continue
            assert np.allclose(
                averaged_metric_profile(n, window), averaged_metric(n, window), atol=1e-12
            )

    def test_profile_precondition(self):
        with pytest.raises(ValueError, match="3"):
            averaged_metric_profile(10, 6)


class TestAlphaSeriesWeights:
    def test_alpha_zero_all_ones(self):
        assert np.array_equal(alpha_series_weights(12, 4, 0.0), np.ones(12))

    def test_reference_values(self):
        q = alpha_series_weights(40, 8, 0.1)
        assert q[0] == pytest.approx(1.0, abs=0)
        assert q[7] == pytest.approx(1.7, rel=1e-15)
        assert q[19] == pytest.approx(1.7, rel=1e-15)

    def test_alpha_one_is_trapezoid(self):
        # cross-check against the generic conversion from unit matrix weights
        expected = series_weights_from_matrix(np.ones((8, 33)))
        assert np.array_equal(alpha_series_weights(40, 8, 1.0), expected)

    def test_matches_conversion_pipeline(self):
        for n, window in [(12, 4), (40, 8), (40, 20), (30, 5)]:
            for alpha in (0.0, 0.1, 0.35, 0.7, 1.0):
                m = column_constant(alpha_metric(n, window, alpha), window)
                expected = series_weights_from_matrix(m)
                got = alpha_series_weights(n, window, alpha)
                assert np.allclose(got, expected, rtol=1e-12, atol=1e-12), (n, window, alpha)


class TestAveragedSeriesWeights:
    def test_center_weights_are_one(self):
        q = averaged_series_weights(40, 8)
        assert np.allclose(q[15:25], 1.0, atol=1e-12)

    def test_first_weight_l2(self):
        # oracle: anti-diagonal sums of the column-constant averaged metric
        m = column_constant(averaged_metric(8, 2), 2)
        expected = series_weights_from_matrix(m)[0]
        assert averaged_series_weights(8, 2)[0] == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.75, abs=0)

    def test_symmetry(self):
        q = averaged_series_weights(40, 8)
        assert np.allclose(q, q[::-1], atol=1e-14)

    def test_matches_conversion_pipeline_including_margin(self):
        for n, window in [(4, 2), (5, 2), (8, 2), (8, 3), (12, 4), (40, 8), (28, 8)]:
            if n < 4 * (window - 1):
                continue
            m = column_constant(averaged_metric(n, window), window)
            expected = series_weights_from_matrix(m)
            got = averaged_series_weights(n, window)
            assert np.allclose(got, expected, rtol=1e-12, atol=1e-12), (n, window)

    def test_precondition(self):
        with pytest.raises(ValueError, match="4"):
            averaged_series_weights(10, 5)


class TestNormalize:
    def test_uniform(self):
        assert np.array_equal(normalize_weights(np.ones(4)), np.full(4, 0.25))

    def test_trapezoid(self):
        assert np.allclose(normalize_weights(trapezoid_weights(5, 3)),
                           np.array([1, 2, 3, 2, 1]) / 9.0, atol=0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            normalize_weights(np.zeros(3))


class TestNormEquivalences:
    def test_series_inner_equals_matrix_inner(self):
        # q fixed by anti-diagonal sums: <y, z>_q == <Y, Z>_M
        rng = np.random.default_rng(1)
        for n, window in [(9, 3), (16, 6), (25, 12)]:
            m = rng.uniform(0.0, 2.0, (window, n - window + 1))
            q = series_weights_from_matrix(m)
            y = rng.standard_normal(n)
            z = rng.standard_normal(n)
            lhs = float(np.sum(q * y * z))
            rhs = float(np.sum(m * embed(y, window) * embed(z, window)))
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_matrix_inner_equals_metric_inner(self):
        # column-constant weights m_lk = c_k: <Y, Z>_M == tr(Y C Z^T)
        rng = np.random.default_rng(2)
        for n, window in [(10, 4), (30, 7)]:
            c = rng.uniform(0.0, 3.0, n - window + 1)
            y = embed(rng.standard_normal(n), window)
            z = embed(rng.standard_normal(n), window)
            lhs = float(np.sum(column_constant(c, window) * y * z))
            rhs = float(np.trace(y @ np.diag(c) @ z.T))
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_unit_series_norm_equals_comb_metric_norm(self):
        # integer N / L, alpha = 0: ||x||^2 with unit weights equals the
        # metric norm of the trajectory matrix
        rng = np.random.default_rng(3)
        for n, window in [(12, 3), (40, 8), (40, 20)]:
            c = alpha_metric(n, window, 0.0)
            x = rng.standard_normal(n)
            mat = embed(x, window)
            lhs = float(x @ x)
            rhs = float(np.sum(mat * mat * c))
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestProfileRegistry:
    def test_unknown_scheme(self):
        with pytest.raises(ValueError, match="unknown weight scheme"):
            series_weight_profile("nope", 10, 3)

    def test_alpha_requires_value(self):
        with pytest.raises(ValueError, match="alpha"):
            series_weight_profile("alpha", 10, 3)

    def test_inverse_profile(self):
        assert np.array_equal(series_weight_profile("inverse", 5, 3),
                              1.0 / trapezoid_weights(5, 3))
