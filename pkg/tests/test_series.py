import numpy as np
import pytest
import scipy.optimize

from cadzow.series import (
    DegenerateWeightsError,
    as_series,
    diagonal_average,
    embed,
    project_hankel,
)


def weighted_inner(a, b, w):
    return float(np.sum(w * a * b))


class TestEmbed:
    def test_small_example(self):
        expected = np.array([[1.0, 2.0, 3.0], [2.0, 3.0, 4.0]])
        assert np.array_equal(embed([1, 2, 3, 4], 2), expected)

    def test_constant_series_rank_one(self):
        mat = embed(np.full(10, 3.5), 4)
        assert np.array_equal(mat, np.full((4, 7), 3.5))
        assert np.linalg.matrix_rank(mat) == 1

    def test_sine_has_rank_two(self):
        k = np.arange(1, 41)
        mat = embed(5 * np.sin(2 * np.pi * k / 6), 20)
        s = np.linalg.svd(mat, compute_uv=False)
        assert np.count_nonzero(s > 1e-8 * s[0]) == 2

    @pytest.mark.parametrize("window", [0, 1, 10, 11])
    def test_rejects_bad_window(self, window):
        with pytest.raises(ValueError, match="window"):
            embed(np.arange(10.0), window)

    def test_rejects_bad_series(self):
        with pytest.raises(ValueError, match="at least 3"):
            as_series([1.0, 2.0])
        with pytest.raises(ValueError, match="finite"):
            as_series([1.0, np.nan, 2.0])
        with pytest.raises(ValueError, match="one-dimensional"):
            as_series(np.ones((3, 3)))


class TestDiagonalAverage:
    def test_unit_weights_plain_average(self):
        out = diagonal_average(np.array([[1.0, 3.0], [2.0, 5.0]]))
        assert np.array_equal(out, np.array([1.0, 2.5, 5.0]))

    def test_hankel_fixed_point_is_exact(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(-1, 1, 15) * np.pi  # deliberately awkward floats
        mat = embed(x, 6)
        w = rng.uniform(0.05, 3.0, mat.shape)
        assert np.array_equal(diagonal_average(mat, w), x)
        assert np.array_equal(diagonal_average(mat), x)

    def test_weighted_hand_example(self):
        mat = np.array([[0.0, 2.0], [2.0, 0.0]])
        w = np.array([[1.0, 0.0], [3.0, 1.0]])
        # center value (0*2 + 3*2) / (0 + 3) = 2
        assert np.array_equal(diagonal_average(mat, w), np.array([0.0, 2.0, 0.0]))

    def test_weighted_hand_example_against_brute_force(self):
        # independent oracle: numerically minimize the weighted distance over
        # 2x2 Hankel matrices [[a, b], [b, c]]
        mat = np.array([[0.0, 2.0], [2.0, 0.0]])
        w = np.array([[1.0, 0.0], [3.0, 1.0]])

        def objective(v):
            h = np.array([[v[0], v[1]], [v[1], v[2]]])
            return weighted_inner(mat - h, mat - h, w)

        best = scipy.optimize.minimize(objective, x0=np.ones(3), method="Nelder-Mead",
                                       options={"xatol": 1e-10, "fatol": 1e-14}).x
        assert np.allclose(diagonal_average(mat, w), best, atol=1e-6)

    def test_zero_weight_diagonal_raises(self):
        w = np.ones((2, 2))
        w[0, 0] = 0.0
        with pytest.raises(DegenerateWeightsError, match="anti-diagonal 1"):
            diagonal_average(np.ones((2, 2)), w)

    def test_zero_weight_diagonal_average_fallback(self):
        mat = np.array([[1.0, 3.0], [5.0, 7.0]])
        w = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = diagonal_average(mat, w, zero_weight="average")
        assert np.array_equal(out, np.array([1.0, 4.0, 7.0]))

    def test_rejects_bad_weights(self):
        mat = np.ones((2, 3))
        with pytest.raises(ValueError, match="shape"):
            diagonal_average(mat, np.ones((3, 2)))
        with pytest.raises(ValueError, match="non-negative"):
            diagonal_average(mat, -np.ones((2, 3)))


class TestProjectHankel:
    def test_hankel_input_unchanged(self):
        mat = embed(np.arange(1.0, 9.0) / 7.0, 3)
        assert np.array_equal(project_hankel(mat), mat)

    def test_unit_weights_example(self):
        out = project_hankel(np.array([[1.0, 3.0], [2.0, 5.0]]))
        assert np.array_equal(out, np.array([[1.0, 2.5], [2.5, 5.0]]))

    def test_idempotent_exactly(self):
        rng = np.random.default_rng(11)
        mat = rng.standard_normal((5, 8))
        w = rng.uniform(0.1, 2.0, mat.shape)
        once = project_hankel(mat, w)
        assert np.array_equal(project_hankel(once, w), once)

    def test_matches_least_squares_oracle(self):
        # independent oracle: solve min ||sqrt(w) * (mat - T(s))||_F over the
        # series s via a dense linear least-squares system
        rng = np.random.default_rng(23)
        mat = rng.standard_normal((4, 5))
        w = rng.uniform(0.2, 3.0, mat.shape)
        rows, cols = mat.shape
        n = rows + cols - 1
        design = np.zeros((mat.size, n))
        rhs = np.zeros(mat.size)
        for l in range(rows):
            for k in range(cols):
                cell = l * cols + k
                design[cell, l + k] = np.sqrt(w[l, k])
                rhs[cell] = np.sqrt(w[l, k]) * mat[l, k]
        series, *_ = np.linalg.lstsq(design, rhs, rcond=None)
        expected = embed(series, rows)
        assert np.allclose(project_hankel(mat, w), expected, atol=1e-10)

    def test_orthogonality_of_residual(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            mat = rng.standard_normal((5, 7))
            w = rng.uniform(0.1, 4.0, mat.shape)
            proj = project_hankel(mat, w)
            h = embed(rng.standard_normal(11), 5)
            inner = weighted_inner(mat - proj, h, w)
            scale = np.sqrt(weighted_inner(mat, mat, w) * weighted_inner(h, h, w))
            assert abs(inner) <= 1e-10 * scale

    def test_no_hankel_candidate_is_closer(self):
        rng = np.random.default_rng(5)
        mat = rng.standard_normal((4, 6))
        w = rng.uniform(0.1, 2.0, mat.shape)
        proj = project_hankel(mat, w)
        best = weighted_inner(mat - proj, mat - proj, w)
        base = diagonal_average(proj)
        for _ in range(200):
            candidate = embed(base + rng.standard_normal(9) * rng.uniform(1e-3, 1.0), 4)
            dist = weighted_inner(mat - candidate, mat - candidate, w)
            assert dist >= best - 1e-12 * max(1.0, best)
