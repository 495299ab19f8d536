"""Weight schemes and the conversions between them.

Three equivalent ways of weighting the approximation problem appear
throughout: per-point series weights q (length N), entrywise matrix
weights M (L x K) on the trajectory matrix, and diagonal column metrics
c (length K).  Equal matrix weights induce the trapezoidal series profile
(each point is counted once per trajectory-matrix cell it occupies), and
a column metric c is the special case of matrix weights constant down
each column.  The schemes here are the ones used by the solvers:

* ``trapezoid_weights``      -- series weights equivalent to unit matrix weights
* ``matrix_weights_from_series`` / ``series_weights_from_matrix`` -- the
  conversion in both directions (anti-diagonal sums fix q; mass is split
  equally across each anti-diagonal going the other way)
* ``alpha_metric``           -- ones on a stride-L comb of columns, alpha elsewhere
* ``averaged_metric``        -- column means of the inverse-trapezoid weights,
  the best column-constant surrogate for equal series weights
* ``alpha_series_weights`` / ``averaged_series_weights`` -- closed-form
  series profiles induced by those metrics
"""

from __future__ import annotations

import numpy as np

from .series import _antidiagonal_index, check_window

__all__ = [
    "trapezoid_weights",
    "matrix_weights_from_series",
    "series_weights_from_matrix",
    "alpha_metric",
    "averaged_metric",
    "averaged_metric_profile",
    "alpha_series_weights",
    "averaged_series_weights",
    "normalize_weights",
    "series_weight_profile",
    "SERIES_SCHEMES",
]


def _check_alpha(alpha: float, allow_zero: bool = True) -> float:
    alpha = float(alpha)
    low_ok = alpha >= 0.0 if allow_zero else alpha > 0.0
    if not (low_ok and alpha <= 1.0):
        bounds = "[0, 1]" if allow_zero else "(0, 1]"
        raise ValueError(f"alpha must lie in {bounds}, got {alpha}")
    return alpha


def trapezoid_weights(n: int, window: int) -> np.ndarray:
    """Series weights equivalent to unit matrix weights: the number of
    trajectory-matrix cells on each anti-diagonal.

    w_i = min(i, L, K, N - i + 1); symmetric in (L, K).
    """
    window = check_window(n, window)
    k = n - window + 1
    i = np.arange(1, n + 1, dtype=float)
    return np.minimum.reduce([i, np.full(n, float(window)), np.full(n, float(k)), n - i + 1])


def matrix_weights_from_series(q, window: int) -> np.ndarray:
    """Matrix weights whose anti-diagonal sums reproduce the series weights q.

    Only the sums are determined; the mass of q_i is split equally over
    the cells of its anti-diagonal, which keeps the matrix maximally
    uniform (unit matrix weights come back from the trapezoid profile).
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 1:
        raise ValueError(f"series weights must be 1-D, got shape {q.shape}")
    if not np.all(np.isfinite(q)) or np.any(q < 0):
        raise ValueError("series weights must be finite and non-negative")
    n = q.size
    window = check_window(n, window)
    per_cell = q / trapezoid_weights(n, window)
    return per_cell[_antidiagonal_index((window, n - window + 1))]


def series_weights_from_matrix(matrix_weights) -> np.ndarray:
    """Series weights induced by matrix weights: q_i = sum of M over the
    anti-diagonal l + k - 1 = i."""
    m = np.asarray(matrix_weights, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"matrix weights must be 2-D, got shape {m.shape}")
    rows, cols = m.shape
    n = rows + cols - 1
    return np.bincount(_antidiagonal_index(m.shape).ravel(), weights=m.ravel(), minlength=n)


def alpha_metric(n: int, window: int, alpha: float) -> np.ndarray:
    """Column metric with ones on the stride-L comb k = jL + 1,
    j = 0, ..., h - 1 with h = floor(N / L), and ``alpha`` elsewhere.

    With alpha = 1 this is the identity metric; with alpha = 0 and N / L
    integer the induced series weights are exactly equal (the comb picks
    non-overlapping windows), at the price of a rank-h metric.
    """
    window = check_window(n, window)
    alpha = _check_alpha(alpha)
    k = n - window + 1
    h = n // window
    c = np.full(k, alpha)
    c[np.arange(h) * window] = 1.0
    return c


def averaged_metric(n: int, window: int) -> np.ndarray:
    """Column metric targeting equal series weights: the column-wise mean
    of the inverse-trapezoid matrix weights 1 / w_{l+k-1}.

    This is the nearest column-constant matrix (in Frobenius distance) to
    the exact equal-weight matrix weights, computed by direct summation;
    valid for any 1 < L <= K.
    """
    window = check_window(n, window)
    k = n - window + 1
    if window > k:
        raise ValueError(f"window must not exceed K = N - L + 1, got L={window}, K={k}")
    inv_w = 1.0 / trapezoid_weights(n, window)
    return inv_w[_antidiagonal_index((window, k))].mean(axis=0)


def averaged_metric_profile(n: int, window: int) -> np.ndarray:
    """Closed-form boundary profile of :func:`averaged_metric`.

    c_k = (1/L)(k/L + sum_{j=k}^{L-1} 1/j) for k < L, 1/L in the middle,
    and symmetric at the right end; requires N >= 3(L - 1) so the three
    regions do not overlap.
    """
    window = check_window(n, window)
    if n < 3 * (window - 1):
        raise ValueError(f"profile requires N >= 3(L - 1), got N={n}, L={window}")
    k = n - window + 1
    c = np.full(k, 1.0 / window)
    if window > 1:
        j = np.arange(1, window, dtype=float)
        # tail[t] = sum_{j=t+1}^{L-1} 1/j, so c_k = (k/L + tail[k-1]) / L
        tail = np.concatenate([np.cumsum((1.0 / j)[::-1])[::-1], [0.0]])
        edge = np.arange(1, window, dtype=float)
        c[: window - 1] = (edge / window + tail[: window - 1]) / window
        c[k - window + 1 :] = c[window - 2 :: -1]
    return c


def alpha_series_weights(n: int, window: int, alpha: float) -> np.ndarray:
    """Series weights induced by :func:`alpha_metric` when N / L is integer:
    q_i = 1 + alpha * (min(i, L, N - i + 1) - 1).

    Ramps linearly from 1 at both ends to 1 + (L - 1) alpha in the middle;
    with alpha = 1 it reproduces the trapezoid profile.
    """
    window = check_window(n, window)
    alpha = _check_alpha(alpha)
    i = np.arange(1, n + 1, dtype=float)
    plateau = np.minimum.reduce([i, np.full(n, float(window)), n - i + 1])
    return 1.0 + alpha * (plateau - 1.0)


def _harmonic(count: int) -> np.ndarray:
    # H_0 = 0, H_i = sum_{j<=i} 1/j for i = 1..count
    return np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, count + 1))])


def averaged_series_weights(n: int, window: int) -> np.ndarray:
    """Closed-form series weights induced by :func:`averaged_metric`.

    Exactly 1 in the center (2L <= i <= N - 2L + 1), with harmonic-number
    boundary ramps over the first and last 2L - 1 points; requires
    N >= 4(L - 1).
    """
    window = check_window(n, window)
    if n < 4 * (window - 1):
        raise ValueError(f"closed form requires N >= 4(L - 1), got N={n}, L={window}")
    length = window
    h = _harmonic(length)
    i_low = np.arange(1, length, dtype=float)
    u_low = i_low * (i_low + 1) / (2.0 * length**2) + (i_low / length) * (
        1.0 + h[length - 1] - h[1:length]
    )
    i_high = np.arange(length, 2 * length, dtype=float)
    u_high = (
        1.0
        + (2.0 * i_high * length - i_high - i_high**2) / (2.0 * length**2)
        + ((length - i_high) / length) * (h[length - 1] - h[: length])
    )
    u = np.concatenate([[np.nan], u_low, u_high])  # u[i] = ramp value at offset i
    # the profile is symmetric; indexing by distance to the nearest end keeps
    # the two ramps consistent where they meet (N close to 4(L - 1))
    i = np.arange(1, n + 1)
    offset = np.minimum(i, n - i + 1)
    q = np.ones(n)
    boundary = offset <= 2 * length - 1
    q[boundary] = u[offset[boundary]]
    return q


def normalize_weights(q) -> np.ndarray:
    """Rescale weights to sum to 1."""
    q = np.asarray(q, dtype=float)
    total = q.sum()
    if not total > 0:
        raise ValueError("weights sum to zero; cannot normalize")
    return q / total


def _unit(n: int, window: int) -> np.ndarray:
    check_window(n, window)
    return np.ones(n)


def _inverse(n: int, window: int) -> np.ndarray:
    return 1.0 / trapezoid_weights(n, window)


SERIES_SCHEMES = {
    "unit": _unit,
    "trapezoid": trapezoid_weights,
    "inverse": _inverse,
    "alpha": alpha_series_weights,
    "averaged": averaged_series_weights,
}


def series_weight_profile(scheme: str, n: int, window: int, alpha: float | None = None) -> np.ndarray:
    """Evaluate a named series-weight scheme (CLI entry point)."""
    try:
        fn = SERIES_SCHEMES[scheme]
    except KeyError:
        known = ", ".join(sorted(SERIES_SCHEMES))
        raise ValueError(f"unknown weight scheme {scheme!r}; known schemes: {known}") from None
    if scheme == "alpha":
        if alpha is None:
            raise ValueError("scheme 'alpha' requires an alpha value")
        return fn(n, window, alpha)
    if alpha is not None:
        raise ValueError(f"scheme {scheme!r} does not take an alpha value")
    return fn(n, window)
