"""Hankel embedding of time series and its weighted inverse.

A series (x_1, ..., x_N) and its L-trajectory matrix X[l, k] = x_{l+k-1}
(1-based) are in one-to-one correspondence on the set of Hankel matrices.
This module provides the embedding, the weighted diagonal averaging that
inverts it, and the induced projector onto Hankel matrices, which is
orthogonal under any entrywise-weighted Frobenius inner product.

Formulas are documented in 1-based series/matrix indexing; storage is
0-based numpy throughout.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "DegenerateWeightsError",
    "as_series",
    "embed",
    "diagonal_average",
    "project_hankel",
]


class DegenerateWeightsError(ValueError):
    """Raised when an anti-diagonal carries zero total weight."""


def as_series(values) -> np.ndarray:
    """Validate and return a time series as a 1-D float array.

    Requires length >= 3 and finite values.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"series must be one-dimensional, got shape {x.shape}")
    if x.size < 3:
        raise ValueError(f"series must have at least 3 points, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def check_window(n: int, window: int) -> int:
    """Validate a window length L against a series length N (1 < L < N)."""
    window = int(window)
    if not 1 < window < n:
        raise ValueError(f"window length must satisfy 1 < L < N, got L={window}, N={n}")
    return window


@lru_cache(maxsize=128)
def _antidiagonal_index(shape: tuple[int, int]) -> np.ndarray:
    # entry (l, k) belongs to anti-diagonal l + k (0-based), i.e. series point l + k + 1
    rows, cols = shape
    return np.add.outer(np.arange(rows), np.arange(cols))


def embed(series, window: int) -> np.ndarray:
    """Build the L x K trajectory matrix of a series, K = N - L + 1.

    The result is Hankel: entry (l, k) equals x_{l+k-1} in 1-based indexing.
    """
    x = as_series(series)
    window = check_window(x.size, window)
    k = x.size - window + 1
    return x[_antidiagonal_index((window, k))]


def _check_weights(mat: np.ndarray, weights) -> np.ndarray | None:
    if weights is None:
        return None
    w = np.asarray(weights, dtype=float)
    if w.shape != mat.shape:
        raise ValueError(f"weights shape {w.shape} does not match matrix shape {mat.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights contain non-finite values")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    return w


def diagonal_average(mat, weights=None, *, zero_weight: str = "raise") -> np.ndarray:
    """Invert the Hankel embedding by weighted averaging along anti-diagonals.

    Returns the length-N series y with y_i the weighted mean of the matrix
    entries on anti-diagonal l + k - 1 = i.  With ``weights=None`` this is
    plain anti-diagonal averaging.  The embedding of the result is the
    nearest Hankel matrix to ``mat`` in the weighted Frobenius norm.

    Averages are computed as deviations from a reference entry per
    anti-diagonal, so Hankel input is reproduced bit-exactly.

    zero_weight: what to do on an anti-diagonal with zero total weight;
    ``"raise"`` (default) raises :class:`DegenerateWeightsError`,
    ``"average"`` falls back to the unweighted mean of the entries there.
    """
    y = np.asarray(mat, dtype=float)
    if y.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {y.shape}")
    rows, cols = y.shape
    n = rows + cols - 1
    w = _check_weights(y, weights)

    idx = _antidiagonal_index(y.shape)
    flat = idx.ravel()
    # reference entry per anti-diagonal: the first cell, walking the top row
    # then down the last column
    ref_rows = np.maximum(0, np.arange(n) - cols + 1)
    ref_cols = np.minimum(np.arange(n), cols - 1)
    ref = y[ref_rows, ref_cols]
    dev = y - ref[idx]

    if w is None:
        total = np.bincount(flat, minlength=n).astype(float)
        dev_sum = np.bincount(flat, weights=dev.ravel(), minlength=n)
        return ref + dev_sum / total

    total = np.bincount(flat, weights=w.ravel(), minlength=n)
    dev_sum = np.bincount(flat, weights=(w * dev).ravel(), minlength=n)
    empty = total <= 0.0
    if not empty.any():
        return ref + dev_sum / total
    if zero_weight == "raise":
        bad = int(np.flatnonzero(empty)[0]) + 1
        raise DegenerateWeightsError(
            f"anti-diagonal {bad} has zero total weight; the weighted Hankel "
            "projection is undefined there"
        )
    if zero_weight != "average":
        raise ValueError(f"unknown zero_weight mode {zero_weight!r}")
    counts = np.bincount(flat, minlength=n).astype(float)
    plain_sum = np.bincount(flat, weights=dev.ravel(), minlength=n)
    out = ref + np.where(empty, plain_sum / counts, dev_sum / np.where(empty, 1.0, total))
    return out


def project_hankel(mat, weights=None, *, zero_weight: str = "raise") -> np.ndarray:
    """Project a matrix onto the Hankel subspace under a weighted norm.

    Equivalent to re-embedding :func:`diagonal_average`; minimizes the
    entrywise-weighted Frobenius distance over Hankel matrices and is
    idempotent.
    """
    y = np.asarray(mat, dtype=float)
    series = diagonal_average(y, weights, zero_weight=zero_weight)
    rows, cols = y.shape
    return series[_antidiagonal_index((rows, cols))]
