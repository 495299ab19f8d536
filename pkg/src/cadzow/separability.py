"""Separability diagnostics: how distinguishable two series are to the
first iteration of the solvers.

Separability is measured by cosines between lagged vectors of the two
series: Euclidean cosines between trajectory-matrix columns, and oblique
cosines (under a diagonal column metric) between rows.  The largest
absolute cosine ``rho`` bounds how much of one series leaks into a
rank-truncated reconstruction of the other, so small ``rho`` predicts a
good first iteration and fast convergence.

For the canonical probe pair (cosine wave vs constant) the module also
evaluates the stride sums that control ``rho`` under the comb metric of
:func:`cadzow.weights.alpha_metric`, the resulting bound, and the window
length minimizing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import as_series, check_window, embed

__all__ = [
    "SeparabilityReport",
    "column_correlations",
    "row_correlations",
    "weak_separability",
    "CombBound",
    "comb_correlation_bound",
    "optimal_window",
    "cosine_sum",
    "cosine_square_sum",
]


@dataclass(frozen=True)
class SeparabilityReport:
    """Largest absolute column and row cosines for a pair of series.

    ``rho`` = max of the two; the argmax fields are 1-based (i, j) index
    pairs.  ``excluded_rows`` is set when rows with zero norm under a
    degenerate metric were left out of the maximum.
    """

    max_col_corr: float
    max_row_corr: float
    rho: float
    col_argmax: tuple[int, int]
    row_argmax: tuple[int, int]
    excluded_rows: bool = False

    def to_json_dict(self) -> dict:
        return {
            "max_col_corr": self.max_col_corr,
            "max_row_corr": self.max_row_corr,
            "rho": self.rho,
            "col_argmax": list(self.col_argmax),
            "row_argmax": list(self.row_argmax),
            "excluded_rows": self.excluded_rows,
        }


def _trajectory_pair(x1, x2, window: int):
    a = as_series(x1)
    b = as_series(x2)
    if a.size != b.size:
        raise ValueError("both series must have the same length")
    window = check_window(a.size, window)
    return embed(a, window), embed(b, window)


def column_correlations(x1, x2, window: int) -> np.ndarray:
    """K x K table of Euclidean cosines between trajectory columns of the
    two series; entry (i, j) pairs column i of the first with column j of
    the second.  Zero-norm lagged vectors are an error."""
    m1, m2 = _trajectory_pair(x1, x2, window)
    n1 = np.linalg.norm(m1, axis=0)
    n2 = np.linalg.norm(m2, axis=0)
    if np.any(n1 == 0.0) or np.any(n2 == 0.0):
        raise ValueError("a lagged vector has zero norm; column cosines are undefined")
    return (m1.T @ m2) / np.outer(n1, n2)


def row_correlations(x1, x2, window: int, metric=None) -> np.ndarray:
    """L x L table of cosines between trajectory rows under the oblique
    inner product <u, v> = sum_k c_k u_k v_k of a diagonal metric
    (identity when ``metric`` is None).

    Rows with zero metric norm (possible only for degenerate metrics) give
    NaN rows/columns; :func:`weak_separability` excludes them from the max.
    """
    m1, m2 = _trajectory_pair(x1, x2, window)
    cols = m1.shape[1]
    if metric is None:
        c = np.ones(cols)
    else:
        c = np.asarray(metric, dtype=float)
        if c.shape != (cols,):
            raise ValueError(f"metric must have length K = {cols}, got shape {c.shape}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError("metric entries must be finite and non-negative")
    gram = (m1 * c) @ m2.T
    n1 = np.sqrt(np.sum(m1 * m1 * c, axis=1))
    n2 = np.sqrt(np.sum(m2 * m2 * c, axis=1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return gram / np.outer(n1, n2)


def weak_separability(x1, x2, window: int, metric=None) -> SeparabilityReport:
    """Scan all column and row pairs and report the largest absolute
    cosines and their locations."""
    cols = np.abs(column_correlations(x1, x2, window))
    ci, cj = np.unravel_index(np.argmax(cols), cols.shape)
    rows = np.abs(row_correlations(x1, x2, window, metric))
    excluded = bool(np.isnan(rows).any())
    if excluded:
        if np.isnan(rows).all():
            raise ValueError("all row pairs are degenerate under the metric")
        ri, rj = np.unravel_index(np.nanargmax(rows), rows.shape)
        max_row = float(rows[ri, rj])
    else:
        ri, rj = np.unravel_index(np.argmax(rows), rows.shape)
        max_row = float(rows[ri, rj])
    max_col = float(cols[ci, cj])
    return SeparabilityReport(
        max_col_corr=max_col,
        max_row_corr=max_row,
        rho=max(max_col, max_row),
        col_argmax=(int(ci) + 1, int(cj) + 1),
        row_argmax=(int(ri) + 1, int(rj) + 1),
        excluded_rows=excluded,
    )


@dataclass(frozen=True)
class CombBound:
    """Stride-sum quantities controlling the row cosines of a cosine wave
    against a constant under the comb metric, and the predicted order of
    the separability measure."""

    cosine_sum_max: float
    cosine_square_min: float
    bound: float


def comb_correlation_bound(n: int, window: int, alpha: float, omega: float) -> CombBound:
    """Evaluate, by direct summation over the comb columns k = jL + 1,

    * C = max over row shifts of the plain cosine sums,
    * D = min over row shifts of the squared-cosine sums,

    and the predicted order max(1/L, ((1-a)C + a) / ((1-a)D + aK)) of the
    separability measure for a cosine wave of frequency ``omega`` against
    a constant residual."""
    window = check_window(n, window)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    k_total = n - window + 1
    h = n // window
    comb = np.arange(h) * window + 1  # 1-based comb column indices
    shifts = np.arange(1, window + 1)
    angles = 2.0 * math.pi * omega * (shifts[:, None] + comb[None, :] - 1)
    co = np.cos(angles)
    c_max = float(np.max(co.sum(axis=1)))
    d_min = float(np.min((co * co).sum(axis=1)))
    bound = max(
        1.0 / window,
        ((1.0 - alpha) * c_max + alpha) / ((1.0 - alpha) * d_min + alpha * k_total),
    )
    return CombBound(c_max, d_min, bound)


def optimal_window(n: int, alpha: float) -> int:
    """Window length minimizing the predicted separability order
    max(1/L, 1/((1-a)N/L + aK)): the crossing point of the two branches,
    rounded to the nearest valid L.

    At alpha = 1 this is about (N + 1) / 2; as alpha tends to 0 it falls
    to about sqrt(N)."""
    if n < 3:
        raise ValueError(f"series length must be at least 3, got {n}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    value = (alpha * (n + 1) + math.sqrt(alpha**2 * (n + 1) ** 2 + 4.0 * n * (1.0 - alpha**2))) / (
        2.0 * (1.0 + alpha)
    )
    return int(min(max(round(value), 2), n - 1))


def cosine_sum(a: float, b: float, n: int) -> float:
    """Closed form of sum_{k=1}^{n} cos(a k + b); requires sin(a/2) != 0."""
    s = math.sin(a / 2.0)
    if s == 0.0:
        raise ValueError("closed form undefined: a is a multiple of 2*pi")
    return math.sin(a * n / 2.0) * math.cos((a * n + a + 2.0 * b) / 2.0) / s


def cosine_square_sum(a: float, b: float, n: int) -> float:
    """Closed form of sum_{k=1}^{n} cos^2(a k + b); requires sin(a) != 0."""
    s = math.sin(a)
    if s == 0.0:
        raise ValueError("closed form undefined: a is a multiple of pi")
    return 0.25 * (2.0 * n + (math.sin(2.0 * a * n + a + 2.0 * b) - math.sin(a + 2.0 * b)) / s)
