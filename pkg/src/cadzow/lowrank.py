"""Rank-r projectors: truncated SVD, its oblique (column-weighted) variant,
and an iterative projector for general entrywise weights.

The truncated SVD solves the unweighted nearest rank-r problem.  For a
norm ||Z||^2 = sum_k c_k ||Z[:, k]||^2 with a non-negative diagonal metric
c, the minimizer is obtained by scaling columns by sqrt(c), truncating,
and unscaling with the pseudoinverse.  For arbitrary entrywise weights no
closed form exists and an EM-style iteration is used; it converges to a
local minimum only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .stopping import StopRule

__all__ = [
    "SvdFactors",
    "EmResult",
    "svd_factors",
    "truncated_svd_project",
    "oblique_project",
    "em_weighted_project",
    "numerical_rank",
    "DEFAULT_EM_STOP",
    "RANK_TOLERANCE",
]

# relative singular-value cutoff used for numerical rank decisions
RANK_TOLERANCE = 1e-8

DEFAULT_EM_STOP = StopRule.mean_square_delta(1e-4, 1000)


def _svd(mat: np.ndarray, full_matrices: bool):
    try:
        return scipy.linalg.svd(
            mat, full_matrices=full_matrices, check_finite=False, lapack_driver="gesdd"
        )
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but sturdier
        return scipy.linalg.svd(
            mat, full_matrices=full_matrices, check_finite=False, lapack_driver="gesvd"
        )


def _as_matrix(mat) -> np.ndarray:
    y = np.asarray(mat, dtype=float)
    if y.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("matrix contains non-finite values")
    return y


def _check_rank(mat: np.ndarray, rank: int) -> int:
    rank = int(rank)
    bound = min(mat.shape)
    if not 1 <= rank <= bound:
        raise ValueError(f"rank must satisfy 1 <= r <= min(L, K) = {bound}, got r={rank}")
    return rank


@dataclass(frozen=True)
class SvdFactors:
    """Full SVD with a deterministic sign convention.

    The first nonzero component of every left singular vector is positive,
    so factors are reproducible across runs.  Singular values are sorted
    non-increasing.
    """

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray

    def truncate(self, rank: int) -> np.ndarray:
        """Reassemble the matrix keeping the ``rank`` leading components."""
        r = int(rank)
        s = self.singular_values[:r]
        return (self.u[:, :r] * s) @ self.vt[:r]

    def is_degenerate_at(self, rank: int, rel_tol: float = RANK_TOLERANCE) -> bool:
        """True when the spectrum ties at the truncation boundary, making the
        rank-r minimizer non-unique."""
        s = self.singular_values
        if rank >= s.size or s[0] == 0.0:
            return False
        return (s[rank - 1] - s[rank]) <= rel_tol * s[0]


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> None:
    first_nonzero = (u != 0.0).argmax(axis=0)
    lead = u[first_nonzero, np.arange(u.shape[1])]
    flip = np.flatnonzero(lead < 0)
    u[:, flip] *= -1.0
    paired = flip[flip < vt.shape[0]]
    vt[paired] *= -1.0


def svd_factors(mat) -> SvdFactors:
    """Full SVD of a matrix with the sign convention applied."""
    y = _as_matrix(mat)
    u, s, vt = _svd(y, full_matrices=True)
    _fix_signs(u, vt)
    return SvdFactors(u, s, vt)


def numerical_rank(singular_values: np.ndarray, rel_tol: float = RANK_TOLERANCE) -> int:
    """Count singular values above ``rel_tol`` times the largest one."""
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def _svd_project(mat: np.ndarray, rank: int) -> tuple[np.ndarray, np.ndarray]:
    u, s, vt = _svd(mat, full_matrices=False)
    return (u[:, :rank] * s[:rank]) @ vt[:rank], s


def truncated_svd_project(mat, rank: int) -> np.ndarray:
    """Nearest matrix of rank <= r in the Frobenius norm (leading SVD terms)."""
    y = _as_matrix(mat)
    rank = _check_rank(y, rank)
    projected, _ = _svd_project(y, rank)
    return projected


def _check_metric(metric, cols: int) -> np.ndarray:
    c = np.asarray(metric, dtype=float)
    if c.shape != (cols,):
        raise ValueError(f"metric must be a length-{cols} diagonal, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("metric contains non-finite values")
    if np.any(c < 0):
        raise ValueError("metric entries must be non-negative")
    return c


def _oblique_project_spectrum(
    mat: np.ndarray, rank: int, metric: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    scale = np.sqrt(metric)
    projected, s = _svd_project(mat * scale, rank)
    inv = np.zeros_like(scale)
    positive = scale > 0.0
    inv[positive] = 1.0 / scale[positive]
    return projected * inv, s


def oblique_project(mat, rank: int, metric) -> np.ndarray:
    """Nearest matrix of rank <= r in the column-weighted norm given by a
    non-negative diagonal metric.

    Columns at zero-weight positions are returned as 0; if the input has
    mass there the result is only the minimizer over the weighted
    coordinates, which is reported with a ``RuntimeWarning``.
    """
    y = _as_matrix(mat)
    rank = _check_rank(y, rank)
    c = _check_metric(metric, y.shape[1])
    dead = c == 0.0
    if dead.any() and np.any(y[:, dead] != 0.0):
        warnings.warn(
            "matrix has mass on zero-weight columns; the oblique projection "
            "ignores those coordinates and returns them as 0",
            RuntimeWarning,
            stacklevel=2,
        )
    projected, _ = _oblique_project_spectrum(y, rank, c)
    return projected


@dataclass
class EmResult:
    """Outcome of the iterative entrywise-weighted rank-r projection.

    ``objectives`` holds the weighted squared error of every rank-r
    iterate (non-increasing by the EM property); ``converged`` is False
    when the loop hit its iteration cap before the delta criterion fired.
    """

    matrix: np.ndarray
    iterations: int
    converged: bool
    objectives: np.ndarray
    initial_spectrum: np.ndarray


def em_weighted_project(
    mat, rank: int, weights, init=None, stop: StopRule = DEFAULT_EM_STOP
) -> EmResult:
    """Rank-r approximation under entrywise weights by alternating imputation
    and truncated SVD.

    Each step replaces the low-weight part of the target with the current
    iterate and truncates: Y_next = P_r(mat * M + Y * (1 - M)) with M the
    weights rescaled into [0, 1] (rescaling shifts the objective by a
    constant factor only).  ``init`` defaults to ``mat`` itself.
    """
    y = _as_matrix(mat)
    rank = _check_rank(y, rank)
    w = np.asarray(weights, dtype=float)
    if w.shape != y.shape:
        raise ValueError(f"weights shape {w.shape} does not match matrix shape {y.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and non-negative")
    wmax = w.max()
    if wmax == 0.0:
        raise ValueError("weights are identically zero")
    m = w / wmax

    if init is None:
        current = y
    else:
        current = _as_matrix(init)
        if current.shape != y.shape:
            raise ValueError("init shape does not match matrix shape")

    target = y * m
    complement = 1.0 - m
    size = y.size
    objectives = []
    initial_spectrum = None
    converged = False
    iterations = 0
    for iterations in range(1, stop.max_iter + 1):
        nxt, spectrum = _svd_project(target + current * complement, rank)
        if initial_spectrum is None:
            initial_spectrum = spectrum
        objectives.append(float(np.sum(w * (y - nxt) ** 2)))
        delta = float(np.sum((nxt - current) ** 2)) / size
        current = nxt
        if stop.fired(delta):
            converged = True
            break
    else:
        converged = stop.eps is None

    return EmResult(current, iterations, converged, np.asarray(objectives), initial_spectrum)
