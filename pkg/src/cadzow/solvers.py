"""Iterative algorithms for approximating a noisy series by a series of
finite rank.

All five methods alternate a rank-r projection with the (weighted) Hankel
projection of the trajectory matrix, differing in the norm they work in:

* ``cadzow``            -- plain Frobenius norm (classic alternating projections;
  one iteration is exactly basic SSA reconstruction)
* ``oblique_cadzow``    -- column-weighted norm from a diagonal metric; the
  rank projection stays a single SVD after column scaling
* ``weighted_cadzow``   -- entrywise weights 1 / w equalizing the per-point
  series weights; the rank projection becomes an inner iterative loop
* ``extended_cadzow``   -- pads the series with L - 1 values on each side,
  treats the padding as zero-weight gaps, and extracts the observed window

Each run returns the approximating series together with a trace of
per-iteration diagnostics (residual norms, series deltas, numerical rank)
that the property tests assert against.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lowrank import (
    _oblique_project_spectrum,
    _svd_project,
    em_weighted_project,
    numerical_rank,
)
from .series import (
    DegenerateWeightsError,
    _antidiagonal_index,
    as_series,
    check_window,
    diagonal_average,
)
from .stopping import StopRule
from .weights import alpha_metric, averaged_metric, matrix_weights_from_series

__all__ = [
    "ALGORITHMS",
    "SolverConfig",
    "IterationRecord",
    "SolverTrace",
    "cadzow",
    "oblique_cadzow",
    "weighted_cadzow",
    "extended_cadzow",
    "adjust",
    "solve",
    "DEFAULT_STOP1",
    "DEFAULT_STOP2",
]

ALGORITHMS = ("cadzow", "cadzow_alpha", "cadzow_averaged", "weighted", "extended")
EXTENSION_POLICIES = ("recurrent", "zeros", "constant")

DEFAULT_STOP1 = StopRule.mean_square_delta(1e-8, 1000)
DEFAULT_STOP2 = StopRule.mean_square_delta(1e-4, 1000)


@dataclass
class IterationRecord:
    """Diagnostics for one outer iteration, all norms in the algorithm's norm.

    ``objective`` is the distance from the incoming iterate to the rank-r
    set (the quantity the iteration drives to zero; non-increasing for the
    exact-projector algorithms), ``hankel_step`` the distance moved by the
    Hankel projection, and ``pyth_residual`` the relative defect of
    ||Y||^2 = ||Y - PY||^2 + ||PY||^2 for the rank projection.
    """

    iteration: int
    objective: float
    hankel_step: float
    norm_before: float
    norm_after: float
    series_delta: float
    pyth_residual: float
    num_rank: int
    inner_iterations: int = 0
    inner_converged: bool = True

    def to_json_dict(self) -> dict:
        return {
            "iter": self.iteration,
            "objective": self.objective,
            "series_delta": self.series_delta,
            "pyth_residual": self.pyth_residual,
            "num_rank": self.num_rank,
        }


@dataclass
class SolverTrace:
    """Per-iteration records plus final flags for one solver run.

    ``converged`` means the stop rule fired: the delta criterion was met,
    or the rule was a pure iteration cap that ran to completion.  Only
    subsequential convergence is guaranteed in theory, so a converged run
    makes no global-optimality claim.
    """

    algorithm: str
    records: list[IterationRecord]
    converged: bool
    iterations: int
    snapshots: list[np.ndarray] | None = None

    def to_json_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "converged": self.converged,
            "iterations": self.iterations,
            "records": [r.to_json_dict() for r in self.records],
        }


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm choice and parameters for :func:`solve`.

    ``alpha`` is required by ``cadzow_alpha`` (and must lie in (0, 1];
    the degenerate value 0 needs ``allow_degenerate_metric`` and is
    documented as solving a different, subsampled problem).  ``extension``
    selects how ``extended`` pads the series.
    """

    algorithm: str
    window: int
    rank: int
    alpha: float | None = None
    extension: str = "recurrent"
    stop1: StopRule = DEFAULT_STOP1
    stop2: StopRule = DEFAULT_STOP2
    adjust: bool = False
    allow_degenerate_metric: bool = False

    def validate(self, n: int) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        window = check_window(n, self.window)
        k = n - window + 1
        if not 1 <= self.rank <= min(window, k):
            raise ValueError(
                f"rank must satisfy 1 <= r <= min(L, K) = {min(window, k)}, got r={self.rank}"
            )
        if self.algorithm == "cadzow_alpha":
            if self.alpha is None:
                raise ValueError("algorithm 'cadzow_alpha' requires alpha")
            if not 0.0 <= self.alpha <= 1.0:
                raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
            if self.alpha == 0.0 and not self.allow_degenerate_metric:
                raise ValueError(
                    "alpha = 0 gives a rank-deficient metric and does not solve the "
                    "series approximation problem; pass allow_degenerate_metric=True "
                    "to run it anyway"
                )
            if n % window != 0:
                raise ValueError(
                    f"'cadzow_alpha' requires N to be a multiple of L for the "
                    f"equal-weight correspondence, got N={n}, L={window}"
                )
        if self.algorithm == "extended" and self.extension not in EXTENSION_POLICIES:
            raise ValueError(
                f"unknown extension policy {self.extension!r}; expected one of "
                f"{EXTENSION_POLICIES}"
            )

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "window": self.window,
            "rank": self.rank,
            "alpha": self.alpha,
            "extension": self.extension,
            "stop1": self.stop1.to_dict(),
            "stop2": self.stop2.to_dict(),
            "adjust": self.adjust,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        return cls(
            algorithm=data["algorithm"],
            window=int(data["window"]),
            rank=int(data["rank"]),
            alpha=data.get("alpha"),
            extension=data.get("extension", "recurrent"),
            stop1=StopRule.from_dict(data["stop1"]) if "stop1" in data else DEFAULT_STOP1,
            stop2=StopRule.from_dict(data["stop2"]) if "stop2" in data else DEFAULT_STOP2,
            adjust=bool(data.get("adjust", False)),
            allow_degenerate_metric=bool(data.get("allow_degenerate_metric", False)),
        )


def _alternating_solve(
    x: np.ndarray,
    window: int,
    stop1: StopRule,
    project,
    matrix_weights: np.ndarray | None,
    algorithm: str,
    *,
    zero_weight: str = "raise",
    extract=None,
    capture_series: bool = False,
):
    """Shared outer loop: alternate ``project`` (rank reduction, returning
    the projected matrix, its working spectrum, and inner-loop info) with
    the weighted Hankel projection, tracking diagnostics in the weighted
    norm given by ``matrix_weights``."""
    idx = _antidiagonal_index((window, x.size - window + 1))
    y = x[idx]
    if matrix_weights is None:
        norm2 = lambda mat: float(np.sum(mat * mat))
    else:
        norm2 = lambda mat: float(np.sum(matrix_weights * mat * mat))
    if extract is None:
        extract = lambda s: s

    prev_series = extract(x)
    records: list[IterationRecord] = []
    snapshots: list[np.ndarray] | None = [] if capture_series else None
    converged = False
    iterations = 0
    for iterations in range(1, stop1.max_iter + 1):
        z, spectrum, inner_iters, inner_ok = project(y)
        full_series = diagonal_average(z, matrix_weights, zero_weight=zero_weight)
        y_next = full_series[idx]
        series = extract(full_series)

        norm_before = norm2(y)
        objective = np.sqrt(norm2(y - z))
        norm_z = norm2(z)
        hankel_step = np.sqrt(norm2(z - y_next))
        pyth = abs(norm_before - objective**2 - norm_z) / norm_before if norm_before > 0 else 0.0
        delta = float(np.mean((series - prev_series) ** 2))
        records.append(
            IterationRecord(
                iteration=iterations,
                objective=float(objective),
                hankel_step=float(hankel_step),
                norm_before=norm_before,
                norm_after=norm2(y_next),
                series_delta=delta,
                pyth_residual=float(pyth),
                num_rank=numerical_rank(spectrum),
                inner_iterations=inner_iters,
                inner_converged=inner_ok,
            )
        )
        if capture_series:
            snapshots.append(series.copy())

        y = y_next
        prev_series = series
        if stop1.fired(delta):
            converged = True
            break
    else:
        converged = stop1.eps is None

    trace = SolverTrace(algorithm, records, converged, iterations, snapshots)
    return prev_series, trace


def cadzow(series_values, window: int, rank: int, stop1: StopRule = DEFAULT_STOP1,
           *, capture_series: bool = False):
    """Classic alternating projections: truncated SVD then anti-diagonal
    averaging.  Stopped after one iteration this is basic SSA
    reconstruction with ``rank`` leading components."""
    x = as_series(series_values)
    SolverConfig("cadzow", window, rank, stop1=stop1).validate(x.size)

    def project(y):
        z, s = _svd_project(y, rank)
        return z, s, 0, True

    return _alternating_solve(
        x, window, stop1, project, None, "cadzow", capture_series=capture_series
    )


def oblique_cadzow(series_values, window: int, rank: int, metric,
                   stop1: StopRule = DEFAULT_STOP1, *,
                   allow_degenerate_metric: bool = False,
                   capture_series: bool = False):
    """Alternating projections in the column-weighted norm of a diagonal
    metric.  With the identity metric this reproduces :func:`cadzow`
    exactly; a metric with zeros requires an explicit opt-in because the
    problem it solves is then a subsampled matrix approximation, not the
    series one."""
    x = as_series(series_values)
    window = check_window(x.size, window)
    c = np.asarray(metric, dtype=float)
    k = x.size - window + 1
    if c.shape != (k,):
        raise ValueError(f"metric must have length K = {k}, got shape {c.shape}")
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise ValueError("metric entries must be finite and non-negative")
    if np.any(c == 0.0) and not allow_degenerate_metric:
        raise ValueError(
            "metric has zero entries; pass allow_degenerate_metric=True to run "
            "the degenerate variant anyway"
        )
    SolverConfig("cadzow", window, rank, stop1=stop1).validate(x.size)
    m = np.broadcast_to(c, (window, k)).copy()

    def project(y):
        z, s = _oblique_project_spectrum(y, rank, c)
        return z, s, 0, True

    return _alternating_solve(
        x, window, stop1, project, m, "oblique_cadzow", capture_series=capture_series
    )


def weighted_cadzow(series_values, window: int, rank: int,
                    stop1: StopRule = DEFAULT_STOP1, stop2: StopRule = DEFAULT_STOP2,
                    *, capture_series: bool = False):
    """Alternating projections under entrywise weights 1 / w_{l+k-1}, the
    weights that make the equivalent series problem equally weighted.

    The rank projection has no closed form here; it is estimated by the
    inner iterative loop (warm-started at the current iterate), whose
    non-convergence is recorded on the trace but does not stop the outer
    loop."""
    x = as_series(series_values)
    SolverConfig("weighted", window, rank, stop1=stop1, stop2=stop2).validate(x.size)
    m = matrix_weights_from_series(np.ones(x.size), window)

    def project(y):
        res = em_weighted_project(y, rank, m, init=y, stop=stop2)
        return res.matrix, res.initial_spectrum, res.iterations, res.converged

    return _alternating_solve(
        x, window, stop1, project, m, "weighted_cadzow", capture_series=capture_series
    )


def extended_cadzow(series_values, window: int, rank: int,
                    stop1: StopRule = DEFAULT_STOP1, stop2: StopRule = DEFAULT_STOP2,
                    extension: str = "recurrent", *, capture_series: bool = False):
    """Alternating projections on the series padded with L - 1 values on
    each side, the padding carrying zero weight (treated as gaps).

    Every observed point then occupies exactly L cells of the extended
    trajectory matrix, so the equivalent series weights are equal.  The
    padding values only seed the inner loop; they are filled in by the
    rank-r model as the iteration proceeds.  The returned series and the
    stop rule read the observed window only (columns L..N of the extended
    matrix)."""
    x = as_series(series_values)
    cfg = SolverConfig("extended", window, rank, extension=extension, stop1=stop1, stop2=stop2)
    cfg.validate(x.size)
    n = x.size
    pad = window - 1

    left, right = _extension_values(x, window, rank, extension)
    xt = np.concatenate([left, x, right])
    k_ext = xt.size - window + 1
    idx = _antidiagonal_index((window, k_ext))
    # observed extended positions are pad .. pad + n - 1 (0-based)
    mask = ((idx >= pad) & (idx < pad + n)).astype(float)

    def project(y):
        res = em_weighted_project(y, rank, mask, init=y, stop=stop2)
        return res.matrix, res.initial_spectrum, res.iterations, res.converged

    def extract(full_series):
        return full_series[pad : pad + n]

    return _alternating_solve(
        xt, window, stop1, project, mask, "extended_cadzow",
        zero_weight="average", extract=extract, capture_series=capture_series,
    )


def _lrr_forecast(x: np.ndarray, window: int, rank: int, steps: int) -> np.ndarray:
    """Continue a series by the min-norm linear recurrence fitted to the
    leading ``rank`` left singular vectors of its trajectory matrix."""
    idx = _antidiagonal_index((window, x.size - window + 1))
    u, _, _ = np.linalg.svd(x[idx], full_matrices=False)
    basis = u[:, :rank]
    pi = basis[-1]
    nu2 = float(pi @ pi)
    if nu2 >= 1.0 - 1e-12:
        raise DegenerateWeightsError(
            "recurrence extension is undefined: the signal subspace contains a "
            "vertical direction"
        )
    coeffs = basis[:-1] @ pi / (1.0 - nu2)  # x_n = sum_j coeffs[j] x_{n-L+1+j}
    buf = list(x[-(window - 1):])
    out = np.empty(steps)
    for i in range(steps):
        value = float(coeffs @ buf)
        out[i] = value
        buf.pop(0)
        buf.append(value)
    return out


def _extension_values(x: np.ndarray, window: int, rank: int, policy: str):
    pad = window - 1
    if policy == "zeros":
        return np.zeros(pad), np.zeros(pad)
    if policy == "constant":
        return np.full(pad, x[0]), np.full(pad, x[-1])
    if policy == "recurrent":
        try:
            right = _lrr_forecast(x, window, rank, pad)
            left = _lrr_forecast(x[::-1], window, rank, pad)[::-1]
            return left, right
        except DegenerateWeightsError:
            warnings.warn(
                "recurrence extension degenerate; falling back to constant padding",
                RuntimeWarning,
                stacklevel=2,
            )
            return np.full(pad, x[0]), np.full(pad, x[-1])
    raise ValueError(f"unknown extension policy {policy!r}")


def adjust(original, estimate) -> np.ndarray:
    """Rescale an estimate by gamma = <x, y> / <y, y> (plain Euclidean).

    The rescaled series is never farther from the original than the
    estimate, and the residual is orthogonal to it."""
    x = np.asarray(original, dtype=float)
    y = np.asarray(estimate, dtype=float)
    if x.shape != y.shape:
        raise ValueError("original and estimate must have the same length")
    denom = float(y @ y)
    if denom == 0.0:
        raise ValueError("cannot adjust an identically zero estimate")
    return (float(x @ y) / denom) * y


def solve(series_values, config: SolverConfig, *, capture_series: bool = False):
    """Run the algorithm selected by ``config`` and return
    ``(approximation, trace)``; applies the adjustment rescale when
    ``config.adjust`` is set."""
    x = as_series(series_values)
    config.validate(x.size)
    if config.algorithm == "cadzow":
        est, trace = cadzow(
            x, config.window, config.rank, config.stop1, capture_series=capture_series
        )
    elif config.algorithm == "cadzow_alpha":
        metric = alpha_metric(x.size, config.window, config.alpha)
        est, trace = oblique_cadzow(
            x, config.window, config.rank, metric, config.stop1,
            allow_degenerate_metric=config.allow_degenerate_metric,
            capture_series=capture_series,
        )
    elif config.algorithm == "cadzow_averaged":
        metric = averaged_metric(x.size, config.window)
        est, trace = oblique_cadzow(
            x, config.window, config.rank, metric, config.stop1,
            capture_series=capture_series,
        )
    elif config.algorithm == "weighted":
        est, trace = weighted_cadzow(
            x, config.window, config.rank, config.stop1, config.stop2,
            capture_series=capture_series,
        )
    elif config.algorithm == "extended":
        est, trace = extended_cadzow(
            x, config.window, config.rank, config.stop1, config.stop2, config.extension,
            capture_series=capture_series,
        )
    else:  # pragma: no cover - validate() rejects unknown algorithms
        raise ValueError(f"unknown algorithm {config.algorithm!r}")
    if config.adjust:
        est = adjust(x, est)
    return est, trace
