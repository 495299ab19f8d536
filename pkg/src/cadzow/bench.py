"""Seeded Monte Carlo harness for comparing the solvers by accuracy.

An experiment fixes a deterministic signal model, a noise model, a
replication count and a seed, plus a list of labeled solver
configurations.  Every configuration sees the same noise realizations
(paired design), drawn from counter-based per-replication substreams so
results are bitwise independent of worker count.  Reported accuracy is
the root mean-square error pooled over replications and series points,
both against the clean signal and against the observed series; the
rescaled (adjusted) variant of every estimate is accounted alongside.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .solvers import SolverConfig, adjust, solve
from .stopping import StopRule

__all__ = [
    "SignalTerm",
    "SignalModel",
    "NoiseModel",
    "sine_wave",
    "wine_sales_model",
    "generate",
    "ExperimentSpec",
    "ExperimentResult",
    "run_experiment",
    "per_point_rmse",
    "run_iteration_curves",
    "SweepResult",
    "alpha_sweep",
    "wine_model_experiment",
]


@dataclass(frozen=True)
class SignalTerm:
    """One component amplitude * base**k * sin(2*pi*frequency*k + phase);
    a pure exponential when ``frequency`` is None.  k is 1-based."""

    amplitude: float
    base: float = 1.0
    frequency: float | None = None
    phase: float = 0.0

    def values(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=float)
        envelope = self.amplitude * self.base**k
        if self.frequency is None:
            return envelope
        return envelope * np.sin(2.0 * math.pi * self.frequency * k + self.phase)

    def to_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "base": self.base,
            "frequency": self.frequency,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class SignalModel:
    """Deterministic signal: a sum of (modulated) sinusoid and exponential
    terms, hence a series of finite rank."""

    terms: tuple[SignalTerm, ...]

    def values(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        for term in self.terms:
            out += term.values(n)
        return out

    def to_dict(self) -> dict:
        return {"kind": "custom", "terms": [t.to_dict() for t in self.terms]}

    @classmethod
    def from_dict(cls, data: dict) -> "SignalModel":
        kind = data.get("kind", "custom")
        if kind == "sine":
            return sine_wave()
        if kind == "wine_sales":
            return wine_sales_model()
        if kind == "custom":
            return cls(tuple(SignalTerm(**t) for t in data["terms"]))
        raise ValueError(f"unknown signal kind {kind!r}")


def sine_wave() -> SignalModel:
    """The benchmark sine signal s_k = 5 sin(2*pi*k / 6), of rank 2."""
    return SignalModel((SignalTerm(amplitude=5.0, frequency=1.0 / 6.0),))


def wine_sales_model() -> SignalModel:
    """Rank-11 model of a monthly fortified-wine sales series: exponential
    trend plus five exponentially modulated seasonal harmonics."""
    return SignalModel(
        (
            SignalTerm(3997.74, 0.9967),
            SignalTerm(1174.75, 0.9942, 1.0 / 12.0, -2.249),
            SignalTerm(425.75, 1.0001, 1.0 / 4.0, 2.333),
            SignalTerm(211.55, 1.004, 1.0 / 6.0, 1.677),
            SignalTerm(169.33, 1.0007, 1.0 / 2.4, 1.533),
            SignalTerm(361.07, 0.9884, 1.0 / 3.0, -2.901),
        )
    )


def generate(model: SignalModel, n: int) -> np.ndarray:
    """Evaluate a signal model at k = 1..n."""
    return model.values(int(n))


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian noise scale * base**k * eps_k; plain white noise of standard
    deviation ``scale`` when ``base`` is 1.  ``scale`` 0 gives a noise-free
    experiment."""

    scale: float
    base: float = 1.0

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError(f"noise scale must be non-negative, got {self.scale}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        envelope = self.scale * self.base ** np.arange(1, n + 1, dtype=float)
        return envelope * rng.standard_normal(n)

    def to_dict(self) -> dict:
        return {"scale": self.scale, "base": self.base}

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        return cls(float(data["scale"]), float(data.get("base", 1.0)))


def _replication_rng(seed: int, rep: int) -> np.random.Generator:
    # counter-based bit generator keyed by (seed, replication): substreams
    # are independent of evaluation order and worker count
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + int(rep)))


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of a Monte Carlo comparison; identical specs with
    identical seeds give bitwise-identical results."""

    signal: SignalModel
    noise: NoiseModel
    n: int
    replications: int
    seed: int
    configs: tuple[tuple[str, SolverConfig], ...]

    def validate(self) -> None:
        if self.replications < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        labels = [label for label, _ in self.configs]
        if len(labels) != len(set(labels)):
            raise ValueError("config labels must be unique")
        if not labels:
            raise ValueError("at least one solver config is required")
        for _, cfg in self.configs:
            cfg.validate(self.n)

    def to_dict(self) -> dict:
        return {
            "kind": "monte_carlo",
            "signal": self.signal.to_dict(),
            "noise": self.noise.to_dict(),
            "n": self.n,
            "replications": self.replications,
            "seed": self.seed,
            "configs": [{"label": label, **cfg.to_dict()} for label, cfg in self.configs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        configs = []
        for entry in data["configs"]:
            entry = dict(entry)
            label = entry.pop("label")
            configs.append((label, SolverConfig.from_dict(entry)))
        return cls(
            signal=SignalModel.from_dict(data["signal"]),
            noise=NoiseModel.from_dict(data["noise"]),
            n=int(data["n"]),
            replications=int(data["replications"]),
            seed=int(data.get("seed", 0)),
            configs=tuple(configs),
        )


@dataclass
class ExperimentResult:
    """Pooled and per-replication accuracy for every configuration.

    ``per_rep[label]`` has one row per used replication with columns
    (rmse vs signal, rmse vs observed, and the same two for the adjusted
    estimate); pooled values are root mean squares over replications and
    points.  ``noise_digest`` fingerprints the shared noise streams.
    """

    spec: ExperimentSpec
    labels: tuple[str, ...]
    rmse_signal: dict[str, float]
    rmse_observed: dict[str, float]
    rmse_signal_adjusted: dict[str, float]
    rmse_observed_adjusted: dict[str, float]
    mean_iterations: dict[str, float]
    per_point_signal: dict[str, np.ndarray]
    per_rep: dict[str, np.ndarray]
    per_rep_iterations: dict[str, np.ndarray]
    replications_used: int
    failures: list[tuple[int, str, str]]
    noise_digest: str

    def summary_rows(self) -> list[dict]:
        rows = []
        for label in self.labels:
            rows.append(
                {
                    "label": label,
                    "rmse_signal": self.rmse_signal[label],
                    "rmse_observed": self.rmse_observed[label],
                    "rmse_signal_adjusted": self.rmse_signal_adjusted[label],
                    "rmse_observed_adjusted": self.rmse_observed_adjusted[label],
                    "mean_iterations": self.mean_iterations[label],
                }
            )
        return rows

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "replications_used": self.replications_used,
            "failures": [list(f) for f in self.failures],
            "noise_digest": self.noise_digest,
            "results": self.summary_rows(),
        }


def _run_replications(spec: ExperimentSpec, start: int, stop: int):
    """Evaluate replications [start, stop); returns per-replication rows or
    failure records."""
    signal = spec.signal.values(spec.n)
    n_cfg = len(spec.configs)
    out = []
    for rep in range(start, stop):
        noise = spec.noise.sample(_replication_rng(spec.seed, rep), spec.n)
        observed = signal + noise
        digest = hashlib.sha256(noise.tobytes()).digest()
        rows = np.empty((n_cfg, 4))
        iters = np.empty(n_cfg)
        points = np.empty((n_cfg, spec.n))
        failure = None
        for idx, (label, cfg) in enumerate(spec.configs):
            try:
                estimate, trace = solve(observed, cfg)
                adjusted = adjust(observed, estimate)
            except Exception as exc:  # noqa: BLE001 - failures are data here
                failure = (rep, label, f"{type(exc).__name__}: {exc}")
                break
            err_sig = estimate - signal
            err_obs = estimate - observed
            adj_sig = adjusted - signal
            adj_obs = adjusted - observed
            rows[idx] = [
                math.sqrt(float(err_sig @ err_sig) / spec.n),
                math.sqrt(float(err_obs @ err_obs) / spec.n),
                math.sqrt(float(adj_sig @ adj_sig) / spec.n),
                math.sqrt(float(adj_obs @ adj_obs) / spec.n),
            ]
            iters[idx] = trace.iterations
            points[idx] = err_sig**2
        if failure is not None:
            out.append((rep, digest, None, None, None, failure))
        else:
            out.append((rep, digest, rows, iters, points, None))
    return out


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run all replications of the experiment.

    ``workers`` > 1 distributes replications over processes; the reduction
    happens in replication order regardless, so the result is identical
    for any worker count.  A replication where any solver fails is
    excluded entirely (for every configuration, keeping the pairing) and
    reported in ``failures``.
    """
    spec.validate()
    reps = spec.replications
    if workers <= 1 or reps == 1:
        raw = _run_replications(spec, 0, reps)
    else:
        workers = min(workers, reps)
        bounds = np.linspace(0, reps, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_replications, spec, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            raw = []
            for fut in futures:
                raw.extend(fut.result())
    raw.sort(key=lambda item: item[0])

    labels = tuple(label for label, _ in spec.configs)
    n_cfg = len(labels)
    hasher = hashlib.sha256()
    kept_rows, kept_iters, kept_points = [], [], []
    failures: list[tuple[int, str, str]] = []
    for rep, digest, rows, iters, points, failure in raw:
        hasher.update(digest)
        if failure is not None:
            failures.append(failure)
            continue
        kept_rows.append(rows)
        kept_iters.append(iters)
        kept_points.append(points)

    used = len(kept_rows)
    if used == 0:
        raise RuntimeError(f"all {reps} replications failed; first failure: {failures[0]}")
    per_rep = np.stack(kept_rows)          # (used, n_cfg, 4)
    per_iters = np.stack(kept_iters)       # (used, n_cfg)
    per_points = np.stack(kept_points)     # (used, n_cfg, n)

    pooled = np.sqrt(np.mean(per_rep**2, axis=0))       # (n_cfg, 4)
    point_curves = np.sqrt(np.mean(per_points, axis=0))  # (n_cfg, n)
    mean_iters = per_iters.mean(axis=0)

    return ExperimentResult(
        spec=spec,
        labels=labels,
        rmse_signal={l: float(pooled[i, 0]) for i, l in enumerate(labels)},
        rmse_observed={l: float(pooled[i, 1]) for i, l in enumerate(labels)},
        rmse_signal_adjusted={l: float(pooled[i, 2]) for i, l in enumerate(labels)},
        rmse_observed_adjusted={l: float(pooled[i, 3]) for i, l in enumerate(labels)},
        mean_iterations={l: float(mean_iters[i]) for i, l in enumerate(labels)},
        per_point_signal={l: point_curves[i] for i, l in enumerate(labels)},
        per_rep={l: per_rep[:, i, :] for i, l in enumerate(labels)},
        per_rep_iterations={l: per_iters[:, i] for i, l in enumerate(labels)},
        replications_used=used,
        failures=failures,
        noise_digest=hasher.hexdigest(),
    )


def per_point_rmse(result: ExperimentResult) -> dict[str, np.ndarray]:
    """Per-series-index RMSE curves against the signal, one per config."""
    return dict(result.per_point_signal)


def _run_curve_replications(spec: ExperimentSpec, max_iterations: int, start: int, stop: int):
    signal = spec.signal.values(spec.n)
    cap = StopRule.max_iterations(max_iterations)
    out = []
    for rep in range(start, stop):
        noise = spec.noise.sample(_replication_rng(spec.seed, rep), spec.n)
        observed = signal + noise
        sse = np.empty((len(spec.configs), max_iterations, ))
        for idx, (_, cfg) in enumerate(spec.configs):
            run_cfg = dataclasses.replace(cfg, stop1=cap)
            _, trace = solve(observed, run_cfg, capture_series=True)
            for it, snapshot in enumerate(trace.snapshots):
                err = snapshot - signal
                sse[idx, it] = float(err @ err)
        out.append((rep, sse))
    return out


def run_iteration_curves(
    spec: ExperimentSpec, max_iterations: int, workers: int = 1
) -> dict[str, np.ndarray]:
    """RMSE against the signal after each iteration 1..max_iterations, per
    config (each config's stop rule is replaced by the iteration cap)."""
    spec.validate()
    reps = spec.replications
    if workers <= 1 or reps == 1:
        raw = _run_curve_replications(spec, max_iterations, 0, reps)
    else:
        workers = min(workers, reps)
        bounds = np.linspace(0, reps, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_curve_replications, spec, max_iterations, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            raw = []
            for fut in futures:
                raw.extend(fut.result())
    raw.sort(key=lambda item: item[0])
    total = np.sum([sse for _, sse in raw], axis=0)
    curves = np.sqrt(total / (reps * spec.n))
    return {label: curves[i] for i, (label, _) in enumerate(spec.configs)}


@dataclass
class SweepResult:
    """Accuracy and cost along a grid of metric floors alpha."""

    alphas: tuple[float, ...]
    rmse_signal: np.ndarray
    rmse_observed: np.ndarray
    mean_iterations: np.ndarray
    experiment: ExperimentResult


def alpha_sweep(
    noise_scale: float,
    alphas,
    window: int,
    *,
    n: int = 40,
    rank: int = 2,
    replications: int = 200,
    seed: int = 0,
    signal: SignalModel | None = None,
    stop1: StopRule | None = None,
    workers: int = 1,
) -> SweepResult:
    """Run the comb-metric solver over a grid of alpha values with a
    convergence stop rule, reporting accuracy and mean iteration counts."""
    signal = signal or sine_wave()
    stop1 = stop1 or StopRule.mean_square_delta(1e-8, 1000)
    alphas = tuple(float(a) for a in alphas)
    configs = tuple(
        (
            f"alpha={a:g}",
            SolverConfig("cadzow_alpha", window, rank, alpha=a, stop1=stop1),
        )
        for a in alphas
    )
    spec = ExperimentSpec(signal, NoiseModel(noise_scale), n, replications, seed, configs)
    result = run_experiment(spec, workers=workers)
    return SweepResult(
        alphas=alphas,
        rmse_signal=np.array([result.rmse_signal[l] for l, _ in configs]),
        rmse_observed=np.array([result.rmse_observed[l] for l, _ in configs]),
        mean_iterations=np.array([result.mean_iterations[l] for l, _ in configs]),
        experiment=result,
    )


WINE_ALPHAS = (1.0, 0.8, 0.6, 0.4, 0.2, 0.1, 0.05)


def wine_model_experiment(
    replications: int = 1000,
    seed: int = 0,
    alphas=WINE_ALPHAS,
    *,
    window: int = 84,
    rank: int = 11,
    stop_eps: float = 1e-4,
    workers: int = 1,
    real_series=None,
):
    """Compare comb-metric solvers on the wine-sales signal model under
    multiplicative noise.

    Returns ``(result, real_rmse)`` where ``real_rmse`` maps labels to the
    approximation error on a user-supplied real series (None when no
    series is given; the real series is never bundled)."""
    n = 168
    stop1 = StopRule.mean_square_delta(stop_eps, 1000)
    configs = tuple(
        (f"alpha={a:g}", SolverConfig("cadzow_alpha", window, rank, alpha=float(a), stop1=stop1))
        for a in alphas
    )
    spec = ExperimentSpec(
        wine_sales_model(), NoiseModel(353.17, 0.9967), n, replications, seed, configs
    )
    result = run_experiment(spec, workers=workers)
    real_rmse = None
    if real_series is not None:
        x = np.asarray(real_series, dtype=float)
        real_rmse = {}
        for label, cfg in configs:
            estimate, _ = solve(x, cfg)
            err = estimate - x
            real_rmse[label] = math.sqrt(float(err @ err) / x.size)
    return result, real_rmse


def spec_from_json(text: str) -> ExperimentSpec:
    data = json.loads(text)
    if data.get("kind", "monte_carlo") != "monte_carlo":
        raise ValueError(f"not a monte_carlo spec: kind={data.get('kind')!r}")
    return ExperimentSpec.from_dict(data)
