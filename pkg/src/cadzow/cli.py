"""Command-line front end: approximate a CSV series, emit weight profiles,
separability reports, and run benchmark specs.

Exit codes: 0 success, 2 usage or validation error, 1 internal error.
All numeric output uses the shortest round-trip decimal representation
with a ``.`` separator, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import bench, separability, weights
from .solvers import SolverConfig, solve
from .stopping import StopRule

ALGORITHM_CHOICES = {
    "cadzow": "cadzow",
    "cadzow-alpha": "cadzow_alpha",
    "cadzow-averaged": "cadzow_averaged",
    "weighted": "weighted",
    "extended": "extended",
}

SERIES_SCHEME_CHOICES = ("trapezoid", "unit", "inverse", "alpha", "averaged")
METRIC_SCHEME_CHOICES = ("alpha-metric", "averaged-metric")


def _fmt(value: float) -> str:
    # shortest round-trip decimal, locale independent
    return repr(float(value))


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_series_csv(path: str) -> np.ndarray:
    """Read a one-column numeric CSV (optional single header line)."""
    values: list[float] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if "," in text:
            raise click.UsageError(
                f"{path}:{lineno}: expected a single numeric column, got {text!r}"
            )
        try:
            values.append(float(text))
        except ValueError:
            if lineno == 1 and not values:
                continue  # header line
            raise click.UsageError(f"{path}:{lineno}: not a number: {text!r}") from None
    if len(values) < 3:
        raise click.UsageError(f"{path}: series must have at least 3 points, got {len(values)}")
    return np.array(values)


@click.group()
@click.version_option()
def main():
    """Finite-rank approximation of noisy time series."""


@main.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("-L", "--window", type=int, required=True, help="Window length (1 < L < N).")
@click.option("-r", "--rank", type=int, required=True, help="Target rank.")
@click.option(
    "-a",
    "--algorithm",
    type=click.Choice(sorted(ALGORITHM_CHOICES)),
    default="cadzow",
    show_default=True,
)
@click.option("--alpha", type=float, default=None, help="Metric floor for cadzow-alpha.")
@click.option("--eps", type=float, default=1e-8, show_default=True,
              help="Outer stop: mean-square series delta threshold.")
@click.option("--max-iter", type=int, default=1000, show_default=True,
              help="Outer stop: iteration cap.")
@click.option("--inner-eps", type=float, default=1e-4, show_default=True,
              help="Inner stop (weighted/extended): mean-square matrix delta.")
@click.option("--inner-max-iter", type=int, default=1000, show_default=True)
@click.option("--extension", type=click.Choice(("recurrent", "zeros", "constant")),
              default="recurrent", show_default=True,
              help="Padding policy for the extended algorithm.")
@click.option("--adjust", is_flag=True, help="Rescale the estimate toward the input.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Output CSV path (default: <input stem>_approx.csv).")
def approximate(input_csv, window, rank, algorithm, alpha, eps, max_iter,
                inner_eps, inner_max_iter, extension, adjust, output):
    """Approximate a series from a one-column CSV by a finite-rank series.

    Writes <output>.csv with columns index,observed,estimate and a
    <output stem>_trace.json with per-iteration diagnostics.  A run that
    hits the iteration cap still exits 0; the trace records it.
    """
    x = read_series_csv(input_csv)
    config = SolverConfig(
        algorithm=ALGORITHM_CHOICES[algorithm],
        window=window,
        rank=rank,
        alpha=alpha,
        extension=extension,
        stop1=StopRule.mean_square_delta(eps, max_iter),
        stop2=StopRule.mean_square_delta(inner_eps, inner_max_iter),
        adjust=adjust,
    )
    try:
        config.validate(x.size)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    estimate, trace = solve(x, config)

    out_path = Path(output) if output else Path(input_csv).with_name(Path(input_csv).stem + "_approx.csv")
    lines = ["index,observed,estimate"]
    for i, (obs, est) in enumerate(zip(x, estimate), start=1):
        lines.append(f"{i},{_fmt(obs)},{_fmt(est)}")
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    trace_path = out_path.with_name(out_path.stem + "_trace.json")
    payload = {"config": config.to_dict(), **trace.to_json_dict()}
    trace_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {out_path} and {trace_path}")
    if not trace.converged:
        click.echo("note: stop rule did not fire within the iteration cap (not_converged)")


@main.command("weights")
@click.option("--scheme", type=click.Choice(SERIES_SCHEME_CHOICES + METRIC_SCHEME_CHOICES),
              required=True)
@click.option("-n", "--length", "n", type=int, required=True, help="Series length N.")
@click.option("-L", "--window", type=int, required=True)
@click.option("--alpha", type=float, default=None)
@click.option("--normalize", is_flag=True, help="Rescale the profile to sum to 1.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Output CSV (default: stdout).")
def weights_cmd(scheme, n, window, alpha, normalize, output):
    """Emit a weight-scheme profile as CSV rows (index, value).

    Series schemes give the per-point weights q_i; the *-metric schemes
    give the diagonal column metric c_k of length K = N - L + 1.
    """
    try:
        if scheme in METRIC_SCHEME_CHOICES:
            if scheme == "alpha-metric":
                if alpha is None:
                    raise ValueError("scheme 'alpha-metric' requires --alpha")
                values = weights.alpha_metric(n, window, alpha)
            else:
                if alpha is not None:
                    raise ValueError("scheme 'averaged-metric' does not take --alpha")
                values = weights.averaged_metric(n, window)
        else:
            values = weights.series_weight_profile(scheme, n, window, alpha)
        if normalize:
            values = weights.normalize_weights(values)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    lines = ["i,value"]
    lines.extend(f"{i},{_fmt(v)}" for i, v in enumerate(values, start=1))
    _write_text(output, "\n".join(lines) + "\n")


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad grid {text!r}: {exc}") from exc


@main.command("separability")
@click.option("-n", "--length", "n", type=int, default=96, show_default=True)
@click.option("-L", "--window", type=int, default=None,
              help="Window length (default: N // 2).")
@click.option("--omega", type=float, default=1.0 / 6.0, show_default=True,
              help="Frequency of the synthetic cosine wave.")
@click.option("--alpha", type=float, default=1.0, show_default=True,
              help="Comb-metric floor; 1 gives the identity metric.")
@click.option("--input1", type=click.Path(exists=True, dir_okay=False), default=None,
              help="First series CSV (default: synthetic cosine wave).")
@click.option("--input2", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Second series CSV (default: constant series).")
@click.option("--sweep", type=click.Choice(("n", "alpha")), default=None,
              help="Emit a CSV sweep instead of a single JSON report.")
@click.option("--grid", type=str, default=None, help="Comma-separated sweep values.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def separability_cmd(n, window, omega, alpha, input1, input2, sweep, grid, output):
    """Report the largest lagged-vector cosines between two series.

    Without input files the canonical probe pair is used: cos(2 pi omega k)
    against a constant.  ``--sweep n`` varies the series length (window
    N // 2); ``--sweep alpha`` varies the metric floor at fixed N.
    """
    if (input1 is None) != (input2 is None):
        raise click.UsageError("--input1 and --input2 must be given together")

    def synthetic_pair(length: int):
        k = np.arange(1, length + 1)
        return np.cos(2.0 * math.pi * omega * k), np.ones(length)

    def metric_for(length: int, win: int, a: float):
        return None if a == 1.0 else weights.alpha_metric(length, win, a)

    if sweep is not None:
        if input1 is not None:
            raise click.UsageError("sweeps are only supported for the synthetic pair")
        if grid is None:
            raise click.UsageError("--sweep requires --grid")
        values = _parse_grid(grid)
        lines = [f"{sweep},rho,bound"]
        for v in values:
            if sweep == "n":
                length = int(v)
                win = length // 2
                a = alpha
            else:
                length = n
                win = window or n // 2
                a = float(v)
            x1, x2 = synthetic_pair(length)
            report = separability.weak_separability(x1, x2, win, metric_for(length, win, a))
            bound = separability.comb_correlation_bound(length, win, a, omega).bound
            lines.append(f"{_fmt(v)},{_fmt(report.rho)},{_fmt(bound)}")
        _write_text(output, "\n".join(lines) + "\n")
        return

    if input1 is not None:
        x1 = read_series_csv(input1)
        x2 = read_series_csv(input2)
        if x1.size != x2.size:
            raise click.UsageError("input series must have the same length")
        length = x1.size
    else:
        length = n
        x1, x2 = synthetic_pair(length)
    win = window or length // 2
    try:
        report = separability.weak_separability(x1, x2, win, metric_for(length, win, alpha))
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    payload = report.to_json_dict()
    if input1 is None:
        payload["bound"] = separability.comb_correlation_bound(length, win, alpha, omega).bound
    _write_text(output, json.dumps(payload, indent=2) + "\n")


def _resolve_spec(spec_arg: str) -> tuple[str, bytes]:
    path = Path(spec_arg)
    if path.exists():
        return path.stem, path.read_bytes()
    name = spec_arg if spec_arg.endswith(".json") else spec_arg + ".json"
    ref = resources.files("cadzow").joinpath("specs", name)
    if ref.is_file():
        return Path(name).stem, ref.read_bytes()
    bundled = sorted(
        p.name for p in resources.files("cadzow").joinpath("specs").iterdir()
    )
    raise click.UsageError(
        f"spec {spec_arg!r} is neither a file nor a bundled spec; bundled: {', '.join(bundled)}"
    )


@main.command("bench")
@click.argument("spec")
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
@click.option("--replications", type=int, default=None, help="Override the spec's count.")
@click.option("--seed", type=int, default=None, help="Override the spec's seed.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--per-point/--no-per-point", default=True, show_default=True,
              help="Also write per-index RMSE curves.")
def bench_cmd(spec, output_dir, replications, seed, workers, per_point):
    """Run a benchmark spec (a JSON file or a bundled spec name).

    Writes <spec>_results.csv / .json (and optionally <spec>_per_point.csv)
    into the output directory; headers carry the spec hash and seed so
    runs are attributable and reproducible.
    """
    stem, raw = _resolve_spec(spec)
    spec_hash = hashlib.sha256(raw).hexdigest()
    data = json.loads(raw.decode("utf-8"))
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    kind = data.get("kind", "monte_carlo")
    if kind == "weight_profiles":
        lines_header = [f"# spec_sha256={spec_hash}"]
        n = int(data["n"])
        window = int(data["window"])
        normalize = bool(data.get("normalize", False))
        columns = []
        for profile in data["profiles"]:
            values = weights.series_weight_profile(
                profile["scheme"], n, window, profile.get("alpha")
            )
            if normalize:
                values = weights.normalize_weights(values)
            columns.append((profile["label"], values))
        lines = lines_header + ["i," + ",".join(label for label, _ in columns)]
        for i in range(n):
            lines.append(f"{i + 1}," + ",".join(_fmt(vals[i]) for _, vals in columns))
        out = out_dir / f"{stem}_weights.csv"
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        click.echo(f"wrote {out}")
        return

    try:
        experiment = bench.ExperimentSpec.from_dict(data)
    except (KeyError, ValueError) as exc:
        raise click.UsageError(f"bad spec {spec!r}: {exc}") from exc
    if replications is not None:
        experiment = dataclasses.replace(experiment, replications=replications)
    if seed is not None:
        experiment = dataclasses.replace(experiment, seed=seed)
    try:
        experiment.validate()
    except ValueError as exc:
        raise click.UsageError(f"bad spec {spec!r}: {exc}") from exc

    result = bench.run_experiment(experiment, workers=workers)

    header = [
        f"# spec_sha256={spec_hash}",
        f"# seed={experiment.seed}",
        f"# replications={experiment.replications}",
        f"# replications_used={result.replications_used}",
        f"# noise_digest={result.noise_digest}",
    ]
    columns = (
        "label",
        "rmse_signal",
        "rmse_observed",
        "rmse_signal_adjusted",
        "rmse_observed_adjusted",
        "mean_iterations",
    )
    lines = header + [",".join(columns)]
    for row in result.summary_rows():
        lines.append(
            ",".join([row["label"]] + [_fmt(row[c]) for c in columns[1:]])
        )
    csv_path = out_dir / f"{stem}_results.csv"
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    json_path = out_dir / f"{stem}_results.json"
    payload = {"spec_sha256": spec_hash, **result.to_json_dict()}
    json_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    written = [csv_path, json_path]

    if per_point:
        pp = bench.per_point_rmse(result)
        lines = header + ["i," + ",".join(result.labels)]
        for i in range(experiment.n):
            lines.append(f"{i + 1}," + ",".join(_fmt(pp[label][i]) for label in result.labels))
        pp_path = out_dir / f"{stem}_per_point.csv"
        pp_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(pp_path)
    click.echo("wrote " + ", ".join(str(p) for p in written))


if __name__ == "__main__":
    main(prog_name="cadzow")
