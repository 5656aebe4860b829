"""Command-line front door.

Subcommands: ``kernel`` (evaluate a proximity kernel), ``fit`` / ``predict``
(model JSON round trip), ``experiment`` (benchmark harness), ``spectrum``
(exact spectral report), ``depth`` (depth-rule lookup) and ``exponents``
(rate-exponent CSV for the figure pipeline).

Conventions: all diagnostics go to stderr and the exit code is nonzero on
any error; data goes to stdout or the named output file.  Seeded runs are
byte-reproducible in their data outputs.
"""

from __future__ import annotations

import csv
import json
import sys

import click
import numpy as np

from . import experiments, spectral
from .estimators import KerfRegressor, load_model, save_model
from .kernels import centered_kernel, uniform_kernel

_VARIANT = click.Choice(["centered", "uniform"])
_RULE = click.Choice(list(experiments.RULES))


def _parse_point(text, dim):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise click.ClickException(f"could not parse point {text!r}: {exc}") from exc
    if len(values) != dim:
        raise click.ClickException(
            f"point {text!r} has {len(values)} coordinates, expected {dim}"
        )
    return np.asarray(values)


@click.group()
def main():
    """Kernel random forests: estimation, simulation and spectral analysis."""


@main.command()
@click.option("--variant", type=_VARIANT, required=True)
@click.option("-k", "--depth", type=int, required=True, help="Tree depth.")
@click.option("-d", "--dim", type=int, required=True, help="Feature dimension.")
@click.option("--x", "x_text", required=True, help="Comma-separated coordinates.")
@click.option("--z", "z_text", default=None, help="Second point (uniform: defaults to the origin).")
@click.option("--exact", is_flag=True, help="Print the exact rational value (centered only).")
def kernel(variant, depth, dim, x_text, z_text, exact):
    """Evaluate the closed-form proximity kernel at a pair of points."""
    x = _parse_point(x_text, dim)
    try:
        if variant == "centered":
            if z_text is None:
                raise click.ClickException("the centered kernel needs --z")
            z = _parse_point(z_text, dim)
            value = centered_kernel(x, z, depth, exact=exact)
        else:
            if exact:
                raise click.ClickException(
                    "--exact is only available for the centered kernel "
                    "(the uniform factors are transcendental)"
                )
            z = _parse_point(z_text, dim) if z_text is not None else np.zeros(dim)
            value = uniform_kernel(np.abs(x - z), depth)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(str(value) if exact else repr(float(value)))


@main.command()
@click.option("--train", "train_path", required=True, type=click.Path(exists=True),
              help="CSV with a header; last column is the response.")
@click.option("--variant", type=_VARIANT, default="centered", show_default=True)
@click.option("-k", "--depth", type=int, default=None, help="Tree depth (overrides --rule).")
@click.option("--rule", type=_RULE, default="improved", show_default=True,
              help="Depth rule applied to the training size when -k is absent.")
@click.option("--out", "out_path", required=True, type=click.Path())
def fit(train_path, variant, depth, rule, out_path):
    """Fit a KeRF model and write it as versioned JSON."""
    X, y = _read_training_csv(train_path)
    try:
        model = KerfRegressor(variant=variant, depth=depth, depth_rule=rule)
        model.fit(X, y)
        save_model(model, out_path)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {out_path} (n={X.shape[0]}, d={X.shape[1]}, k={model.depth_})", err=True)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--queries", "queries_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def predict(model_path, queries_path, out_path):
    """Predict at query points; echoes the query columns plus `prediction`."""
    try:
        model = load_model(model_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"could not load model {model_path}: {exc}") from exc
    header, Q = _read_feature_csv(queries_path)
    try:
        preds = model.predict(Q)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header) + ["prediction"])
        for row, p in zip(Q, preds):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(p))])


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Override the config's output CSV path.")
@click.option("--summary", "summary_path", default=None, type=click.Path(),
              help="Override the summary JSON path (default: <out>.summary.json).")
def experiment(config_path, out_path, summary_path):
    """Run the L2-error benchmark grid described by a config file."""
    try:
        config = experiments.load_config(config_path)
        rows = experiments.run_experiment(config)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    out = out_path or config.output
    summary = summary_path or config.summary or out + ".summary.json"
    experiments.write_experiment_csv(rows, out)
    experiments.write_summary_json(rows, summary)
    click.echo(f"wrote {len(rows)} rows to {out}; summary in {summary}", err=True)


@main.command()
@click.option("-k", "--depth", type=int, required=True)
@click.option("-d", "--dim", type=int, required=True)
@click.option("--report", "report_path", default=None, type=click.Path(),
              help="Write the JSON report here instead of stdout.")
def spectrum(depth, dim, report_path):
    """Exact spectral report of the centered kernel on the bit-matrix group."""
    try:
        dimension = spectral.rkhs_dimension(depth, dim)
        mu = spectral.spectral_measure(depth, dim)
        mu_total = sum(mu.values())
        positive = all(v > 0 for v in mu.values())
        bits = depth * dim
        if bits and bits <= spectral._MAX_DENSE_BITS:
            checked = spectral.inverse_transform(spectral.phi_table(depth, dim))
            positive = positive and all(v >= 0 for v in checked)
        histogram: dict = {}
        for value in mu.values():
            histogram[str(value)] = histogram.get(str(value), 0) + 1
        report = {
            "depth": depth,
            "dim": dim,
            "dimension": dimension,
            "support_size": len(mu),
            "mu_total": str(mu_total),
            "mu_histogram": dict(sorted(histogram.items())),
            "bochner_positive": bool(positive),
            "asymptotic_ratio": spectral.dimension_ratio(depth, dim) if depth >= 1 else None,
            "multiplier_obstruction": spectral.multiplier_check(depth, dim),
        }
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    text = json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
    if report_path:
        with open(report_path, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {report_path}", err=True)
    else:
        sys.stdout.write(text)


@main.command()
@click.option("--variant", type=_VARIANT, required=True)
@click.option("--rule", type=_RULE, required=True)
@click.option("-n", "n", type=int, required=True)
@click.option("-d", "--dim", type=int, required=True)
def depth(variant, rule, n, dim):
    """Print the tree depth prescribed by a depth-selection rule."""
    try:
        click.echo(str(experiments.depth_for(variant, rule, n, dim)))
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.option("--variant", type=_VARIANT, required=True)
@click.option("--d-max", type=int, default=10, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Output CSV (default stdout).")
def exponents(variant, d_max, out_path):
    """Rate-exponent table (previous/new/minimax) over dimensions 1..d-max."""
    if d_max < 1:
        raise click.ClickException(f"--d-max must be >= 1, got {d_max}")
    rows = experiments.exponent_table(variant, range(1, d_max + 1))
    fh = open(out_path, "w", newline="") if out_path else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(experiments.EXPONENT_HEADER)
        for r in rows:
            writer.writerow(
                [r["variant"], r["d"], repr(r["previous"]), repr(r["new"]), repr(r["minimax"])]
            )
    finally:
        if out_path:
            fh.close()


def _read_training_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise click.ClickException(f"{path} is empty") from None
        rows = list(reader)
    if len(header) < 2:
        raise click.ClickException(f"{path}: need at least one feature column plus a response")
    if not rows:
        raise click.ClickException(f"{path}: no data rows")
    try:
        data = np.asarray([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise click.ClickException(f"{path}: non-numeric cell: {exc}") from exc
    if data.shape[1] != len(header):
        raise click.ClickException(f"{path}: ragged rows")
    return data[:, :-1], data[:, -1]


def _read_feature_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise click.ClickException(f"{path} is empty") from None
        rows = list(reader)
    if not rows:
        raise click.ClickException(f"{path}: no data rows")
    try:
        data = np.asarray([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise click.ClickException(f"{path}: non-numeric cell: {exc}") from exc
    if data.shape[1] != len(header):
        raise click.ClickException(f"{path}: ragged rows")
    return header, data
