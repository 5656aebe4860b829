"""Depth-selection rules, rate-exponent tables, and the benchmark harness.

The depth rules map a sample size ``n`` (and dimension ``d``) to the tree
depth ``k`` used by the estimators:

* ``scornet``        — k = ceil( log(n / log(n)^2) / (log 2 + 3/d) ), the
  classical choice for both forest variants;
* ``improved``       — the deeper schedule attaining the better rate,
  k = ceil( c(d) * log2(n / log(n)^e) ) with a = 1/log n, e = a/(1-a) and
  c(d) = (a - 1) / (2 log2(1 - 1/(2d)) - (1 - a)); uniform forests replace
  1/(2d) by 1/(3d);
* ``interpolation``  — k = ceil(log2 n), the full-interpolation depth.  The
  exact schedule behind the third benchmark curve is not published; this
  stand-in is configurable and clearly an assumption.

``log`` is natural throughout and ``log2`` is explicit, matching the rate
statements the rules come from.

The harness generates synthetic regressions (uniform features on [0, 1]^d,
Gaussian noise), splits train/test, fits a KeRF per (n, rule, seed) cell and
records the test L2 error as CSV plus a JSON summary of per-cell medians.
Seeded runs are byte-reproducible; wall-clock timings are therefore written
as 0 unless ``timings`` is switched on explicitly.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from ._validation import check_dim
from .estimators import KerfRegressor, l2_error
from .forest import VARIANTS

__all__ = [
    "RULES",
    "TARGETS",
    "depth_for",
    "rate_exponents",
    "exponent_table",
    "generate_dataset",
    "ExperimentConfig",
    "load_config",
    "run_experiment",
    "write_experiment_csv",
    "summarize_rows",
]

RULES = ("scornet", "improved", "interpolation")

CSV_HEADER = ("variant", "rule", "n", "k", "seed", "l2_error", "wall_time_ms")

EXPONENT_HEADER = ("variant", "d", "previous", "new", "minimax")


def depth_for(variant, rule, n, dim) -> int:
    """Tree depth prescribed by ``rule`` for ``n`` samples in dimension ``dim``.

    The ceiling of the rule's expression, floored at 1.  Requires ``n >= 3``
    (the improved rule divides by ``1 - 1/log n``).
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}, got {rule!r}")
    dim = check_dim(dim)
    n = int(n)
    if n < 3:
        raise ValueError(f"depth rules need n >= 3, got {n}")
    if rule == "interpolation":
        k = math.ceil(math.log2(n))
    elif rule == "scornet":
        ln = math.log(n)
        k = math.ceil(math.log(n / ln**2) / (math.log(2.0) + 3.0 / dim))
    else:
        shrink = 1.0 / (2.0 * dim) if variant == "centered" else 1.0 / (3.0 * dim)
        a = 1.0 / math.log(n)
        c = (a - 1.0) / (2.0 * math.log2(1.0 - shrink) - (1.0 - a))
        k = math.ceil(c * math.log2(n / math.log(n) ** (a / (1.0 - a))))
    return max(int(k), 1)


def rate_exponents(dim) -> dict:
    """The five rate exponents at dimension ``dim``.

    ``n^(-exponent)`` up to log factors: the previous and the improved rates
    for each variant, and the minimax rate over Lipschitz functions.
    """
    d = check_dim(dim)
    log2 = math.log(2.0)
    return {
        "centered_previous": 1.0 / (d * log2 + 3.0),
        "centered_new": 1.0 / (1.0 + d * log2),
        "uniform_previous": 2.0 / (3.0 * d * log2 + 6.0),
        "uniform_new": 2.0 / (3.0 * d * log2 + 2.0),
        "minimax": 2.0 / (d + 2.0),
    }


def exponent_table(variant, dims) -> list:
    """Rows (dicts keyed by EXPONENT_HEADER) for the exponent-curves figure."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    rows = []
    for d in dims:
        ex = rate_exponents(d)
        rows.append(
            {
                "variant": variant,
                "d": int(d),
                "previous": ex[f"{variant}_previous"],
                "new": ex[f"{variant}_new"],
                "minimax": ex["minimax"],
            }
        )
    return rows


def _f1(X):
    return X[:, 0] ** 2 + np.exp(-X[:, 1] ** 2)


def _f2(X):
    return X[:, 0] ** 2 + 1.0 / (np.exp(X[:, 1] ** 2) + np.exp(X[:, 2] ** 2))


def _const(X):
    return np.ones(X.shape[0])


# target -> (callable on an (n, d) array, minimum dimension)
TARGETS = {"f1": (_f1, 2), "f2": (_f2, 3), "const": (_const, 0)}


def generate_dataset(function_id, dim, n, sigma, seed):
    """Sample ``n`` i.i.d. points: X uniform on [0, 1]^dim, y = f(X) + noise.

    ``sigma`` is the standard deviation of the centered Gaussian noise.
    Deterministic per ``seed``.
    """
    if function_id not in TARGETS:
        raise ValueError(f"unknown target {function_id!r}; choose from {sorted(TARGETS)}")
    fn, arity = TARGETS[function_id]
    dim = check_dim(dim)
    if dim < arity:
        raise ValueError(f"target {function_id!r} needs dim >= {arity}, got {dim}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(int(seed))
    X = rng.random((int(n), dim))
    y = fn(X) + rng.normal(0.0, 1.0, int(n)) * sigma
    return X, y


@dataclass
class ExperimentConfig:
    """One benchmark run: a grid of (n, rule, seed) cells for a fixed target."""

    function: str = "f1"
    variant: str = "centered"
    dim: int = 2
    sigma: float = 0.5
    n_values: tuple = (500, 1000)
    rules: tuple = ("scornet", "improved")
    seeds: tuple = (0,)
    train_fraction: float = 0.8
    output: str = "experiment.csv"
    summary: str | None = None
    timings: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        for rule in self.rules:
            if rule not in RULES:
                raise ValueError(f"rule must be one of {RULES}, got {rule!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")
        if len(self.seeds) < 1:
            raise ValueError("need at least one seed")
        self.n_values = tuple(int(v) for v in self.n_values)
        self.rules = tuple(self.rules)
        self.seeds = tuple(int(s) for s in self.seeds)


_LIST_KEYS = {"n_values", "rules", "seeds"}
_INT_KEYS = {"dim"}
_FLOAT_KEYS = {"sigma", "train_fraction"}
_BOOL_KEYS = {"timings"}


def load_config(path) -> ExperimentConfig:
    """Parse a flat ``key = value`` config file (comma lists, # comments)."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in ExperimentConfig.__dataclass_fields__:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in _LIST_KEYS:
                items = [v.strip() for v in val.split(",") if v.strip()]
                values[key] = tuple(int(v) for v in items) if key != "rules" else tuple(items)
            elif key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key in _BOOL_KEYS:
                values[key] = val.lower() in ("1", "true", "on", "yes")
            else:
                values[key] = val
    return ExperimentConfig(**values)


def run_experiment(config: ExperimentConfig) -> list:
    """Run every (n, rule, seed) cell; returns rows sorted deterministically.

    Each cell draws the dataset for (n, seed), splits off the leading
    ``train_fraction`` rows (the draw is i.i.d., so the split is exchangeable),
    fits the configured KeRF at the rule's depth for the full ``n``, and
    scores the mean squared test error.
    """
    rows = []
    for n in config.n_values:
        for seed in config.seeds:
            X, y = generate_dataset(config.function, config.dim, n, config.sigma, seed)
            n_train = int(round(n * config.train_fraction))
            n_train = min(max(n_train, 1), n - 1)
            X_train, y_train = X[:n_train], y[:n_train]
            X_test, y_test = X[n_train:], y[n_train:]
            for rule in config.rules:
                k = depth_for(config.variant, rule, n, config.dim)
                start = time.perf_counter()
                model = KerfRegressor(variant=config.variant, depth=k)
                model.fit(X_train, y_train)
                err = l2_error(model, X_test, y_test)
                wall_ms = (time.perf_counter() - start) * 1000.0
                rows.append(
                    {
                        "variant": config.variant,
                        "rule": rule,
                        "n": int(n),
                        "k": int(k),
                        "seed": int(seed),
                        "l2_error": err,
                        "wall_time_ms": wall_ms if config.timings else 0.0,
                    }
                )
    rows.sort(key=lambda r: (r["variant"], r["rule"], r["n"], r["seed"]))
    return rows


def write_experiment_csv(rows, path) -> None:
    """Write harness rows with the fixed header; floats via repr for exactness."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r["variant"],
                    r["rule"],
                    r["n"],
                    r["k"],
                    r["seed"],
                    repr(float(r["l2_error"])),
                    repr(float(r["wall_time_ms"])),
                ]
            )


def summarize_rows(rows) -> dict:
    """Per-cell medians over seeds, keyed deterministically."""
    cells: dict = {}
    for r in rows:
        cells.setdefault((r["variant"], r["rule"], r["n"], r["k"]), []).append(r["l2_error"])
    summary = [
        {
            "variant": variant,
            "rule": rule,
            "n": n,
            "k": k,
            "median_l2": float(np.median(errs)),
            "n_seeds": len(errs),
        }
        for (variant, rule, n, k), errs in sorted(cells.items())
    ]
    return {"cells": summary}


def write_summary_json(rows, path) -> None:
    with open(path, "w") as fh:
        json.dump(summarize_rows(rows), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
