import csv
import math

import mpmath as mp
import numpy as np
import pytest

from kerf.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    TARGETS,
    depth_for,
    exponent_table,
    generate_dataset,
    load_config,
    rate_exponents,
    run_experiment,
    summarize_rows,
    write_experiment_csv,
)

mp.mp.dps = 50


def depth_oracle(variant, rule, n, d):
    """Depth formulas evaluated at 50 significant digits."""
    n = mp.mpf(n)
    if rule == "interpolation":
        return int(mp.ceil(mp.log(n, 2)))
    if rule == "scornet":
        v = mp.log(n / mp.log(n) ** 2) / (mp.log(2) + mp.mpf(3) / d)
    else:
        shrink = mp.mpf(1) / (2 * d) if variant == "centered" else mp.mpf(1) / (3 * d)
        a = 1 / mp.log(n)
        c = (a - 1) / (2 * mp.log(1 - shrink, 2) - (1 - a))
        v = c * mp.log(n / mp.log(n) ** (a / (1 - a)), 2)
    return max(int(mp.ceil(v)), 1)


def exponents_oracle(d):
    log2 = mp.log(2)
    return {
        "centered_previous": 1 / (d * log2 + 3),
        "centered_new": 1 / (1 + d * log2),
        "uniform_previous": 2 / (3 * d * log2 + 6),
        "uniform_new": 2 / (3 * d * log2 + 2),
        "minimax": mp.mpf(2) / (d + 2),
    }


# ---------------------------------------------------------------------------
# depth rules
# ---------------------------------------------------------------------------

def test_depth_snapshots():
    # frozen from the high-precision oracle
    assert depth_for("centered", "improved", 10_000, 2) == 7
    assert depth_for("centered", "scornet", 10_000, 2) == 3
    assert depth_for("centered", "improved", 500, 2) == 5
    assert depth_for("centered", "improved", 5000, 2) == 7
    assert depth_for("uniform", "improved", 10_000, 2) == 9
    assert depth_for("centered", "interpolation", 1000, 2) == 10


@pytest.mark.parametrize("variant", ["centered", "uniform"])
@pytest.mark.parametrize("rule", ["scornet", "improved", "interpolation"])
def test_depth_matches_high_precision_oracle(variant, rule):
    for d in (1, 2, 5, 10):
        for n in (10, 100, 1000, 10_000, 250_000):
            assert depth_for(variant, rule, n, d) == depth_oracle(variant, rule, n, d)


def test_depth_is_positive_and_monotone_in_n():
    grid = [10, 30, 100, 300, 1000, 3000, 10_000, 100_000]
    for variant in ("centered", "uniform"):
        for rule in ("scornet", "improved", "interpolation"):
            for d in range(1, 21):
                ks = [depth_for(variant, rule, n, d) for n in grid]
                assert all(k >= 1 for k in ks)
                assert all(a <= b for a, b in zip(ks, ks[1:]))


def test_improved_rule_grows_deeper_than_scornet():
    for d in range(1, 11):
        for n in (1000, 5000, 10_000, 100_000):
            for variant in ("centered", "uniform"):
                assert depth_for(variant, "improved", n, d) > depth_for(
                    variant, "scornet", n, d
                )


def test_depth_rejects_tiny_n():
    with pytest.raises(ValueError):
        depth_for("centered", "improved", 2, 2)
    with pytest.raises(ValueError):
        depth_for("centered", "badrule", 100, 2)


# ---------------------------------------------------------------------------
# rate exponents
# ---------------------------------------------------------------------------

def test_exponent_value_centered_new_d1():
    assert rate_exponents(1)["centered_new"] == pytest.approx(
        1.0 / (1.0 + math.log(2.0)), abs=1e-15
    )
    assert rate_exponents(1)["centered_new"] == pytest.approx(0.59061, abs=1e-5)


def test_exponents_match_high_precision_oracle():
    for d in range(1, 51):
        got = rate_exponents(d)
        want = exponents_oracle(d)
        for key, value in want.items():
            assert abs(got[key] - float(value)) < 1e-12


def test_exponent_ordering_minimax_new_previous():
    for d in range(1, 51):
        ex = rate_exponents(d)
        assert ex["minimax"] >= ex["centered_new"] > ex["centered_previous"]
        assert ex["minimax"] >= ex["uniform_new"] > ex["uniform_previous"]


def test_uniform_new_exponent_vanishes_in_high_dim():
    assert rate_exponents(10**6)["uniform_new"] < 1e-5


def test_exponent_table_rows():
    rows = exponent_table("centered", [1, 2, 3])
    assert [r["d"] for r in rows] == [1, 2, 3]
    assert all(r["new"] > r["previous"] for r in rows)
    assert all(r["minimax"] >= r["new"] for r in rows)


# ---------------------------------------------------------------------------
# dataset generation
# ---------------------------------------------------------------------------

def test_target_values():
    f1 = TARGETS["f1"][0]
    assert f1(np.zeros((1, 2)))[0] == 1.0  # 0 + e^0
    f2 = TARGETS["f2"][0]
    assert f2(np.zeros((1, 3)))[0] == 0.5


def test_generate_dataset_deterministic():
    X1, y1 = generate_dataset("f1", 2, 100, 0.5, seed=42)
    X2, y2 = generate_dataset("f1", 2, 100, 0.5, seed=42)
    np.testing.assert_array_equal(X1, X2)
    np.testing.assert_array_equal(y1, y2)
    X3, _ = generate_dataset("f1", 2, 100, 0.5, seed=43)
    assert not np.array_equal(X1, X3)


def test_generate_dataset_noise_mean():
    X, y = generate_dataset("f1", 2, 100_000, 0.5, seed=0)
    noise = y - TARGETS["f1"][0](X)
    assert abs(noise.mean()) < 0.01


def test_generate_dataset_noiseless():
    X, y = generate_dataset("f2", 3, 50, 0.0, seed=1)
    np.testing.assert_array_equal(y, TARGETS["f2"][0](X))


def test_generate_dataset_arity_check():
    with pytest.raises(ValueError):
        generate_dataset("f2", 2, 10, 0.5, seed=0)
    with pytest.raises(ValueError):
        generate_dataset("f9", 2, 10, 0.5, seed=0)


# ---------------------------------------------------------------------------
# harness
# ---------------------------------------------------------------------------

def _config(tmp_path, **kw):
    defaults = dict(
        function="const",
        variant="centered",
        dim=2,
        sigma=0.0,
        n_values=(40, 80),
        rules=("scornet", "improved"),
        seeds=(0,),
        output=str(tmp_path / "out.csv"),
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def test_noiseless_constant_target_has_zero_error(tmp_path):
    rows = run_experiment(_config(tmp_path))
    assert len(rows) == 4  # 2 n-values x 2 rules x 1 seed
    assert all(r["l2_error"] == 0.0 for r in rows)


def test_rows_sorted_and_rerun_identical(tmp_path):
    config = _config(tmp_path, function="f1", sigma=0.5, seeds=(0, 1))
    rows1 = run_experiment(config)
    rows2 = run_experiment(config)
    assert rows1 == rows2
    keys = [(r["variant"], r["rule"], r["n"], r["seed"]) for r in rows1]
    assert keys == sorted(keys)


def test_csv_roundtrip_and_header(tmp_path):
    config = _config(tmp_path, function="f1", sigma=0.5)
    rows = run_experiment(config)
    write_experiment_csv(rows, config.output)
    with open(config.output, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = list(reader)
    assert tuple(header) == CSV_HEADER
    assert len(data) == len(rows)
    assert all(row[6] == "0.0" for row in data)  # timings off by default
    assert float(data[0][5]) == rows[0]["l2_error"]


def test_summary_medians(tmp_path):
    config = _config(tmp_path, function="f1", sigma=0.5, seeds=(0, 1, 2), n_values=(40,))
    rows = run_experiment(config)
    summary = summarize_rows(rows)
    for cell in summary["cells"]:
        errs = [
            r["l2_error"]
            for r in rows
            if (r["rule"], r["n"]) == (cell["rule"], cell["n"])
        ]
        assert cell["median_l2"] == float(np.median(errs))
        assert cell["n_seeds"] == 3


def test_load_config(tmp_path):
    path = tmp_path / "bench.cfg"
    path.write_text(
        "# benchmark\n"
        "function = f1\n"
        "variant = uniform\n"
        "dim = 2\n"
        "sigma = 0.25\n"
        "n_values = 100, 200\n"
        "rules = scornet, improved\n"
        "seeds = 0, 1, 2\n"
        "train_fraction = 0.75\n"
        "output = results.csv\n"
        "timings = off\n"
    )
    config = load_config(path)
    assert config.variant == "uniform"
    assert config.n_values == (100, 200)
    assert config.rules == ("scornet", "improved")
    assert config.seeds == (0, 1, 2)
    assert config.train_fraction == 0.75
    assert config.timings is False


def test_load_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("bogus = 1\n")
    with pytest.raises(ValueError):
        load_config(path)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(train_fraction=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(seeds=())
    with pytest.raises(ValueError):
        ExperimentConfig(rules=("cart",))
