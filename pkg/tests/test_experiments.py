import csv

import numpy as np
import pytest
import yaml

from clustercache import cli
from clustercache.experiments import (
    DEFAULT_CONFIG,
    ExperimentSpec,
    load_config,
    merge_config,
    run_pipeline,
    spec_from_config,
    sweep,
)


def small_config(**experiment):
    cfg = merge_config(
        DEFAULT_CONFIG,
        {
            "network": {
                "user_density": 2.0,
                "catalog_size": 60,
                "search_range": [2, 6],
            },
            "scenario": {"cluster_count": 3, "subset_size": 8},
            "experiment": {
                "n_users": 90,
                "n_trials": 40,
                "sweep_values": [0.4, 0.6],
                **experiment,
            },
        },
    )
    return cfg


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_merge_config_precedence():
    merged = merge_config({"a": {"b": 1, "c": 2}, "d": 3}, {"a": {"b": 9}}, {"d": 7})
    assert merged == {"a": {"b": 9, "c": 2}, "d": 7}


def test_spec_validation():
    cfg = small_config(sweep_values=[0.6, 0.4])
    with pytest.raises(ValueError):
        spec_from_config(cfg)
    with pytest.raises(ValueError):
        spec_from_config(small_config(schemes="nope"))
    with pytest.raises(ValueError):
        spec_from_config(small_config(n_trials=0))
    with pytest.raises(ValueError):
        spec_from_config(small_config(sweep_variable="bandwidth"))


def test_default_config_resolves():
    spec = spec_from_config(DEFAULT_CONFIG)
    assert spec.network.catalog_size == 100
    assert spec.scenario.membership.size == spec.n_users
    assert spec.sweep_variable == "radius"


def test_pipeline_writes_four_artifacts(tmp_path):
    spec = spec_from_config(small_config())
    result = run_pipeline(spec, tmp_path)
    for name in ("aic_trace", "clusters", "allocation", "hits"):
        assert (tmp_path / f"{name}.csv").exists(), name
    hits = read_csv(tmp_path / "hits.csv")
    assert hits[0] == ["R", "lambda_s", "M", "scheme", "analytic", "mc_estimate",
                       "mc_halfwidth", "n_trials", "overlap_warning"]
    # both schemes at both sweep points
    assert len(hits) == 1 + 2 * 2
    alloc = read_csv(tmp_path / "allocation.csv")
    assert alloc[0] == ["R", "lambda_s", "M", "cluster_id", "psi", "fraction", "method"]
    assert result.model.cluster_count == int(alloc[-1][3]) + 1


def test_pipeline_deterministic_bytes(tmp_path):
    spec = spec_from_config(small_config())
    run_pipeline(spec, tmp_path / "a")
    run_pipeline(spec, tmp_path / "b")
    for name in ("aic_trace", "clusters", "allocation", "hits"):
        assert (tmp_path / "a" / f"{name}.csv").read_bytes() == (
            tmp_path / "b" / f"{name}.csv"
        ).read_bytes(), name


def test_single_sweep_value_matches_pipeline(tmp_path):
    cfg = small_config(sweep_values=[0.5])
    spec = spec_from_config(cfg)
    _, _, _, rows, _ = sweep(spec)
    result = run_pipeline(spec, tmp_path)
    assert len(rows) == len(result.hit_rows)
    for (ra, la, ma, sa, rep_a), (rb, lb, mb, sb, rep_b) in zip(rows, result.hit_rows):
        assert (ra, la, ma, sa) == (rb, lb, mb, sb)
        assert rep_a.mc_estimate == rep_b.mc_estimate


def test_radius_sweep_clustered_dominates(tmp_path):
    spec = spec_from_config(small_config(sweep_values=[0.4, 0.6, 0.8], n_trials=30))
    result = run_pipeline(spec, tmp_path)
    by_scheme = {}
    for radius, lam, m, scheme, rep in result.hit_rows:
        by_scheme.setdefault(scheme, []).append(rep.analytic)
    assert all(c >= b for c, b in zip(by_scheme["clustered"], by_scheme["baseline"]))


def test_cache_sweep_monotone(tmp_path):
    cfg = small_config(sweep_variable="cache_size", sweep_values=[2, 8, 30, 60],
                       n_trials=25)
    spec = spec_from_config(cfg)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = run_pipeline(spec, tmp_path)
    clustered = [r.analytic for *_, s, r in result.hit_rows if s == "clustered"]
    baseline = [r.analytic for *_, s, r in result.hit_rows if s == "baseline"]
    assert all(b >= a - 1e-12 for a, b in zip(clustered, clustered[1:]))
    assert all(b >= a - 1e-12 for a, b in zip(baseline, baseline[1:]))
    a = spec.network.sbs_density * np.pi * spec.network.radius ** 2
    assert abs(baseline[-1] - (1.0 - np.exp(-a))) < 1e-12


def test_uniform_fractions_switch(tmp_path):
    spec = spec_from_config(small_config(uniform_fractions=True, sweep_values=[0.5]))
    result = run_pipeline(spec, tmp_path)
    alloc = read_csv(tmp_path / "allocation.csv")[1:]
    fractions = np.array([float(r[5]) for r in alloc])
    assert np.allclose(fractions, 1.0 / len(fractions))
    assert {r[6] for r in alloc} == {"uniform"}


def test_load_config_rejects_non_mapping(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ValueError):
        load_config(path)
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config(empty) == {}


# -------------------------------------------------------------------- CLI

def cli_args(tmp_path, *extra):
    return ["--out-dir", str(tmp_path), "--seed", "5",
            "--n-users", "80", "--catalog-size", "60", "--user-density", "2.0",
            "--search-range", "2", "6", "--n-trials", "25", *extra]


def test_cli_full_chain(tmp_path, capsys):
    assert cli.main(["generate", *cli_args(tmp_path)]) == 0
    assert (tmp_path / "profiles.csv").exists()
    assert (tmp_path / "membership.csv").exists()
    assert cli.main(["cluster", *cli_args(tmp_path)]) == 0
    assert (tmp_path / "clusters.csv").exists()
    assert (tmp_path / "centroids.csv").exists()
    assert (tmp_path / "aic_trace.csv").exists()
    assert cli.main(["allocate", *cli_args(tmp_path)]) == 0
    assert (tmp_path / "allocation.csv").exists()
    assert cli.main(["evaluate", *cli_args(tmp_path)]) == 0
    rows = read_csv(tmp_path / "hits.csv")
    assert rows[0][0] == "R" and len(rows) == 3
    out = capsys.readouterr().out
    assert "clustered" in out and "baseline" in out


def test_cli_sweep_and_print_config(tmp_path, capsys):
    assert cli.main(["sweep", *cli_args(tmp_path / "run", "--sweep-values", "0.4", "0.6")]) == 0
    assert (tmp_path / "run" / "hits.csv").exists()
    capsys.readouterr()
    assert cli.main(["sweep", "--print-config", "--radius", "0.77"]) == 0
    dumped = yaml.safe_load(capsys.readouterr().out)
    assert dumped["network"]["radius"] == 0.77
    assert dumped["experiment"]["seed"] == DEFAULT_CONFIG["experiment"]["seed"]


def test_cli_config_file_and_flag_precedence(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text(yaml.safe_dump({"network": {"radius": 0.9, "sbs_density": 4.0}}))
    assert cli.main(["sweep", "--config", str(cfg_path), "--radius", "0.3",
                     "--print-config"]) == 0
    dumped = yaml.safe_load(capsys.readouterr().out)
    assert dumped["network"]["radius"] == 0.3       # flag beats file
    assert dumped["network"]["sbs_density"] == 4.0  # file beats defaults


def test_cli_missing_input_fails_with_stage_tag(tmp_path, capsys):
    assert cli.main(["cluster", "--out-dir", str(tmp_path / "void")]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error [cluster]")


def test_cli_invalid_value_fails_nonzero(tmp_path, capsys):
    assert cli.main(["sweep", *cli_args(tmp_path, "--sweep-values", "0.9", "0.3")]) == 1
    assert "error [sweep]" in capsys.readouterr().err


def test_cli_deterministic_artifacts(tmp_path):
    assert cli.main(["sweep", *cli_args(tmp_path / "x")]) == 0
    assert cli.main(["sweep", *cli_args(tmp_path / "y")]) == 0
    assert (tmp_path / "x" / "hits.csv").read_bytes() == (tmp_path / "y" / "hits.csv").read_bytes()
