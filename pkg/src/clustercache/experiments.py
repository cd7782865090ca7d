"""End-to-end pipeline: generate profiles, cluster, select, allocate, evaluate.

A pipeline run is fully described by an ExperimentSpec (network parameters,
planted scenario, sweep definition, seed) and is deterministic: the same spec
and seed produce byte-identical CSV artifacts.
"""

from __future__ import annotations

import copy
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import allocation as alloc_mod
from . import clustering, hitprob, model_selection
from .geometry import Region
from .profiles import (
    NetworkConfig,
    PlantedScenario,
    as_matrix,
    cluster_top_m,
    generate_profiles,
)

__all__ = [
    "ExperimentSpec",
    "PipelineResult",
    "DEFAULT_CONFIG",
    "load_config",
    "merge_config",
    "spec_from_config",
    "run_pipeline",
    "sweep",
]

SWEEP_VARIABLES = ("radius", "sbs_density", "cache_size")
SCHEMES = ("clustered", "baseline", "both")

# stage tags for seed derivation; every stage draws from its own substream
_STAGE_SCENARIO = 0
_STAGE_PROFILES = 1
_STAGE_CLUSTER = 2
_STAGE_MC = 3

DEFAULT_CONFIG = {
    "network": {
        "sbs_density": 10.0,
        "user_density": 5.5,
        "region": {"width": 6.0, "height": 6.0},
        "radius": 0.5,
        "cache_size": 10,
        "catalog_size": 100,
        "search_range": [2, 12],
    },
    "scenario": {
        "cluster_count": 4,
        "subset_size": 10,
        "zipf_exponent": 0.5,
        "bias": 0.9,
        "noise_sigma": 0.05,
    },
    "experiment": {
        "n_users": 200,
        "sweep_variable": "radius",
        "sweep_values": [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        "n_trials": 200,
        "seed": 1,
        "schemes": "both",
        "uniform_fractions": False,
        "paper_exact_likelihood": False,
    },
}


@dataclass(frozen=True)
class ExperimentSpec:
    network: NetworkConfig
    scenario: PlantedScenario
    n_users: int
    sweep_variable: str
    sweep_values: tuple
    n_trials: int
    seed: int
    schemes: str = "both"
    uniform_fractions: bool = False
    paper_exact_likelihood: bool = False

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep_variable must be one of {SWEEP_VARIABLES}")
        if self.schemes not in SCHEMES:
            raise ValueError(f"schemes must be one of {SCHEMES}")
        values = tuple(self.sweep_values)
        if not values or list(values) != sorted(values):
            raise ValueError("sweep_values must be non-empty and ascending")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        object.__setattr__(self, "sweep_values", values)


@dataclass
class PipelineResult:
    spec: ExperimentSpec
    model: clustering.ClusterModel
    trace: list
    hit_rows: list          # (R, lambda_s, M, scheme, HitReport)
    files: dict


def load_config(path) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return data


def merge_config(base: dict, *overrides: dict) -> dict:
    """Deep-merge dictionaries; later values win."""
    out = copy.deepcopy(base)
    for over in overrides:
        stack = [(out, over)]
        while stack:
            dst, src = stack.pop()
            for key, val in src.items():
                if isinstance(val, dict) and isinstance(dst.get(key), dict):
                    stack.append((dst[key], val))
                else:
                    dst[key] = copy.deepcopy(val)
    return out


def _stage_seed(seed: int, *tags) -> np.random.SeedSequence:
    return np.random.SeedSequence((int(seed),) + tuple(int(t) for t in tags))


def spec_from_config(cfg: dict) -> ExperimentSpec:
    """Build the (deterministic) spec from a resolved configuration mapping."""
    net = cfg["network"]
    sc = cfg["scenario"]
    ex = cfg["experiment"]
    network = NetworkConfig(
        sbs_density=float(net["sbs_density"]),
        user_density=float(net["user_density"]),
        region=Region(float(net["region"]["width"]), float(net["region"]["height"])),
        radius=float(net["radius"]),
        cache_size=int(net["cache_size"]),
        catalog_size=int(net["catalog_size"]),
        search_range=tuple(int(v) for v in net["search_range"]),
    )
    seed = int(ex["seed"])
    scenario = PlantedScenario.random(
        cluster_count=int(sc["cluster_count"]),
        subset_size=int(sc["subset_size"]),
        catalog_size=network.catalog_size,
        n_users=int(ex["n_users"]),
        seed=_stage_seed(seed, _STAGE_SCENARIO),
        bias=float(sc["bias"]),
        zipf_exponent=float(sc["zipf_exponent"]),
        noise_sigma=float(sc["noise_sigma"]),
    )
    return ExperimentSpec(
        network=network,
        scenario=scenario,
        n_users=int(ex["n_users"]),
        sweep_variable=str(ex["sweep_variable"]),
        sweep_values=tuple(ex["sweep_values"]),
        n_trials=int(ex["n_trials"]),
        seed=seed,
        schemes=str(ex["schemes"]),
        uniform_fractions=bool(ex["uniform_fractions"]),
        paper_exact_likelihood=bool(ex["paper_exact_likelihood"]),
    )


def _point_config(network: NetworkConfig, variable: str, value) -> NetworkConfig:
    kwargs = {
        "sbs_density": network.sbs_density,
        "user_density": network.user_density,
        "region": network.region,
        "radius": network.radius,
        "cache_size": network.cache_size,
        "catalog_size": network.catalog_size,
        "search_range": network.search_range,
        "file_length": network.file_length,
    }
    kwargs[variable] = int(value) if variable == "cache_size" else float(value)
    return NetworkConfig(**kwargs)


def _mc_seed(seed: int, *tags) -> int:
    return int(_stage_seed(seed, _STAGE_MC, *tags).generate_state(1)[0])


def sweep(spec: ExperimentSpec, profiles=None, model=None):
    """Evaluate every sweep point, sharing one clustering across points.

    Returns (profiles, model, trace, hit_rows, allocation_rows). Clustering
    does not depend on the swept variable; cached file sets and fractions are
    recomputed per point.
    """
    if profiles is None:
        profiles = generate_profiles(
            spec.scenario,
            spec.n_users,
            spec.network.catalog_size,
            _stage_seed(spec.seed, _STAGE_PROFILES),
        )
    mat = as_matrix(profiles)
    trace = []
    if model is None:
        model, trace = clustering.adaptive_cluster(
            mat,
            spec.network.search_range,
            _stage_seed(spec.seed, _STAGE_CLUSTER),
            paper_exact=spec.paper_exact_likelihood,
        )

    hit_rows = []
    alloc_rows = []
    for idx, value in enumerate(spec.sweep_values):
        cfg = _point_config(spec.network, spec.sweep_variable, value)
        delta_sets = [
            cluster_top_m(mat[model.assignment == k], cfg.cache_size)
            for k in range(model.cluster_count)
        ]
        masses = np.array([alloc_mod.cluster_mass(mat, s) for s in delta_sets])
        if spec.uniform_fractions:
            x = np.full(model.cluster_count, 1.0 / model.cluster_count)
            allocation = alloc_mod.Allocation(
                x, alloc_mod.coverage_exponent(cfg.sbs_density, cfg.radius) * masses,
                0.0, "uniform",
            )
        else:
            allocation = alloc_mod.optimize_fractions(
                masses, cfg.sbs_density, cfg.radius, n_users=mat.shape[0]
            )
        for k in range(model.cluster_count):
            alloc_rows.append(
                (
                    cfg.radius,
                    cfg.sbs_density,
                    cfg.cache_size,
                    k,
                    float(allocation.psi[k]),
                    float(allocation.fractions[k]),
                    allocation.method,
                )
            )
        if spec.schemes in ("clustered", "both"):
            report = hitprob.monte_carlo_hit(
                cfg, mat, delta_sets, allocation.fractions,
                spec.n_trials, _mc_seed(spec.seed, idx, 0),
            )
            hit_rows.append((cfg.radius, cfg.sbs_density, cfg.cache_size, "clustered", report))
        if spec.schemes in ("baseline", "both"):
            top = cluster_top_m(mat, cfg.cache_size)
            report = hitprob.monte_carlo_hit(
                cfg, mat, [top], np.array([1.0]),
                spec.n_trials, _mc_seed(spec.seed, idx, 1),
            )
            hit_rows.append((cfg.radius, cfg.sbs_density, cfg.cache_size, "baseline", report))
    return profiles, model, trace, hit_rows, alloc_rows


def _write_alloc_rows(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["R", "lambda_s", "M", "cluster_id", "psi", "fraction", "method"])
        for r, lam, m, k, psi, frac, method in rows:
            writer.writerow(
                [repr(float(r)), repr(float(lam)), int(m), k, repr(psi), repr(frac), method]
            )


def run_pipeline(spec: ExperimentSpec, out_dir) -> PipelineResult:
    """Run the full chain and write aic_trace, clusters, allocation and hits CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profiles, model, trace, hit_rows, alloc_rows = sweep(spec)

    files = {
        "aic_trace": out / "aic_trace.csv",
        "clusters": out / "clusters.csv",
        "allocation": out / "allocation.csv",
        "hits": out / "hits.csv",
    }
    model_selection.trace_to_csv(trace, files["aic_trace"])
    clustering.clusters_to_csv(model, files["clusters"])
    _write_alloc_rows(alloc_rows, files["allocation"])
    files["hits"].unlink(missing_ok=True)
    hitprob.append_hits_csv(files["hits"], hit_rows)
    return PipelineResult(spec=spec, model=model, trace=trace, hit_rows=hit_rows,
                          files={k: str(v) for k, v in files.items()})
