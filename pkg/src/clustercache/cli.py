"""Command-line front end: generate / cluster / allocate / evaluate / sweep.

Every subcommand resolves its settings as defaults <- --config file <- flags,
honors --seed/--out-dir, and exits nonzero with a stage-tagged message on
failure. --print-config dumps the resolved configuration and exits.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np
import yaml

from . import allocation as alloc_mod
from . import clustering, experiments, hitprob, model_selection
from .profiles import (
    as_matrix,
    cluster_top_m,
    generate_profiles,
    profiles_from_csv,
    profiles_to_csv,
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config file; flags override its keys")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out-dir", default="runs", help="artifact directory")
    p.add_argument("--print-config", action="store_true",
                   help="dump the resolved config and exit")


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radius", type=float)
    p.add_argument("--sbs-density", type=float)
    p.add_argument("--user-density", type=float)
    p.add_argument("--cache-size", type=int)
    p.add_argument("--catalog-size", type=int)
    p.add_argument("--search-range", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--n-users", type=int)
    p.add_argument("--n-trials", type=int)
    p.add_argument("--sweep-variable", choices=experiments.SWEEP_VARIABLES)
    p.add_argument("--sweep-values", type=float, nargs="+")
    p.add_argument("--schemes", choices=experiments.SCHEMES)
    p.add_argument("--uniform-fractions", action="store_true", default=None)
    p.add_argument("--paper-exact-likelihood", action="store_true", default=None)


def _overrides_from_args(args) -> dict:
    net, ex = {}, {}
    for key in ("radius", "sbs_density", "user_density", "cache_size", "catalog_size"):
        v = getattr(args, key)
        if v is not None:
            net[key] = v
    if args.search_range is not None:
        net["search_range"] = list(args.search_range)
    for key in ("n_users", "n_trials", "sweep_variable", "schemes",
                "uniform_fractions", "paper_exact_likelihood"):
        v = getattr(args, key)
        if v is not None:
            ex[key] = v
    if args.sweep_values is not None:
        ex["sweep_values"] = list(args.sweep_values)
    if args.seed is not None:
        ex["seed"] = args.seed
    out = {}
    if net:
        out["network"] = net
    if ex:
        out["experiment"] = ex
    return out


def _resolve(args) -> dict:
    layers = [experiments.DEFAULT_CONFIG]
    if args.config:
        layers.append(experiments.load_config(args.config))
    layers.append(_overrides_from_args(args))
    return experiments.merge_config(*layers)


def _read_clusters(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["user_id", "cluster_id"]:
            raise ValueError(f"{path}: expected columns user_id,cluster_id")
        rows = sorted((int(r[0]), int(r[1])) for r in reader)
    return np.array([k for _, k in rows], dtype=np.intp)


def _read_fractions(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if "fraction" not in (reader.fieldnames or []):
            raise ValueError(f"{path}: expected a fraction column")
        pairs = sorted((int(r["cluster_id"]), float(r["fraction"])) for r in reader)
    return np.array([f for _, f in pairs])


def cmd_generate(args) -> int:
    cfg = _resolve(args)
    spec = experiments.spec_from_config(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profiles = generate_profiles(
        spec.scenario, spec.n_users, spec.network.catalog_size,
        np.random.SeedSequence((spec.seed, 1)),
    )
    profiles_to_csv(profiles, out / "profiles.csv")
    with open(out / "membership.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "planted_cluster"])
        for uid, c in enumerate(spec.scenario.membership):
            writer.writerow([uid, int(c)])
    print(f"wrote {out / 'profiles.csv'} ({spec.n_users} users, "
          f"{spec.network.catalog_size} files) and membership.csv")
    return 0


def cmd_cluster(args) -> int:
    cfg = _resolve(args)
    spec = experiments.spec_from_config(cfg)
    out = Path(args.out_dir)
    profiles = profiles_from_csv(out / "profiles.csv")
    model, trace = clustering.adaptive_cluster(
        profiles, spec.network.search_range,
        np.random.SeedSequence((spec.seed, 2)),
        paper_exact=spec.paper_exact_likelihood,
    )
    clustering.clusters_to_csv(model, out / "clusters.csv")
    clustering.centroids_to_csv(model, out / "centroids.csv")
    model_selection.trace_to_csv(trace, out / "aic_trace.csv")
    best = model_selection.select_model(trace)
    print(f"selected {best.cluster_count} clusters "
          f"(criterion {best.aic:.2f}, normalized {best.aic_normalized:.4f})")
    return 0


def cmd_allocate(args) -> int:
    cfg = _resolve(args)
    spec = experiments.spec_from_config(cfg)
    out = Path(args.out_dir)
    mat = as_matrix(profiles_from_csv(out / "profiles.csv"))
    assignment = _read_clusters(out / "clusters.csv")
    n_clusters = int(assignment.max()) + 1
    delta_sets = [
        cluster_top_m(mat[assignment == k], spec.network.cache_size)
        for k in range(n_clusters)
    ]
    masses = np.array([alloc_mod.cluster_mass(mat, s) for s in delta_sets])
    allocation = alloc_mod.optimize_fractions(
        masses, spec.network.sbs_density, spec.network.radius, n_users=mat.shape[0]
    )
    alloc_mod.allocation_to_csv(allocation, out / "allocation.csv")
    print(f"fractions: {np.array2string(allocation.fractions, precision=4)} "
          f"({allocation.method})")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _resolve(args)
    spec = experiments.spec_from_config(cfg)
    out = Path(args.out_dir)
    mat = as_matrix(profiles_from_csv(out / "profiles.csv"))
    assignment = _read_clusters(out / "clusters.csv")
    n_clusters = int(assignment.max()) + 1
    net = spec.network
    delta_sets = [
        cluster_top_m(mat[assignment == k], net.cache_size) for k in range(n_clusters)
    ]
    fractions = _read_fractions(out / "allocation.csv")
    rows = []
    if spec.schemes in ("clustered", "both"):
        report = hitprob.monte_carlo_hit(
            net, mat, delta_sets, fractions, spec.n_trials, spec.seed
        )
        rows.append((net.radius, net.sbs_density, net.cache_size, "clustered", report))
        print(f"clustered: analytic {report.analytic:.4f}, "
              f"mc {report.mc_estimate:.4f} ± {report.mc_halfwidth_95:.4f}")
    if spec.schemes in ("baseline", "both"):
        top = cluster_top_m(mat, net.cache_size)
        report = hitprob.monte_carlo_hit(
            net, mat, [top], np.array([1.0]), spec.n_trials, spec.seed + 1
        )
        rows.append((net.radius, net.sbs_density, net.cache_size, "baseline", report))
        print(f"baseline:  analytic {report.analytic:.4f}, "
              f"mc {report.mc_estimate:.4f} ± {report.mc_halfwidth_95:.4f}")
    hitprob.append_hits_csv(out / "hits.csv", rows)
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve(args)
    spec = experiments.spec_from_config(cfg)
    result = experiments.run_pipeline(spec, args.out_dir)
    best = model_selection.select_model(result.trace)
    print(f"clusters: {best.cluster_count}; "
          f"{len(result.hit_rows)} hit rows over {len(spec.sweep_values)} sweep points")
    for name, path in result.files.items():
        print(f"  {name}: {path}")
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "cluster": cmd_cluster,
    "allocate": cmd_allocate,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clustercache",
        description="cluster-aware proactive caching: pipeline and sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("generate", "synthesize popularity profiles (profiles.csv, membership.csv)"),
        ("cluster", "adaptive clustering with criterion trace (clusters/centroids/aic_trace)"),
        ("allocate", "optimal SBS fractions for the clustering (allocation.csv)"),
        ("evaluate", "analytic and Monte Carlo hit probability (hits.csv)"),
        ("sweep", "full pipeline over the configured sweep (all artifacts)"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        _add_overrides(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.print_config:
        try:
            print(yaml.safe_dump(_resolve(args), sort_keys=False), end="")
            return 0
        except Exception as exc:  # noqa: BLE001
            print(f"error [config]: {exc}", file=sys.stderr)
            return 1
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error [{args.command}]: missing input {exc.filename}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, RuntimeError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
