#!/usr/bin/env python3
"""Full pipeline sweeps: the CSV artifacts behind the result figures.

Runs radius / density / cache-size sweeps plus the criterion trace, writing
the CSVs that the plotting front end consumes. Equivalent CLI:

    clustercache sweep --out-dir runs/radius --sweep-variable radius \
        --sweep-values 0.3 0.4 0.5 0.6 0.7 0.8 0.9 1.0
"""
from pathlib import Path

from clustercache.experiments import DEFAULT_CONFIG, merge_config, run_pipeline, spec_from_config

OUT = Path("runs")

SWEEPS = {
    "radius": {"sweep_variable": "radius",
               "sweep_values": [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]},
    "density": {"sweep_variable": "sbs_density",
                "sweep_values": [4.0, 8.0, 12.0, 16.0, 24.0, 32.0, 40.0]},
    "cache": {"sweep_variable": "cache_size",
              "sweep_values": [1, 2, 5, 10, 20, 40, 70, 100]},
}

for name, overrides in SWEEPS.items():
    cfg = merge_config(DEFAULT_CONFIG, {"experiment": {"n_trials": 150, **overrides}})
    spec = spec_from_config(cfg)
    result = run_pipeline(spec, OUT / name)
    first = result.hit_rows[0][4]
    print(f"{name:8s} sweep: {len(result.hit_rows)} rows -> {result.files['hits']} "
          f"(clustered analytic at first point: {first.analytic:.3f})")

print(f"\ncriterion trace for the radius run: {OUT / 'radius' / 'aic_trace.csv'}")
print("render the figures with the plots tool, e.g.:")
print("  plots hit_vs_radius runs/radius/hits.csv -o runs/radius/hit_vs_radius.svg")
print("  plots hit_vs_density runs/density/hits.csv -o runs/density/hit_vs_density.svg")
print("  plots hit_vs_cache runs/cache/hits.csv -o runs/cache/hit_vs_cache.svg")
print("  plots aic_trace runs/radius/aic_trace.csv -o runs/radius/aic_trace.svg")
