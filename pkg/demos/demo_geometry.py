#!/usr/bin/env python3
"""Poisson point process sampling and disc range counting.

Samples base-station layouts, checks the count statistics against the
Poisson law, and compares indexed range queries with a direct scan.
"""
import numpy as np

from clustercache import Region, points_within, sample_ppp

region = Region(6.0, 6.0)
intensity = 10.0  # SBS per km^2

print(f"Region {region.width} x {region.height} km, intensity {intensity}/km^2")
print(f"Expected point count: {intensity * region.area:.0f}\n")

counts = [sample_ppp(intensity, region, seed=s).count for s in range(2000)]
print(f"Over 2000 seeded draws: mean {np.mean(counts):.1f}, variance {np.var(counts):.1f}")
print("(a Poisson process has mean equal to variance)\n")

ps = sample_ppp(intensity, region, seed=42)
print(f"One realization: {ps.count} stations")
center = (3.0, 3.0)
for radius in (0.25, 0.5, 1.0, 2.0):
    n = points_within(ps, center, radius)
    density = n / (np.pi * radius**2)
    print(f"  within {radius:4.2f} km of the center: {n:3d} stations "
          f"(local density {density:5.1f}/km^2)")

# range queries accept an index subset, e.g. only odd-numbered stations
odd = np.arange(1, ps.count, 2)
print(f"\nOdd-indexed stations within 1 km: {points_within(ps, center, 1.0, subset=odd)}")
print(f"Same seed reproduces the layout exactly: "
      f"{np.array_equal(ps.positions, sample_ppp(intensity, region, seed=42).positions)}")
