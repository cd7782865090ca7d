"""Homogeneous Poisson point processes on rectangles, with disc range counting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Region", "PointSet", "sample_ppp", "points_within"]

# Below this size a brute-force scan beats building the grid index.
_BRUTE_FORCE_CUTOFF = 64


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle [0, width] x [0, height], lengths in km."""

    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"degenerate region {self.width} x {self.height}")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class PointSet:
    """Immutable planar point pattern tied to the region it was sampled on.

    ``positions`` is an (n, 2) read-only float array. The lazy per-radius grid
    index only accelerates queries; correctness is defined by the plain
    distance scan.
    """

    positions: np.ndarray
    intensity: float
    region: Region
    _grids: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must be (n, 2), got {pos.shape}")
        if pos.size and (
            pos[:, 0].min() < 0.0
            or pos[:, 1].min() < 0.0
            or pos[:, 0].max() > self.region.width
            or pos[:, 1].max() > self.region.height
        ):
            raise ValueError("positions outside region")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def count(self) -> int:
        return self.positions.shape[0]


def sample_ppp(intensity: float, region: Region, seed) -> PointSet:
    """Draw a homogeneous PPP: Poisson count, then i.i.d. uniform positions.

    The draw order (count, then x block, then y block) is fixed, so a given
    seed always yields a bit-identical PointSet.
    """
    if intensity < 0:
        raise ValueError(f"negative intensity {intensity}")
    rng = np.random.default_rng(seed)
    n = rng.poisson(intensity * region.area)
    xs = rng.uniform(0.0, region.width, n)
    ys = rng.uniform(0.0, region.height, n)
    return PointSet(np.column_stack([xs, ys]), intensity, region)


def _grid(point_set: PointSet, radius: float):
    """Sorted cell-key index with cell size = radius (built once per radius)."""
    key = float(radius)
    cached = point_set._grids.get(key)
    if cached is not None:
        return cached
    inv = 1.0 / radius
    cx = np.floor(point_set.positions[:, 0] * inv).astype(np.int64)
    cy = np.floor(point_set.positions[:, 1] * inv).astype(np.int64)
    # stride > max occupied cy, so occupied cells map to distinct keys
    stride = int(np.floor(point_set.region.height * inv)) + 2
    order = np.argsort(cx * stride + cy, kind="stable")
    cached = ((cx * stride + cy)[order], order, stride)
    point_set._grids[key] = cached
    return cached


def points_within(point_set: PointSet, center, radius: float, subset=None) -> int:
    """Count points of ``subset`` (indices; default all) with distance <= radius.

    The ball is closed: a point at exactly ``radius`` counts.
    """
    if radius < 0:
        raise ValueError(f"negative radius {radius}")
    pos = point_set.positions
    n = pos.shape[0]
    if n == 0:
        return 0
    cx, cy = float(center[0]), float(center[1])

    if n <= _BRUTE_FORCE_CUTOFF or radius == 0.0:
        cand = np.arange(n)
    else:
        keys, order, stride = _grid(point_set, radius)
        ccx = int(np.floor(cx / radius))
        ccy = int(np.floor(cy / radius))
        ranges = []
        for dx in (-1, 0, 1):
            base = (ccx + dx) * stride + ccy
            lo = np.searchsorted(keys, base - 1, side="left")
            hi = np.searchsorted(keys, base + 1, side="right")
            if lo < hi:
                ranges.append(order[lo:hi])
        if not ranges:
            return 0
        cand = np.concatenate(ranges)

    if subset is not None:
        subset = np.asarray(subset, dtype=np.intp)
        if subset.size == 0:
            return 0
        mask = np.zeros(n, dtype=bool)
        mask[subset] = True
        cand = cand[mask[cand]]
        if cand.size == 0:
            return 0

    d2 = (pos[cand, 0] - cx) ** 2 + (pos[cand, 1] - cy) ** 2
    return int(np.count_nonzero(d2 <= radius * radius))
