"""Cache-hit probability: analytic expression, no-clustering baseline, and a
Monte Carlo estimator over PPP realizations.

The analytic value for a placement (file sets Delta_k, SBS fractions x_k) is

    (1/N_u) sum_k sum_u (sum_{i in Delta_k} p_iu) (1 - exp(-x_k * A)),

A = sbs_density * pi * R^2. It treats the clusters' file sets as disjoint;
overlapping sets double-count, so the value is clamped to [0, 1] and a
diagnostic warning raised. The Monte Carlo path simulates the placement
positionally and is exact either way.
"""

from __future__ import annotations

import csv
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import Region, points_within, sample_ppp
from .profiles import NetworkConfig, as_matrix, cluster_top_m

__all__ = [
    "CachePlacement",
    "HitReport",
    "analytic_hit",
    "analytic_hit_baseline",
    "delta_overlap",
    "monte_carlo_hit",
    "append_hits_csv",
    "HITS_CSV_COLUMNS",
]

HITS_CSV_COLUMNS = [
    "R",
    "lambda_s",
    "M",
    "scheme",
    "analytic",
    "mc_estimate",
    "mc_halfwidth",
    "n_trials",
    "overlap_warning",
]

_MAX_ZERO_USER_ROUNDS = 100


@dataclass(frozen=True)
class CachePlacement:
    """What each cluster caches and which share of SBSs serves it."""

    delta_sets: tuple
    fractions: np.ndarray

    def __post_init__(self):
        sets = tuple(np.asarray(s, dtype=np.intp) for s in self.delta_sets)
        sizes = {s.size for s in sets}
        if len(sizes) != 1:
            raise ValueError("all cached file sets must have the same size")
        x = np.asarray(self.fractions, dtype=float)
        if x.size != len(sets):
            raise ValueError("one fraction per file set required")
        if (x < 0).any() or x.sum() > 1.0 + 1e-9:
            raise ValueError("fractions must be >= 0 and sum to <= 1")
        object.__setattr__(self, "delta_sets", sets)
        object.__setattr__(self, "fractions", x)


@dataclass(frozen=True)
class HitReport:
    """Analytic value, simulation estimate with confidence halfwidth, baseline."""

    analytic: float
    mc_estimate: float
    mc_halfwidth_95: float
    n_trials: int
    baseline_analytic: float
    n_user_trials: int = 0
    resampled_trials: int = 0
    overlap_warning: bool = False

    def __post_init__(self):
        for name in ("analytic", "mc_estimate", "baseline_analytic"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.mc_halfwidth_95 < 0:
            raise ValueError("negative halfwidth")


def delta_overlap(delta_sets) -> np.ndarray:
    """Pairwise intersection sizes of the cached file sets (diagonal = sizes)."""
    sets = [np.asarray(s, dtype=np.intp) for s in delta_sets]
    n = len(sets)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = np.intersect1d(sets[i], sets[j]).size
    return out


def _check_placement(mat, delta_sets, fractions):
    x = np.asarray(fractions, dtype=float)
    if x.size != len(delta_sets):
        raise ValueError(f"{len(delta_sets)} file sets but {x.size} fractions")
    if (x < 0).any() or x.sum() > 1.0 + 1e-9:
        raise ValueError("fractions must be >= 0 and sum to <= 1")
    for s in delta_sets:
        s = np.asarray(s)
        if s.size and s.max() >= mat.shape[1]:
            raise ValueError("cached file set outside catalog")
    return x


def analytic_hit(profiles, delta_sets, fractions, sbs_density: float, radius: float) -> float:
    """Closed-form hit probability of the placement (clamped to [0, 1])."""
    mat = as_matrix(profiles)
    x = _check_placement(mat, delta_sets, fractions)
    a = sbs_density * np.pi * radius * radius
    total = 0.0
    for s, xk in zip(delta_sets, x):
        idx = np.asarray(s, dtype=np.intp)
        mass = mat[:, idx].sum() if idx.size else 0.0
        total += mass * (1.0 - np.exp(-xk * a))
    value = total / mat.shape[0]
    overlap = delta_overlap(delta_sets)
    if np.triu(overlap, 1).sum() > 0:
        warnings.warn(
            f"cached sets overlap ({int(np.triu(overlap, 1).sum())} shared file pairs); "
            "value double-counts and is clamped",
            stacklevel=2,
        )
    return float(min(max(value, 0.0), 1.0))


def analytic_hit_baseline(profiles, cache_size: int, sbs_density: float, radius: float) -> float:
    """Hit probability when every SBS caches the network-wide top-M files."""
    mat = as_matrix(profiles)
    top = cluster_top_m(mat, cache_size)
    a = sbs_density * np.pi * radius * radius
    value = mat[:, top].sum() / mat.shape[0] * (1.0 - np.exp(-a))
    return float(min(max(value, 0.0), 1.0))


def _file_cluster_membership(delta_sets, n_files: int) -> np.ndarray:
    member = np.zeros((n_files, len(delta_sets)), dtype=bool)
    for k, s in enumerate(delta_sets):
        member[np.asarray(s, dtype=np.intp), k] = True
    return member


def _draw_files(cdfs: np.ndarray, pidx: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of one file per user, grouped by profile row."""
    files = np.empty(pidx.size, dtype=np.intp)
    order = np.argsort(pidx, kind="stable")
    sorted_p = pidx[order]
    starts = np.searchsorted(sorted_p, np.arange(cdfs.shape[0] + 1))
    for p in np.unique(sorted_p):
        sel = order[starts[p] : starts[p + 1]]
        files[sel] = np.searchsorted(cdfs[p], r[sel], side="right")
    return np.minimum(files, cdfs.shape[1] - 1)


def _expand_ranges(lo: np.ndarray, hi: np.ndarray):
    """Flatten [lo_i, hi_i) ranges into (owner index, position) pairs."""
    lens = hi - lo
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    owner = np.repeat(np.arange(lo.size), lens)
    pos = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens) + np.repeat(lo, lens)
    return owner, pos


def monte_carlo_hit(
    config: NetworkConfig,
    profiles,
    delta_sets,
    fractions,
    n_trials: int,
    seed: int,
    edge_guard: bool = True,
    method: str = "grid",
    chunk_trials: int = 2048,
) -> HitReport:
    """Estimate the hit probability by simulating the placement protocol.

    Per trial: sample the SBS PPP (over the R-dilated region when
    ``edge_guard`` is on, so serving discs never see the region border), label
    each SBS with cluster k with probability x_k (unlabeled otherwise), draw a
    Poisson number of users placed uniformly (zero-user trials are resampled),
    give user j the profile (offset + j) mod n_profiles with a per-trial
    random offset, draw one request per user, and count a hit when a
    within-radius SBS carries the requested file.

    The halfwidth is a 95% normal interval computed from per-trial hit totals
    (trial-level variance), which stays honest when users of one trial share
    an SBS realization. Deterministic for a fixed (seed, method, chunk_trials).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if method not in ("grid", "reference"):
        raise ValueError(f"unknown method {method!r}")
    mat = as_matrix(profiles)
    x = _check_placement(mat, delta_sets, fractions)
    sets = tuple(np.asarray(s, dtype=np.intp) for s in delta_sets)

    if method == "grid":
        hits_t, users_t, resampled = _simulate_grid(
            config, mat, sets, x, n_trials, seed, edge_guard, chunk_trials
        )
    else:
        hits_t, users_t, resampled = _simulate_reference(
            config, mat, sets, x, n_trials, seed, edge_guard
        )

    total_users = int(users_t.sum())
    estimate = float(hits_t.sum() / total_users)
    if n_trials >= 2:
        resid = hits_t - estimate * users_t
        var = float((resid @ resid) / total_users**2 * n_trials / (n_trials - 1))
    else:
        var = estimate * (1.0 - estimate) / total_users
    halfwidth = 1.959963984540054 * np.sqrt(max(var, 0.0))

    overlap = bool(np.triu(delta_overlap(sets), 1).sum() > 0)
    with warnings.catch_warnings():
        if overlap:
            warnings.simplefilter("ignore")
        analytic = analytic_hit(mat, sets, x, config.sbs_density, config.radius)
    baseline = analytic_hit_baseline(mat, config.cache_size, config.sbs_density, config.radius)
    return HitReport(
        analytic=analytic,
        mc_estimate=estimate,
        mc_halfwidth_95=float(halfwidth),
        n_trials=n_trials,
        baseline_analytic=baseline,
        n_user_trials=total_users,
        resampled_trials=resampled,
        overlap_warning=overlap,
    )


def _sample_user_counts(rng, mean: float, size: int):
    """Poisson counts conditioned on >= 1 by resampling; returns (counts, redraws)."""
    counts = rng.poisson(mean, size)
    redraws = 0
    for _ in range(_MAX_ZERO_USER_ROUNDS):
        zero = counts == 0
        nz = int(zero.sum())
        if nz == 0:
            return counts, redraws
        redraws += nz
        counts[zero] = rng.poisson(mean, nz)
    raise RuntimeError(
        f"could not draw a positive user count (mean {mean}); raise user_density"
    )


def _simulate_grid(config, mat, sets, x, n_trials, seed, edge_guard, chunk_trials):
    region = config.region
    radius = config.radius
    guard = radius if edge_guard else 0.0
    w, h = region.width, region.height
    sbs_mean = config.sbs_density * (w + 2 * guard) * (h + 2 * guard)
    user_mean = config.user_density * region.area
    n_profiles, n_files = mat.shape
    cdfs = np.cumsum(mat, axis=1)
    member = _file_cluster_membership(sets, n_files)
    cum_x = np.cumsum(x)
    n_clusters = len(sets)

    # cell size = radius so any within-radius pair sits in adjacent cells
    nx = int(np.ceil((w + 2 * guard) / radius)) + 3
    ny = int(np.ceil((h + 2 * guard) / radius)) + 3

    hits_t = np.zeros(n_trials, dtype=np.int64)
    users_t = np.zeros(n_trials, dtype=np.int64)
    resampled = 0
    for chunk_index, start in enumerate(range(0, n_trials, chunk_trials)):
        nc = min(chunk_trials, n_trials - start)
        rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))

        m, redraws = _sample_user_counts(rng, user_mean, nc)
        resampled += redraws
        s = rng.poisson(sbs_mean, nc)
        total_s, total_u = int(s.sum()), int(m.sum())

        sbs_trial = np.repeat(np.arange(nc), s)
        sbs_xy = np.column_stack(
            [rng.uniform(-guard, w + guard, total_s), rng.uniform(-guard, h + guard, total_s)]
        )
        sbs_label = np.searchsorted(cum_x, rng.random(total_s), side="right")

        user_trial = np.repeat(np.arange(nc), m)
        user_xy = np.column_stack(
            [rng.uniform(0.0, w, total_u), rng.uniform(0.0, h, total_u)]
        )
        offsets = rng.integers(0, n_profiles, nc)
        intra = np.arange(total_u) - np.repeat(np.cumsum(m) - m, m)
        pidx = (offsets[user_trial] + intra) % n_profiles
        files = _draw_files(cdfs, pidx, rng.random(total_u))

        sbs_cell_x = np.floor((sbs_xy[:, 0] + guard) / radius).astype(np.int64)
        sbs_cell_y = np.floor((sbs_xy[:, 1] + guard) / radius).astype(np.int64)
        sbs_key = (sbs_trial * nx + sbs_cell_x) * ny + sbs_cell_y
        user_cell_x = np.floor((user_xy[:, 0] + guard) / radius).astype(np.int64)
        user_cell_y = np.floor((user_xy[:, 1] + guard) / radius).astype(np.int64)
        user_base = (user_trial * nx + user_cell_x) * ny + user_cell_y

        hit = np.zeros(total_u, dtype=bool)
        r2 = radius * radius
        for k in range(n_clusters):
            u_sel = np.flatnonzero(member[files, k] & ~hit)
            if u_sel.size == 0:
                continue
            s_sel = np.flatnonzero(sbs_label == k)
            if s_sel.size == 0:
                continue
            order = np.argsort(sbs_key[s_sel], kind="stable")
            s_sel = s_sel[order]
            skeys = sbs_key[s_sel]
            sx, sy = sbs_xy[s_sel, 0], sbs_xy[s_sel, 1]
            found = np.zeros(u_sel.size, dtype=bool)
            ux, uy = user_xy[u_sel, 0], user_xy[u_sel, 1]
            for dx in (-1, 0, 1):
                # three consecutive keys per x-offset cover dy in {-1,0,1}
                base = user_base[u_sel] + dx * ny
                lo = np.searchsorted(skeys, base - 1, side="left")
                hi = np.searchsorted(skeys, base + 1, side="right")
                owner, pos = _expand_ranges(lo, hi)
                if owner.size == 0:
                    continue
                d2 = (sx[pos] - ux[owner]) ** 2 + (sy[pos] - uy[owner]) ** 2
                close = owner[d2 <= r2]
                if close.size:
                    found[np.unique(close)] = True
            hit[u_sel[found]] = True

        hits_t[start : start + nc] = np.bincount(user_trial[hit], minlength=nc)
        users_t[start : start + nc] = m
    return hits_t, users_t, resampled


def _simulate_reference(config, mat, sets, x, n_trials, seed, edge_guard):
    """Readable per-trial loop over the geometry primitives (same protocol)."""
    region = config.region
    radius = config.radius
    guard = radius if edge_guard else 0.0
    sample_region = Region(region.width + 2 * guard, region.height + 2 * guard)
    cdfs = np.cumsum(mat, axis=1)
    member = _file_cluster_membership(sets, mat.shape[1])
    cum_x = np.cumsum(x)
    user_mean = config.user_density * region.area

    hits_t = np.zeros(n_trials, dtype=np.int64)
    users_t = np.zeros(n_trials, dtype=np.int64)
    resampled = 0
    for t in range(n_trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, t)))
        sbs = sample_ppp(config.sbs_density, sample_region, rng)
        labels = np.searchsorted(cum_x, rng.random(sbs.count), side="right")
        by_label = [np.flatnonzero(labels == k) for k in range(len(sets))]

        m, redraws = _sample_user_counts(rng, user_mean, 1)
        resampled += redraws
        m = int(m[0])
        ux = rng.uniform(0.0, region.width, m)
        uy = rng.uniform(0.0, region.height, m)
        offset = int(rng.integers(0, mat.shape[0]))

        hits = 0
        for j in range(m):
            p = (offset + j) % mat.shape[0]
            f = int(
                min(
                    np.searchsorted(cdfs[p], rng.random(), side="right"),
                    mat.shape[1] - 1,
                )
            )
            center = (ux[j] + guard, uy[j] + guard)
            for k in np.flatnonzero(member[f]):
                if by_label[k].size and points_within(sbs, center, radius, by_label[k]) > 0:
                    hits += 1
                    break
        hits_t[t] = hits
        users_t[t] = m
    return hits_t, users_t, resampled


def append_hits_csv(path, rows) -> None:
    """Append hit-report rows; writes the header when the file is new.

    Each row: (R, lambda_s, M, scheme, HitReport).
    """
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(HITS_CSV_COLUMNS)
        for radius, lam, m, scheme, report in rows:
            writer.writerow(
                [
                    repr(float(radius)),
                    repr(float(lam)),
                    int(m),
                    scheme,
                    repr(float(report.analytic)),
                    repr(float(report.mc_estimate)),
                    repr(float(report.mc_halfwidth_95)),
                    int(report.n_trials),
                    report.overlap_warning,
                ]
            )
