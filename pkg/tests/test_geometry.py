import numpy as np
import pytest
from scipy import stats

from clustercache.geometry import PointSet, Region, points_within, sample_ppp


def brute_count(positions, center, radius, subset=None):
    """Exhaustive distance scan; the reference for points_within."""
    idx = range(len(positions)) if subset is None else subset
    n = 0
    for i in idx:
        dx = positions[i][0] - center[0]
        dy = positions[i][1] - center[1]
        if dx * dx + dy * dy <= radius * radius:
            n += 1
    return n


def test_zero_intensity_gives_empty_set():
    ps = sample_ppp(0.0, Region(6.0, 6.0), seed=1)
    assert ps.count == 0
    assert points_within(ps, (3.0, 3.0), 2.0) == 0


def test_negative_intensity_rejected():
    with pytest.raises(ValueError):
        sample_ppp(-1.0, Region(1.0, 1.0), seed=0)


@pytest.mark.parametrize("w,h", [(0.0, 1.0), (1.0, -2.0)])
def test_degenerate_region_rejected(w, h):
    with pytest.raises(ValueError):
        Region(w, h)


def test_positions_inside_region_and_immutable():
    ps = sample_ppp(20.0, Region(3.0, 2.0), seed=5)
    assert ps.positions[:, 0].min() >= 0 and ps.positions[:, 0].max() <= 3.0
    assert ps.positions[:, 1].min() >= 0 and ps.positions[:, 1].max() <= 2.0
    with pytest.raises(ValueError):
        ps.positions[0, 0] = -1.0


def test_poisson_count_moments():
    # mean and variance of the count both estimate intensity * area
    region = Region(6.0, 6.0)
    mean_target = 10.0 * region.area
    counts = np.array([sample_ppp(10.0, region, seed=s).count for s in range(10_000)])
    se_mean = np.sqrt(mean_target / counts.size)
    assert abs(counts.mean() - mean_target) <= 3 * se_mean
    # Var(sample variance) ~ (mu + 2 mu^2)/n for Poisson
    se_var = np.sqrt((mean_target + 2 * mean_target**2) / counts.size)
    assert abs(counts.var(ddof=1) - mean_target) <= 3 * se_var


def test_positions_uniform_chi_square():
    region = Region(6.0, 6.0)
    cells = np.zeros(36)
    for s in range(20):
        ps = sample_ppp(5.0, region, seed=100 + s)
        cx = np.floor(ps.positions[:, 0]).astype(int).clip(0, 5)
        cy = np.floor(ps.positions[:, 1]).astype(int).clip(0, 5)
        np.add.at(cells, cx * 6 + cy, 1)
    result = stats.chisquare(cells)
    assert result.pvalue >= 0.01


def test_determinism_bit_identical():
    a = sample_ppp(7.5, Region(4.0, 5.0), seed=123)
    b = sample_ppp(7.5, Region(4.0, 5.0), seed=123)
    assert a.count == b.count
    assert a.positions.tobytes() == b.positions.tobytes()


def test_within_empty_filter_and_empty_set():
    ps = sample_ppp(10.0, Region(2.0, 2.0), seed=3)
    assert points_within(ps, (1.0, 1.0), 1.0, subset=np.array([], dtype=int)) == 0
    empty = PointSet(np.empty((0, 2)), 0.0, Region(1.0, 1.0))
    assert points_within(empty, (0.5, 0.5), 10.0) == 0


def test_boundary_point_counts_closed_ball():
    # a point at distance exactly R is in range, on both code paths
    pos = [(1.0, 0.0)] + [(0.25 + 0.001 * i, 1.5) for i in range(100)]
    ps = PointSet(np.array(pos), 1.0, Region(2.0, 2.0))
    assert points_within(ps, (0.0, 0.0), 1.0, subset=np.array([0])) == 1
    small = PointSet(np.array([[1.0, 0.0]]), 1.0, Region(2.0, 2.0))
    assert points_within(small, (0.0, 0.0), 1.0) == 1


def test_negative_radius_rejected():
    ps = sample_ppp(1.0, Region(1.0, 1.0), seed=0)
    with pytest.raises(ValueError):
        points_within(ps, (0.5, 0.5), -0.1)


def test_grid_matches_brute_force():
    rng = np.random.default_rng(42)
    region = Region(5.0, 3.0)
    for trial in range(30):
        n = int(rng.integers(80, 300))  # above the brute-force cutoff
        pos = np.column_stack([rng.uniform(0, 5, n), rng.uniform(0, 3, n)])
        ps = PointSet(pos, n / region.area, region)
        for _ in range(5):
            center = (rng.uniform(-1, 6), rng.uniform(-1, 4))
            radius = rng.uniform(0.05, 2.5)
            subset = None
            if rng.random() < 0.5:
                subset = rng.choice(n, size=int(rng.integers(0, n)), replace=False)
            expected = brute_count(pos, center, radius, subset)
            assert points_within(ps, center, radius, subset) == expected


def test_within_monotone_in_radius():
    ps = sample_ppp(30.0, Region(4.0, 4.0), seed=9)
    center = (2.0, 2.0)
    counts = [points_within(ps, center, r) for r in np.linspace(0.0, 3.0, 25)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert counts[-1] <= ps.count


def test_zero_radius_exact_match():
    pos = np.array([[0.5, 0.5], [0.5, 0.25]])
    ps = PointSet(pos, 1.0, Region(1.0, 1.0))
    assert points_within(ps, (0.5, 0.5), 0.0) == 1
    assert points_within(ps, (0.4, 0.4), 0.0) == 0
