import numpy as np
import pytest

from clustercache import adaptive_cluster, select_model
from clustercache.geometry import Region
from clustercache.profiles import (
    NetworkConfig,
    PlantedScenario,
    PopularityProfile,
    as_matrix,
    cluster_top_m,
    generate_profiles,
    profiles_from_csv,
    profiles_to_csv,
)


def make_profiles(bias=0.9, n_users=120, clusters=4, subset=8, catalog=60,
                  seed=0, zipf=0.5, noise=0.3):
    sc = PlantedScenario.random(clusters, subset, catalog, n_users, seed=seed,
                                bias=bias, zipf_exponent=zipf, noise_sigma=noise)
    return sc, generate_profiles(sc, n_users, catalog, seed=seed + 1)


def test_profiles_are_distributions():
    _, profs = make_profiles()
    mat = as_matrix(profs)
    assert mat.min() >= 0.0
    assert np.abs(mat.sum(axis=1) - 1.0).max() <= 1e-9


def test_network_config_validation():
    region = Region(6.0, 6.0)
    with pytest.raises(ValueError):
        NetworkConfig(10, 5, region, radius=0.5, cache_size=0, catalog_size=100)
    with pytest.raises(ValueError):
        NetworkConfig(10, 5, region, radius=0.5, cache_size=101, catalog_size=100)
    with pytest.raises(ValueError):
        NetworkConfig(10, 5, region, radius=-1.0, cache_size=10, catalog_size=100)
    with pytest.raises(ValueError):
        NetworkConfig(-1, 5, region, radius=0.5, cache_size=10, catalog_size=100)
    with pytest.raises(ValueError):
        NetworkConfig(10, 5, region, radius=0.5, cache_size=10, catalog_size=100,
                      search_range=(1, 5))


def test_scenario_rejects_bad_bias_and_empty_subset():
    with pytest.raises(ValueError):
        PlantedScenario(2, (np.array([0, 1]), np.array([2])), 0.5, bias=1.5)
    with pytest.raises(ValueError):
        PlantedScenario(2, (np.array([0, 1]), np.array([], dtype=int)), 0.5, bias=0.5)


def test_generate_requires_membership_of_matching_length():
    sc = PlantedScenario(2, (np.array([0]), np.array([1])), 0.0, bias=0.5)
    with pytest.raises(ValueError):
        generate_profiles(sc, 10, 5, seed=0)
    sc2 = PlantedScenario(2, (np.array([0]), np.array([1])), 0.0, bias=0.5,
                          membership=np.zeros(3, dtype=int))
    with pytest.raises(ValueError):
        generate_profiles(sc2, 10, 5, seed=0)
    with pytest.raises(ValueError):
        generate_profiles(sc2, 0, 5, seed=0)


def test_profile_invariants_enforced():
    with pytest.raises(ValueError):
        PopularityProfile(0, np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        PopularityProfile(0, np.array([1.2, -0.2]))


def test_bias_one_zipf_zero_gives_uniform_on_subset():
    # degenerate mixture: all mass spread evenly over the preferred files
    subset = np.array([3, 7, 11, 2])
    sc = PlantedScenario(1, (subset,), zipf_exponent=0.0, bias=1.0,
                         membership=np.zeros(5, dtype=int), noise_sigma=0.3)
    mat = as_matrix(generate_profiles(sc, 5, 20, seed=4))
    expected = np.zeros(20)
    expected[subset] = 0.25
    assert np.abs(mat - expected).max() <= 1e-12


def test_bias_zero_yields_no_structure():
    sc, profs = make_profiles(bias=0.0, n_users=150, seed=11)
    mat = as_matrix(profs)
    # uniform-ish: every entry within a factor of the uniform level
    assert mat.max() <= 5.0 / mat.shape[1]
    assert mat.min() >= 0.2 / mat.shape[1]
    # no planted structure: the criterion search cannot do better than its floor
    model, trace = adaptive_cluster(mat, (2, 6), seed=12)
    assert select_model(trace).cluster_count == 2


def test_intra_cluster_correlation_dominates():
    sc, profs = make_profiles(bias=0.9, n_users=120, seed=21)
    mat = as_matrix(profs)
    corr = np.corrcoef(mat)
    same = sc.membership[:, None] == sc.membership[None, :]
    iu = np.triu_indices(len(mat), k=1)
    intra = np.sort(corr[iu][same[iu]])
    inter = np.sort(corr[iu][~same[iu]])
    # fraction of (intra, inter) comparisons where intra wins
    below = np.searchsorted(inter, intra, side="right")
    frac = below.sum() / (intra.size * inter.size)
    assert frac >= 0.99


def test_cluster_top_m_sorted_input():
    probs = np.linspace(0.2, 0.05, 8)
    probs = probs / probs.sum()
    assert list(cluster_top_m(probs[None, :], 3)) == [0, 1, 2]


def test_cluster_top_m_hand_average():
    # two opposite rankings: the averaged vector decides, ties to low index
    users = np.array([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]])  # mean [.35, .3, .35]
    assert list(cluster_top_m(users, 2)) == [0, 2]
    assert list(cluster_top_m(users, 1)) == [0]


def test_cluster_top_m_tie_breaks_to_lowest_index():
    users = np.array([[0.25, 0.25, 0.25, 0.25]])
    assert list(cluster_top_m(users, 2)) == [0, 1]


def test_cluster_top_m_full_catalog_and_errors():
    _, profs = make_profiles(n_users=10, catalog=30, subset=5)
    mat = as_matrix(profs)
    assert list(cluster_top_m(mat, 30)) == list(range(30))
    with pytest.raises(ValueError):
        cluster_top_m(mat, 31)
    with pytest.raises(ValueError):
        cluster_top_m(mat[:0], 3)


def test_cluster_top_m_permutation_equivariant():
    rng = np.random.default_rng(8)
    mat = as_matrix(make_profiles(n_users=20, catalog=25, subset=6)[1])
    perm = rng.permutation(25)
    base = cluster_top_m(mat, 7)
    permuted = cluster_top_m(mat[:, perm], 7)
    # relabeling files relabels the selection accordingly
    assert set(perm[permuted]) == set(base)


def test_csv_round_trip_exact(tmp_path):
    _, profs = make_profiles(n_users=15, catalog=12, subset=3, clusters=3)
    path = tmp_path / "profiles.csv"
    profiles_to_csv(profs, path)
    back = profiles_from_csv(path)
    assert [p.user_id for p in back] == [p.user_id for p in profs]
    assert np.array_equal(as_matrix(back), as_matrix(profs))


def test_csv_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nope,f0\n1,1.0\n")
    with pytest.raises(ValueError):
        profiles_from_csv(path)
    empty = tmp_path / "empty.csv"
    empty.write_text("user_id,f0\n")
    with pytest.raises(ValueError):
        profiles_from_csv(empty)


def test_generation_deterministic():
    sc1, p1 = make_profiles(seed=33)
    sc2, p2 = make_profiles(seed=33)
    assert np.array_equal(sc1.membership, sc2.membership)
    assert np.array_equal(as_matrix(p1), as_matrix(p2))
