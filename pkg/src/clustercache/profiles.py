"""Network/catalog parameters and synthetic per-user content popularity profiles.

Profiles are probability vectors over an F-file catalog. The synthetic
generator plants cluster structure: each planted cluster prefers its own file
subset with a Zipf-shaped bias, mixed against a uniform background.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .geometry import Region

__all__ = [
    "NetworkConfig",
    "PopularityProfile",
    "PlantedScenario",
    "generate_profiles",
    "cluster_top_m",
    "as_matrix",
    "profiles_to_csv",
    "profiles_from_csv",
]

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class NetworkConfig:
    """Physical and catalog parameters of one experiment.

    ``file_length`` is carried for completeness but enters no formula.
    """

    sbs_density: float          # SBS per km^2
    user_density: float         # users per km^2
    region: Region
    radius: float               # serving radius R, km
    cache_size: int             # M files per SBS
    catalog_size: int           # F files
    search_range: tuple[int, int] = (2, 12)
    file_length: float = 1.0

    def __post_init__(self):
        if self.sbs_density < 0 or self.user_density < 0:
            raise ValueError("densities must be >= 0")
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if not (1 <= self.cache_size <= self.catalog_size):
            raise ValueError(
                f"need 1 <= cache_size <= catalog_size, got M={self.cache_size}, F={self.catalog_size}"
            )
        lo, hi = self.search_range
        if not (2 <= lo <= hi):
            raise ValueError(f"bad search range {self.search_range}")


@dataclass(frozen=True)
class PopularityProfile:
    """One user's request distribution over the catalog."""

    user_id: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise ValueError("probs must be a vector")
        if p.min() < 0.0:
            raise ValueError(f"negative probability in profile {self.user_id}")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"profile {self.user_id} sums to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class PlantedScenario:
    """Ground-truth generator settings: who belongs where, and how biased.

    bias 0 removes all structure; bias 1 puts all mass on the preferred
    subset.  ``membership`` maps each user to its planted cluster and must be
    set before profile generation (use :meth:`random` to draw one).
    """

    cluster_count: int
    preferred: tuple                      # per-cluster file index arrays
    zipf_exponent: float
    bias: float
    membership: np.ndarray | None = None
    noise_sigma: float = 0.05

    def __post_init__(self):
        if not (0.0 <= self.bias <= 1.0):
            raise ValueError(f"bias must be in [0, 1], got {self.bias}")
        if self.cluster_count < 1 or len(self.preferred) != self.cluster_count:
            raise ValueError("need one preferred subset per planted cluster")
        subsets = tuple(np.asarray(s, dtype=np.intp) for s in self.preferred)
        for s in subsets:
            if s.size == 0:
                raise ValueError("empty preferred subset")
        object.__setattr__(self, "preferred", subsets)
        if self.membership is not None:
            m = np.asarray(self.membership, dtype=np.intp)
            if m.size and (m.min() < 0 or m.max() >= self.cluster_count):
                raise ValueError("membership labels out of range")
            object.__setattr__(self, "membership", m)

    @classmethod
    def random(
        cls,
        cluster_count: int,
        subset_size: int,
        catalog_size: int,
        n_users: int,
        seed,
        bias: float = 0.9,
        zipf_exponent: float = 0.5,
        noise_sigma: float = 0.05,
    ) -> "PlantedScenario":
        """Disjoint preferred subsets (first k*subset_size files, shuffled) and
        uniformly random membership."""
        if cluster_count * subset_size > catalog_size:
            raise ValueError("disjoint subsets need cluster_count * subset_size <= catalog_size")
        rng = np.random.default_rng(seed)
        files = rng.permutation(catalog_size)[: cluster_count * subset_size]
        preferred = tuple(
            files[c * subset_size : (c + 1) * subset_size] for c in range(cluster_count)
        )
        membership = rng.integers(0, cluster_count, size=n_users)
        return cls(cluster_count, preferred, zipf_exponent, bias, membership, noise_sigma)


def _zipf_base(subset: np.ndarray, exponent: float, catalog_size: int) -> np.ndarray:
    """Zipf weights over the subset (rank = position in the subset), 0 elsewhere."""
    if subset.max() >= catalog_size:
        raise ValueError("preferred subset outside catalog")
    w = (np.arange(1, subset.size + 1, dtype=float)) ** (-exponent)
    base = np.zeros(catalog_size)
    base[subset] = w / w.sum()
    return base


def generate_profiles(
    scenario: PlantedScenario, n_users: int, catalog_size: int, seed
) -> list[PopularityProfile]:
    """Synthesize one profile per user from the planted scenario.

    User u in planted cluster c gets

        bias * Zipf(exponent) over c's subset + (1 - bias) * background_u,

    where background_u is the uniform distribution under per-entry
    multiplicative noise exp(eps), eps ~ N(0, noise_sigma^2), renormalized.
    Restricting the noise to the background keeps the per-user variation
    spread isotropically over the whole catalog instead of riding the few
    large preferred-file entries, so within-cluster scatter carries no
    splittable low-dimensional structure of its own.
    """
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    if scenario.membership is None:
        raise ValueError("scenario has no membership; build it with PlantedScenario.random")
    if scenario.membership.size != n_users:
        raise ValueError(
            f"membership covers {scenario.membership.size} users, asked for {n_users}"
        )
    bases = np.stack(
        [_zipf_base(s, scenario.zipf_exponent, catalog_size) for s in scenario.preferred]
    )
    rng = np.random.default_rng(seed)
    if scenario.noise_sigma > 0.0:
        g = np.exp(rng.normal(0.0, scenario.noise_sigma, size=(n_users, catalog_size)))
        background = g / g.sum(axis=1, keepdims=True)
    else:
        background = np.full((n_users, catalog_size), 1.0 / catalog_size)
    probs = scenario.bias * bases[scenario.membership] + (1.0 - scenario.bias) * background
    probs /= probs.sum(axis=1, keepdims=True)
    return [PopularityProfile(u, probs[u]) for u in range(n_users)]


def as_matrix(profiles) -> np.ndarray:
    """(n_users, F) float matrix from a profile list (ndarray passes through)."""
    if isinstance(profiles, np.ndarray):
        return profiles
    return np.stack([p.probs for p in profiles])


def cluster_top_m(profiles, m: int) -> np.ndarray:
    """The m files with the largest mean popularity over the given profiles.

    Ties break toward the lower file index. Returned indices are sorted
    ascending (set semantics).
    """
    mat = as_matrix(profiles)
    if mat.shape[0] == 0:
        raise ValueError("empty profile subset")
    if m > mat.shape[1]:
        raise ValueError(f"m={m} exceeds catalog size {mat.shape[1]}")
    mean = mat.mean(axis=0)
    top = np.argsort(-mean, kind="stable")[:m]
    return np.sort(top)


def profiles_to_csv(profiles, path) -> None:
    """Rows = users, header = user_id plus file ids. Round-trip exact."""
    mat = as_matrix(profiles)
    ids = (
        [p.user_id for p in profiles]
        if not isinstance(profiles, np.ndarray)
        else list(range(mat.shape[0]))
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id"] + [f"f{i}" for i in range(mat.shape[1])])
        for uid, row in zip(ids, mat):
            writer.writerow([uid] + [repr(float(v)) for v in row])


def profiles_from_csv(path) -> list[PopularityProfile]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "user_id":
            raise ValueError(f"{path}: expected a profile CSV with a user_id column")
        out = []
        for row in reader:
            out.append(PopularityProfile(int(row[0]), np.array([float(v) for v in row[1:]])))
    if not out:
        raise ValueError(f"{path}: no profile rows")
    return out
