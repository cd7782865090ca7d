"""Adaptive popularity clustering: correlation k-means grown by splitting.

The loop alternates correlation-maximizing assignment with center-of-mass
updates, then grows the model one cluster at a time by re-seeding from the
most dispersed cluster's outlier, scoring every size with an information
criterion and keeping the argmin.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from . import model_selection
from .profiles import as_matrix

__all__ = [
    "ClusterModel",
    "assign_users",
    "update_centroids",
    "iterate_to_convergence",
    "split_worst_cluster",
    "adaptive_cluster",
    "adjusted_rand_index",
    "clusters_to_csv",
    "centroids_to_csv",
]

MAX_ITERATIONS = 100
# hard cap on how far the search extends past the requested maximum
EXTENSION_STEP = 5
EXTENSION_FACTOR = 4


@dataclass(frozen=True)
class ClusterModel:
    """A fitted clustering: assignment, per-cluster means, counts, variances.

    variances[k] is the mean squared distance of members to their centroid.
    """

    cluster_count: int
    assignment: np.ndarray       # (n_users,) int
    centroids: np.ndarray        # (cluster_count, F)
    counts: np.ndarray           # (cluster_count,) int
    variances: np.ndarray        # (cluster_count,)
    converged: bool = True
    n_iterations: int = 0


def _correlation_scores(users: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Pearson correlation of every user row against every centroid row.

    A constant vector has no defined correlation; any pair touching one is
    scored by negative Euclidean distance instead so the argmax still ranks
    closeness.
    """
    uc = users - users.mean(axis=1, keepdims=True)
    cc = centroids - centroids.mean(axis=1, keepdims=True)
    un = np.linalg.norm(uc, axis=1)
    cn = np.linalg.norm(cc, axis=1)
    denom = np.outer(un, cn)
    with np.errstate(invalid="ignore", divide="ignore"):
        scores = (uc @ cc.T) / denom
    bad = denom == 0.0
    if bad.any():
        diff = users[:, None, :] - centroids[None, :, :]
        dist = np.sqrt(np.einsum("ukf,ukf->uk", diff, diff))
        scores = np.where(bad, -dist, scores)
    return scores


def assign_users(profiles, centroids: np.ndarray) -> np.ndarray:
    """Map each user to the centroid maximizing Pearson correlation.

    Ties break to the lowest cluster index.
    """
    users = as_matrix(profiles)
    centroids = np.atleast_2d(np.asarray(centroids, dtype=float))
    if centroids.shape[0] < 1:
        raise ValueError("need at least one centroid")
    if centroids.shape[1] != users.shape[1]:
        raise ValueError(
            f"centroid length {centroids.shape[1]} != catalog size {users.shape[1]}"
        )
    return np.argmax(_correlation_scores(users, centroids), axis=1)


def _repair_empty(users, assignment, n_clusters, prev_centroids, counts):
    """Give each empty cluster the user farthest from its previous centroid.

    Donor clusters must keep at least one member; a user can only be stolen
    once per repair pass.
    """
    assignment = assignment.copy()
    taken = np.zeros(users.shape[0], dtype=bool)
    for k in np.flatnonzero(counts == 0):
        dist = np.linalg.norm(users - prev_centroids[k], axis=1)
        order = np.argsort(-dist, kind="stable")
        for u in order:
            donor = assignment[u]
            if not taken[u] and counts[donor] > 1:
                assignment[u] = k
                counts[donor] -= 1
                counts[k] += 1
                taken[u] = True
                break
        else:
            raise ValueError("cannot repair empty cluster: no spare users")
    return assignment


def update_centroids(profiles, assignment, n_clusters: int, prev_centroids=None) -> ClusterModel:
    """Recompute means, counts and variances for a fixed assignment.

    An empty cluster is an error unless ``prev_centroids`` is given, in which
    case it is re-seeded with the globally farthest user from its previous
    centroid.
    """
    users = as_matrix(profiles)
    assignment = np.asarray(assignment, dtype=np.intp)
    counts = np.bincount(assignment, minlength=n_clusters)
    if (counts == 0).any():
        if prev_centroids is None:
            raise ValueError(f"empty clusters {np.flatnonzero(counts == 0).tolist()}")
        assignment = _repair_empty(users, assignment, n_clusters, np.asarray(prev_centroids), counts)

    centroids = np.zeros((n_clusters, users.shape[1]))
    np.add.at(centroids, assignment, users)
    centroids /= counts[:, None]
    sq = np.einsum("uf,uf->u", users - centroids[assignment], users - centroids[assignment])
    variances = np.bincount(assignment, weights=sq, minlength=n_clusters) / counts
    return ClusterModel(n_clusters, assignment, centroids, counts, variances)


def iterate_to_convergence(profiles, initial_centroids, max_iter: int = MAX_ITERATIONS) -> ClusterModel:
    """Alternate assignment and centroid updates until stable.

    Stable means the assignment repeats, or the centroid update is an exact
    no-op (already at a fixed point). Hitting the iteration cap is not an
    error; the returned model is flagged converged=False.
    """
    users = as_matrix(profiles)
    centroids = np.atleast_2d(np.asarray(initial_centroids, dtype=float))
    n_clusters = centroids.shape[0]
    prev = None
    model = None
    for it in range(1, max_iter + 1):
        assignment = assign_users(users, centroids)
        model = update_centroids(users, assignment, n_clusters, prev_centroids=centroids)
        stable = np.array_equal(model.centroids, centroids) or (
            prev is not None and np.array_equal(model.assignment, prev)
        )
        centroids = model.centroids
        if stable:
            return ClusterModel(
                n_clusters, model.assignment, model.centroids, model.counts,
                model.variances, converged=True, n_iterations=it,
            )
        prev = model.assignment
    warnings.warn(f"assignment still moving after {max_iter} iterations", stacklevel=2)
    return ClusterModel(
        n_clusters, model.assignment, model.centroids, model.counts,
        model.variances, converged=False, n_iterations=max_iter,
    )


def split_worst_cluster(model: ClusterModel, profiles) -> np.ndarray:
    """Add a centroid at the outlier of the most dispersed cluster.

    Choice of cluster: largest variance; all-zero variances fall back to the
    largest member count (degenerate data). The new centroid is the member
    profile farthest from that cluster's centroid, skipping profiles already
    present as centroids where possible.
    """
    users = as_matrix(profiles)
    if model.variances.max() > 0.0:
        worst = int(np.argmax(model.variances))
    else:
        worst = int(np.argmax(model.counts))
        warnings.warn("all clusters have zero variance; splitting the largest", stacklevel=2)
    members = np.flatnonzero(model.assignment == worst)
    dist = np.linalg.norm(users[members] - model.centroids[worst], axis=1)
    order = members[np.argsort(-dist, kind="stable")]
    pick = order[0]
    is_dup = lambda u: any(np.array_equal(users[u], c) for c in model.centroids)
    if is_dup(pick):
        for u in order[1:]:
            if not is_dup(u):
                pick = u
                break
        else:
            warnings.warn("every member duplicates an existing centroid", stacklevel=2)
    return np.vstack([model.centroids, users[pick]])


def adaptive_cluster(profiles, search_range, seed, paper_exact: bool = False):
    """Grow from the low end of the range, score each size, keep the best.

    Initial centroids are distinct users sampled uniformly. Centroids are
    inherited across splits. If the criterion is still decreasing at the top
    of the range, the search extends in steps of 5 up to
    min(n_users, 4 * upper bound).

    Returns (best ClusterModel, list of ModelScore for every size tried).
    """
    users = as_matrix(profiles)
    n_users = users.shape[0]
    lo, hi = int(search_range[0]), int(search_range[1])
    if not (lo <= hi):
        raise ValueError(f"bad search range {search_range}")
    if hi > n_users:
        raise ValueError(f"search upper bound {hi} exceeds {n_users} users")
    rng = np.random.default_rng(seed)
    centroids = users[rng.choice(n_users, size=lo, replace=False)].copy()

    hard_cap = min(n_users, EXTENSION_FACTOR * hi)
    current_max = hi
    trace: list = []
    best_model = None
    best_aic = np.inf
    size = lo
    while True:
        model = iterate_to_convergence(users, centroids)
        score = model_selection.aic(model, users, paper_exact=paper_exact)
        trace.append(score)
        if score.aic < best_aic:
            best_aic = score.aic
            best_model = model
        if size == current_max:
            # a single-point search has no observable decrease
            still_decreasing = len(trace) >= 2 and best_model is model
            if still_decreasing and current_max < hard_cap:
                current_max = min(current_max + EXTENSION_STEP, hard_cap)
            else:
                if still_decreasing:
                    warnings.warn(
                        f"criterion still decreasing at the extension cap {current_max}",
                        stacklevel=2,
                    )
                break
        centroids = split_worst_cluster(model, users)
        size += 1
    return best_model, trace


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two partitions of the same items."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ValueError("label arrays differ in length")
    n = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    comb = lambda x: x * (x - 1) / 2.0
    sum_ij = comb(table).sum()
    sum_a = comb(table.sum(axis=1)).sum()
    sum_b = comb(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / comb(n)
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


def clusters_to_csv(model: ClusterModel, path) -> None:
    """One row per user: (user_id, cluster_id)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "cluster_id"])
        for uid, k in enumerate(model.assignment):
            writer.writerow([uid, int(k)])


def centroids_to_csv(model: ClusterModel, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster_id"] + [f"f{i}" for i in range(model.centroids.shape[1])])
        for k, row in enumerate(model.centroids):
            writer.writerow([k] + [repr(float(v)) for v in row])
