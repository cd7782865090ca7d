"""Spherical-Gaussian likelihood scoring and AIC model selection for clusterings."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .profiles import as_matrix

__all__ = [
    "ModelScore",
    "VARIANCE_FLOOR",
    "log_likelihood",
    "gaussian_log_likelihood",
    "aic",
    "select_model",
    "trace_to_csv",
]

# keeps singleton / identical clusters from producing -inf likelihoods
VARIANCE_FLOOR = 1e-12
# a collapsed cluster is also floored at this fraction of the model's pooled
# dispersion; without it a singleton's near-zero variance mints unbounded
# density ((F/2)*log(sigma^2/1e-12) per point) and the criterion would keep
# falling with every split instead of turning at the true cluster count
RELATIVE_VARIANCE_FLOOR = 0.5


@dataclass(frozen=True)
class ModelScore:
    """Criterion value for one candidate cluster count (lower aic is better)."""

    cluster_count: int
    parameter_count: int
    log_likelihood: float
    aic: float
    n_users: int
    degenerate_clusters: tuple = ()

    @property
    def aic_normalized(self) -> float:
        return self.aic / self.n_users


def _cluster_stats(users: np.ndarray, assignment: np.ndarray, centroids: np.ndarray):
    n_clusters = centroids.shape[0]
    counts = np.bincount(assignment, minlength=n_clusters)
    if (counts == 0).any():
        raise ValueError("log-likelihood of a model with empty clusters is undefined")
    diff = users - centroids[assignment]
    sq = np.einsum("uf,uf->u", diff, diff)
    ss = np.bincount(assignment, weights=sq, minlength=n_clusters)
    return counts, ss


def gaussian_log_likelihood(
    profiles,
    assignment,
    centroids,
    paper_exact: bool = False,
    relative_floor: float = RELATIVE_VARIANCE_FLOOR,
):
    """Classification log-likelihood of profiles under spherical per-cluster Gaussians.

    Per user u in cluster k:

        -(F/2) log(2 pi sigma_k^2) - ||P_u - c_k||^2 / (2 sigma_k^2) + log(N_k / N_u)

    summed per cluster in closed form. sigma_k^2 is floored at
    max(VARIANCE_FLOOR, relative_floor * pooled dispersion of the model);
    pass relative_floor=0 for the bare absolute floor. ``paper_exact=True``
    switches to the alternative per-cluster expression

        -(N_k/2) (log(2 pi) - 1 + 2 log(N_k/N_u) - F log(sigma_k^2))

    which is retained verbatim for comparison; note it increases with the
    variance, so it is not used for selection by default.

    Returns (value, tuple of clusters whose variance hit the floor).
    """
    users = as_matrix(profiles)
    centroids = np.atleast_2d(np.asarray(centroids, dtype=float))
    if centroids.shape[1] != users.shape[1]:
        raise ValueError(
            f"centroid length {centroids.shape[1]} != profile length {users.shape[1]}"
        )
    assignment = np.asarray(assignment, dtype=np.intp)
    n_users, n_files = users.shape
    counts, ss = _cluster_stats(users, assignment, centroids)
    floor = max(VARIANCE_FLOOR, relative_floor * ss.sum() / n_users)
    var = np.maximum(ss / counts, floor)
    degenerate = tuple(np.flatnonzero(ss / counts < floor).tolist())
    weight = counts * np.log(counts / n_users)
    if paper_exact:
        value = np.sum(
            -(counts / 2.0)
            * (np.log(2.0 * np.pi) - 1.0 + 2.0 * np.log(counts / n_users) - n_files * np.log(var))
        )
    else:
        value = np.sum(
            -(counts * n_files / 2.0) * np.log(2.0 * np.pi * var)
            - ss / (2.0 * var)
            + weight
        )
    return float(value), degenerate


def log_likelihood(model, profiles, paper_exact: bool = False) -> float:
    """Log-likelihood of a fitted ClusterModel (see gaussian_log_likelihood)."""
    value, _ = gaussian_log_likelihood(profiles, model.assignment, model.centroids, paper_exact)
    return value


def aic(model, profiles, paper_exact: bool = False) -> ModelScore:
    """Score a fitted model: 2 * parameters - 2 * log-likelihood.

    A model with i clusters over an F-file catalog has i * (F + 1) estimable
    parameters (i * F centroid coordinates plus i variances).
    """
    users = as_matrix(profiles)
    value, degenerate = gaussian_log_likelihood(
        users, model.assignment, model.centroids, paper_exact
    )
    k = model.cluster_count * (users.shape[1] + 1)
    return ModelScore(
        cluster_count=model.cluster_count,
        parameter_count=k,
        log_likelihood=value,
        aic=2.0 * k - 2.0 * value,
        n_users=users.shape[0],
        degenerate_clusters=degenerate,
    )


def select_model(scores) -> ModelScore:
    """Minimal-aic score; ties go to the smaller cluster count."""
    scores = list(scores)
    if not scores:
        raise ValueError("no scores to select from")
    return min(scores, key=lambda s: (s.aic, s.cluster_count))


def trace_to_csv(scores, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster_count", "k_i", "log_likelihood", "aic", "aic_normalized"])
        for s in scores:
            writer.writerow(
                [
                    s.cluster_count,
                    s.parameter_count,
                    repr(float(s.log_likelihood)),
                    repr(float(s.aic)),
                    repr(float(s.aic_normalized)),
                ]
            )
