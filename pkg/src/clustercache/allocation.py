"""SBS fraction optimization: closed form from the KKT conditions plus
an independent concave maximizer used for cross-checking.

The objective per cluster is mass_k * (1 - exp(-x_k * A)) with A = sbs_density
* pi * R^2; it is concave and strictly increasing in every x_k, so the budget
sum(x) <= 1 is active at the optimum.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Allocation",
    "cluster_mass",
    "coverage_exponent",
    "hit_objective",
    "optimize_fractions",
    "numerical_oracle",
    "project_simplex",
    "allocation_to_csv",
]


@dataclass(frozen=True)
class Allocation:
    """Fraction of SBSs dedicated to each cluster, with solver diagnostics."""

    fractions: np.ndarray
    psi: np.ndarray
    mu: float
    method: str          # closed-form | projected | uniform-degenerate


def coverage_exponent(sbs_density: float, radius: float) -> float:
    """A = sbs_density * pi * R^2, the mean SBS count in a serving disc."""
    a = sbs_density * np.pi * radius * radius
    if a <= 0:
        raise ValueError("need sbs_density * pi * R^2 > 0")
    return float(a)


def cluster_mass(profiles, file_set) -> float:
    """Total probability mass all users place on the given file set."""
    from .profiles import as_matrix

    mat = as_matrix(profiles)
    idx = np.asarray(file_set, dtype=np.intp)
    if idx.size == 0:
        return 0.0
    if idx.size and idx.max() >= mat.shape[1]:
        raise ValueError("file set outside catalog")
    return float(mat[:, idx].sum())


def hit_objective(masses, fractions, coverage: float) -> float:
    """sum_k mass_k * (1 - exp(-x_k * A)); divide by n_users for probability units."""
    m = np.asarray(masses, dtype=float)
    x = np.asarray(fractions, dtype=float)
    return float(np.sum(m * (1.0 - np.exp(-x * coverage))))


def _closed_form(log_psi: np.ndarray, coverage: float) -> np.ndarray:
    n = log_psi.size
    return (n * log_psi - log_psi.sum() + coverage) / (n * coverage)


def optimize_fractions(masses, sbs_density: float, radius: float, n_users: int = 1) -> Allocation:
    """Closed-form optimal fractions, with active-set projection when needed.

    Zero-mass clusters are removed up front and pinned at 0. If the closed
    form over the remaining clusters yields a negative component, the most
    negative cluster is clamped to 0 and the closed form re-solved over the
    rest (water-filling style) until feasible.
    """
    masses = np.asarray(masses, dtype=float)
    if masses.ndim != 1 or masses.size < 1:
        raise ValueError("masses must be a non-empty vector")
    if (masses < 0).any():
        raise ValueError("negative cluster mass")
    a = coverage_exponent(sbs_density, radius)
    psi = a * masses

    if not psi.any():
        warnings.warn("all cluster masses are zero; objective is flat", stacklevel=2)
        n = masses.size
        return Allocation(np.full(n, 1.0 / n), psi, 0.0, "uniform-degenerate")

    active = np.flatnonzero(psi > 0.0)
    log_psi = np.log(psi[active])
    projected = False  # zero-mass removal alone does not count as a projection
    while True:
        x_active = _closed_form(log_psi, a)
        worst = int(np.argmin(x_active))
        if x_active[worst] >= 0.0:
            break
        projected = True
        keep = np.ones(active.size, dtype=bool)
        keep[worst] = False
        active = active[keep]
        log_psi = log_psi[keep]

    fractions = np.zeros(masses.size)
    fractions[active] = x_active
    # multiplier from the stationarity condition on any active cluster
    mu = float(psi[active[0]] * np.exp(-x_active[0] * a) / n_users)
    return Allocation(fractions, psi, mu, "projected" if projected else "closed-form")


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = 1} (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, v.size + 1) > 0)[0][-1]
    theta = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + theta, 0.0)


def numerical_oracle(
    masses,
    sbs_density: float,
    radius: float,
    tolerance: float = 1e-10,
    max_iter: int = 100_000,
) -> np.ndarray:
    """Maximize the hit objective over the simplex by accelerated projected
    gradient ascent. Intended as an independent check on the closed form.

    Convergence is declared when the projected-gradient step moves no
    component by more than ``tolerance``.
    """
    m = np.asarray(masses, dtype=float)
    if (m <= 0).any():
        raise ValueError("oracle expects strictly positive masses")
    a = coverage_exponent(sbs_density, radius)
    lipschitz = a * a * m.max()
    step = 1.0 / lipschitz

    x = np.full(m.size, 1.0 / m.size)
    y = x.copy()
    t = 1.0
    f = lambda z: hit_objective(m, z, a)
    f_x = f(x)
    for _ in range(max_iter):
        cand = project_simplex(y + step * (m * a * np.exp(-y * a)))
        f_cand = f(cand)
        if f_cand < f_x:
            # momentum overshot: a plain 1/L step from x cannot decrease f
            cand = project_simplex(x + step * (m * a * np.exp(-x * a)))
            f_cand = f(cand)
            t = 1.0
        moved = np.max(np.abs(cand - x))
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = cand + ((t - 1.0) / t_new) * (cand - x)
        x, f_x, t = cand, f_cand, t_new
        if moved <= tolerance:
            return x
    warnings.warn(f"oracle did not converge to {tolerance} in {max_iter} iterations", stacklevel=2)
    return x


def allocation_to_csv(alloc: Allocation, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster_id", "psi", "fraction", "method"])
        for k, (p, x) in enumerate(zip(alloc.psi, alloc.fractions)):
            writer.writerow([k, repr(float(p)), repr(float(x)), alloc.method])
