"""Cluster-wise centering and pooled covariance eigenpairs.

Regular data use empirical means and covariances on the common grid.
Irregular and fragmented data go through a smoothing path in the spirit of
PACE: Nadaraya-Watson estimates of the cluster means and of the covariance
surface from raw residual cross-products, with the same-time products
excluded so measurement error cannot contaminate the diagonal.

Either path ends in the same discretized eigenproblem: the covariance
matrix is symmetrized, weighted by trapezoid quadrature weights
(W^(1/2) C W^(1/2)), and decomposed so that the eigenfunctions come out
orthonormal in the L2 inner product rather than the Euclidean one.
Eigenvalues are clipped at zero and the smallest leading set whose
cumulative share reaches the variance cutoff is retained.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dataset import FunctionalDataset, Grid, Partition, Regime, uniform_grid
from .errors import DataError, DegenerateError
from .quadrature import interpolate_rows, trapezoid_weights
from .sampling import EigenSystem


@dataclass(frozen=True)
class ClusterMeans:
    """One estimated mean curve per cluster, on a common output grid."""

    grid: Grid
    means: np.ndarray  # shape (k, grid length)

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        if means.ndim != 2 or means.shape[1] != len(self.grid):
            raise DataError("means must have shape (k, grid length)")
        object.__setattr__(self, "means", means)


@dataclass(frozen=True)
class SmootherConfig:
    """Knobs for the smoothing path.

    Bandwidths accept "auto", which applies the rule of thumb
    h = 1.06 * sd(times) * m^(-1/5) on the pooled observation times.
    """

    grid_size: int = 101
    mean_bandwidth: Union[float, str] = "auto"
    cov_bandwidth: Union[float, str] = "auto"

    def __post_init__(self):
        if self.grid_size < 2:
            raise DataError("output grid needs at least two points")
        for name in ("mean_bandwidth", "cov_bandwidth"):
            value = getattr(self, name)
            if isinstance(value, str):
                if value != "auto":
                    raise DataError(f"{name} must be positive or 'auto'")
            elif value <= 0:
                raise DataError(f"{name} must be positive or 'auto'")


def _rule_of_thumb(times: np.ndarray) -> float:
    sd = float(np.std(times))
    if sd <= 0.0:
        raise DataError("bandwidth too small: zero spread in observation times")
    return 1.06 * sd * times.size ** (-0.2)


def _bandwidth(setting, times: np.ndarray) -> float:
    return _rule_of_thumb(times) if setting == "auto" else float(setting)


def _check_cluster_sizes(partition: Partition):
    if partition.sizes.min() < 2:
        raise DegenerateError("cluster too small for covariance")


def eigensystem_from_covariance(
    grid: Grid, cov: np.ndarray, variance_cutoff: float = 0.99
) -> EigenSystem:
    """Quadrature-weighted eigendecomposition of a covariance matrix.

    Solves the symmetrized W^(1/2) C W^(1/2) problem, maps eigenvectors
    back through W^(-1/2), clips eigenvalues at zero, and keeps the
    smallest leading set with cumulative share >= `variance_cutoff`.
    """
    cov = np.asarray(cov, dtype=float)
    g = len(grid)
    if cov.shape != (g, g):
        raise DataError("covariance matrix must match the grid")
    if not (0.0 < variance_cutoff <= 1.0):
        raise DataError("variance_cutoff must be in (0, 1]")
    cov = 0.5 * (cov + cov.T)
    w = trapezoid_weights(grid.points)
    s = np.sqrt(w)
    B = s[:, None] * cov * s[None, :]
    B = 0.5 * (B + B.T)
    lam, vecs = np.linalg.eigh(B)
    order = np.argsort(lam)[::-1]
    lam = np.clip(lam[order], 0.0, None)
    funcs = (vecs[:, order] / s[:, None]).T
    total = lam.sum()
    if total <= 0.0:
        # degenerate operator: keep one zero eigenpair, sampling will refuse it
        return EigenSystem(grid, lam[:1], funcs[:1])
    shares = np.cumsum(lam)
    j = int(np.searchsorted(shares, variance_cutoff * total, side="left")) + 1
    j = min(j, lam.size)
    return EigenSystem(grid, lam[:j], funcs[:j])


def pooled_eigenpairs_regular(
    data: FunctionalDataset, partition: Partition, variance_cutoff: float = 0.99
) -> tuple[ClusterMeans, EigenSystem]:
    """Empirical pooled eigenpairs on the common grid of regular data.

    Curves are centered at their cluster's pointwise mean and pooled with
    cluster-size weights: C = (1/n) sum_i centered_i outer centered_i,
    which equals estimating the covariance of the combined centered sample.
    """
    if data.regime is not Regime.REGULAR:
        raise DataError("pooled_eigenpairs_regular needs regular data")
    if len(partition) != data.n:
        raise DataError("partition length must match the dataset")
    _check_cluster_sizes(partition)
    grid = data.common_grid
    X = data.values_matrix()
    means = np.empty((partition.k, len(grid)))
    for r in range(1, partition.k + 1):
        means[r - 1] = X[partition.members(r)].mean(axis=0)
    centered = X - means[partition.labels - 1]
    cov = centered.T @ centered / data.n
    system = eigensystem_from_covariance(grid, cov, variance_cutoff)
    return ClusterMeans(grid, means), system


def _nw_mean(times, values, out_points, h):
    """Nadaraya-Watson estimate of a mean curve from pooled points."""
    u = (out_points[:, None] - times[None, :]) / h
    kern = np.exp(-0.5 * u * u)
    den = kern.sum(axis=1)
    if den.min() <= 0.0:
        raise DataError("bandwidth too small: empty kernel window at an output point")
    return (kern @ values) / den


def _check_coverage(all_times: np.ndarray, out_points: np.ndarray):
    step = out_points[1] - out_points[0]
    t = np.sort(all_times)
    pos = np.searchsorted(t, out_points)
    left = np.abs(out_points - t[np.clip(pos - 1, 0, t.size - 1)])
    right = np.abs(t[np.clip(pos, 0, t.size - 1)] - out_points)
    nearest = np.minimum(left, right)
    if nearest.max() > step + 1e-12:
        raise DataError(
            "domain not covered: pooled observation times leave a gap wider "
            "than one output-grid step"
        )


def pooled_eigenpairs_irregular(
    data: FunctionalDataset,
    partition: Partition,
    cfg: SmootherConfig = SmootherConfig(),
    variance_cutoff: float = 0.99,
) -> tuple[ClusterMeans, EigenSystem]:
    """Smoothing-based pooled eigenpairs for irregular or fragmented data.

    Per-cluster means are Nadaraya-Watson smoothers of the cluster's pooled
    (time, value) points on the output grid. Curves are centered at their
    own observation times against the interpolated cluster mean, and the
    covariance surface is smoothed from the raw cross-products
    residual_i(t_j) * residual_i(t_l) with j != l.
    """
    if data.regime is Regime.REGULAR:
        raise DataError("pooled_eigenpairs_irregular expects irregular or fragmented data")
    if len(partition) != data.n:
        raise DataError("partition length must match the dataset")
    _check_cluster_sizes(partition)
    out = uniform_grid(cfg.grid_size)
    out_points = out.points

    all_times = np.concatenate([c.grid.points for c in data.curves])
    _check_coverage(all_times, out_points)

    means = np.empty((partition.k, cfg.grid_size))
    for r in range(1, partition.k + 1):
        members = partition.members(r)
        times = np.concatenate([data.curves[i].grid.points for i in members])
        values = np.concatenate([data.curves[i].values for i in members])
        means[r - 1] = _nw_mean(times, values, out_points, _bandwidth(cfg.mean_bandwidth, times))

    h = _bandwidth(cfg.cov_bandwidth, all_times)
    g = cfg.grid_size
    num = np.zeros((g, g))
    den = np.zeros((g, g))
    for i, curve in enumerate(data.curves):
        t = curve.grid.points
        mean_at_t = interpolate_rows(out_points, means[partition.labels[i] - 1], t)
        resid = curve.values - mean_at_t
        u = (out_points[None, :] - t[:, None]) / h
        kern = np.exp(-0.5 * u * u)  # m_i x g
        kr = kern.T @ resid
        k1 = kern.sum(axis=0)
        num += np.outer(kr, kr) - kern.T @ (resid[:, None] ** 2 * kern)
        den += np.outer(k1, k1) - kern.T @ kern
    if den.min() <= 0.0 or not np.all(np.isfinite(num / np.where(den > 0, den, 1.0))):
        raise DataError("bandwidth too small: empty kernel window at an output point")
    cov = num / den
    system = eigensystem_from_covariance(out, cov, variance_cutoff)
    return ClusterMeans(out, means), system
