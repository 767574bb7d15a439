"""Mean Absolute Difference of Distances (MADD) over projected vectors.

The base distance between two projected vectors averages the bounded
kernel psi(t) = 1 - exp(-t) of coordinatewise absolute differences; the
MADD dissimilarity between two observations compares their base-distance
profiles against the rest of the dataset. A population-level analogue is
provided as a Monte-Carlo testing oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


def base_distance(v: np.ndarray, w: np.ndarray) -> float:
    """(1/M) sum_q (1 - exp(-|v_q - w_q|)); always in [0, 1)."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.ndim != 1 or v.shape != w.shape or v.size < 1:
        raise DataError("base_distance needs two equal-length vectors")
    return float(np.mean(1.0 - np.exp(-np.abs(v - w))))


def base_distance_matrix(P: np.ndarray, block_rows: int = 64) -> np.ndarray:
    """All pairwise base distances between the rows of an n x M matrix.

    Computed in row blocks to bound the n x block x M intermediate. The
    result is exactly symmetric with a zero diagonal.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2:
        raise DataError("expected an n x M matrix of projected vectors")
    n = P.shape[0]
    d = np.empty((n, n))
    for a in range(0, n, block_rows):
        b = min(a + block_rows, n)
        diff = np.abs(P[a:b, None, :] - P[None, :, :])
        d[a:b] = 1.0 - np.exp(-diff).mean(axis=2)
    np.fill_diagonal(d, 0.0)
    return d


def madd_from_distances(d: np.ndarray, block_rows: int = 32) -> np.ndarray:
    """MADD matrix from a precomputed base-distance matrix.

    rho(i, j) averages |d(i, u) - d(j, u)| over the n - 2 observations u
    other than i and j. Reusing the O(n^2) d-matrix keeps the whole
    computation at O(n^3) with small constants instead of O(n^3 M).
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise DataError("expected a square distance matrix")
    if n < 3:
        raise DataError("MADD needs n >= 3")
    rho = np.empty((n, n))
    for a in range(0, n, block_rows):
        b = min(a + block_rows, n)
        sums = np.abs(d[a:b, None, :] - d[None, :, :]).sum(axis=2)
        # the u = i and u = j terms each contribute d(i, j); remove both
        rho[a:b] = (sums - 2.0 * d[a:b]) / (n - 2)
    np.fill_diagonal(rho, 0.0)
    return rho


def madd_matrix(P: np.ndarray) -> np.ndarray:
    """MADD dissimilarity matrix of the rows of an n x M projected matrix."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] < 3:
        raise DataError("MADD needs n >= 3")
    return madd_from_distances(base_distance_matrix(P))


@dataclass(frozen=True)
class PopulationSpec:
    """Mixture description for the population MADD: sizes and the table of
    expected base distances dstar[a, b] between populations a and b."""

    sizes: tuple[int, ...]
    dstar: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        dstar = np.array(self.dstar, dtype=float)
        k = len(sizes)
        if k < 2:
            raise DataError("need at least two populations")
        if any(s < 2 for s in sizes):
            raise DataError("every population size must be >= 2")
        if dstar.shape != (k, k):
            raise DataError("dstar must be a K x K table")
        if not np.allclose(dstar, dstar.T, atol=1e-12):
            raise DataError("dstar must be symmetric")
        if dstar.min() < 0.0 or dstar.max() >= 1.0:
            raise DataError("dstar entries must lie in [0, 1)")
        dstar = 0.5 * (dstar + dstar.T)
        dstar.flags.writeable = False
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "dstar", dstar)


def population_madd(spec: PopulationSpec, a: int, b: int) -> float:
    """Population MADD between populations a and b (0-based indices).

    ((n_a - 1) |d*_ab - d*_aa| + (n_b - 1) |d*_ab - d*_bb|
     + sum_{c != a,b} n_c |d*_ac - d*_bc|) / (n - 2),
    evaluated verbatim with n = sum of the population sizes.
    """
    k = len(spec.sizes)
    if not (0 <= a < k and 0 <= b < k):
        raise DataError("population index out of range")
    if a == b:
        raise DataError("population indices must differ")
    n = sum(spec.sizes)
    d = spec.dstar
    total = (spec.sizes[a] - 1) * abs(d[a, b] - d[a, a])
    total += (spec.sizes[b] - 1) * abs(d[a, b] - d[b, b])
    for c in range(k):
        if c not in (a, b):
            total += spec.sizes[c] * abs(d[a, c] - d[b, c])
    return float(total / (n - 2))
