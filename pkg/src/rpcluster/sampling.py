"""Random projection directions drawn from zero-mean Gaussian processes.

Six prespecified families are supported (Brownian motion, Brownian bridge,
Haar- and Fourier-basis processes with polynomial or exponential weight
decay), plus Karhunen-Loeve sampling from an estimated eigensystem.
Sampling is driven by counter-based splittable seeds so that draws are
reproducible regardless of execution order or parallel scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .dataset import Curve, Grid
from .errors import DataError, DegenerateError
from .quadrature import trapezoid_weights


@dataclass(frozen=True)
class SeedSpec:
    """A master seed plus a stream path identifying one random stream.

    Equal (master, path) pairs give bit-identical draws, so streams can be
    assigned per (family, projection-count index, replicate, direction) and
    consumed in any order without coordination.
    """

    master: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def child(self, *indices: int) -> "SeedSpec":
        return SeedSpec(self.master, self.path + tuple(int(i) for i in indices))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of an estimated covariance operator on a common grid.

    Eigenvalues are sorted non-increasing and clipped at zero; the rows of
    `functions` must be orthonormal in the trapezoid-weighted L2 inner
    product (within 1e-6), which is what the discretized eigensolver in
    :mod:`rpcluster.covariance` produces.
    """

    grid: Grid
    eigenvalues: np.ndarray
    functions: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float).copy()
        funcs = np.asarray(self.functions, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise DataError("eigenvalues must be a non-empty 1-d array")
        if funcs.shape != (lam.size, len(self.grid)):
            raise DataError("functions must have shape (n_eigenpairs, grid length)")
        if np.any(np.diff(lam) > 1e-12):
            raise DataError("eigenvalues must be sorted non-increasing")
        if lam.min() < -1e-10:
            raise DataError(f"eigenvalue {lam.min()} is too negative to clip")
        lam = np.clip(lam, 0.0, None)
        w = trapezoid_weights(self.grid.points)
        gram = (funcs * w) @ funcs.T
        if np.max(np.abs(gram - np.eye(lam.size))) > 1e-6:
            raise DataError("eigenfunctions are not L2-orthonormal on their grid")
        lam.flags.writeable = False
        funcs = np.array(funcs)
        funcs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "functions", funcs)

    @property
    def eigenfunctions(self) -> tuple[Curve, ...]:
        return tuple(Curve(self.grid, f) for f in self.functions)


@dataclass(frozen=True)
class BrownianMotion:
    """Standard Brownian motion, simulated by exact increments."""

    label: ClassVar[str] = "bm"


@dataclass(frozen=True)
class BrownianBridge:
    """Standard Brownian bridge BM(t) - t * BM(1)."""

    label: ClassVar[str] = "bb"


@dataclass(frozen=True)
class HaarPoly:
    """Haar-basis process with polynomial weight (2^j + k)^(-alpha/2)."""

    alpha: float = 2.0
    j_max: int = 4
    label: ClassVar[str] = "haar-poly"

    def __post_init__(self):
        if self.alpha <= 0 or self.j_max < 0:
            raise DataError("HaarPoly requires alpha > 0 and j_max >= 0")

    def weight(self, j: int, k: int) -> float:
        return float((2.0**j + k) ** (-self.alpha / 2.0))


@dataclass(frozen=True)
class HaarExp:
    """Haar-basis process with weight exp(-(2^j + k^2) / 20000)."""

    j_max: int = 4
    label: ClassVar[str] = "haar-exp"

    def __post_init__(self):
        if self.j_max < 0:
            raise DataError("HaarExp requires j_max >= 0")

    def weight(self, j: int, k: int) -> float:
        return float(np.exp(-(2.0**j + k**2) / 20000.0))


@dataclass(frozen=True)
class FourierPoly:
    """Fourier process with weight k^(-alpha/2) on sin and cos terms."""

    alpha: float = 2.0
    k_max: int = 40
    label: ClassVar[str] = "fourier-poly"

    def __post_init__(self):
        if self.alpha <= 0 or self.k_max < 1:
            raise DataError("FourierPoly requires alpha > 0 and k_max >= 1")

    def weight(self, k: int) -> float:
        return float(k ** (-self.alpha / 2.0))


@dataclass(frozen=True)
class FourierExp:
    """Fourier process with weight exp(-k^2 / 20000)."""

    k_max: int = 40
    label: ClassVar[str] = "fourier-exp"

    def __post_init__(self):
        if self.k_max < 1:
            raise DataError("FourierExp requires k_max >= 1")

    def weight(self, k: int) -> float:
        return float(np.exp(-(k**2) / 20000.0))


@dataclass(frozen=True)
class EstimatedKL:
    """Data-driven family: Karhunen-Loeve sampling from estimated eigenpairs."""

    system: EigenSystem
    label: ClassVar[str] = "estimated"


ProjectionFamily = Union[
    BrownianMotion, BrownianBridge, HaarPoly, HaarExp, FourierPoly, FourierExp, EstimatedKL
]


def default_families() -> tuple[ProjectionFamily, ...]:
    """The six prespecified families with their default parameters."""
    return (
        BrownianMotion(),
        BrownianBridge(),
        HaarPoly(),
        HaarExp(),
        FourierPoly(),
        FourierExp(),
    )


FAMILY_LABELS = {fam.label: fam for fam in default_families()}


def haar_indices(j_max: int) -> list[tuple[int, int]]:
    """Index pairs (j, k) with j = 0..j_max, k = 1..2^j, in expansion order."""
    return [(j, k) for j in range(j_max + 1) for k in range(1, 2**j + 1)]


def haar_basis(j_max: int, t: np.ndarray) -> np.ndarray:
    """L2-normalized Haar system evaluated at `t`, one row per (j, k).

    psi_{j,k} = 2^(j/2) * (1 on [(k-1)/2^j, (k-1/2)/2^j) minus
    1 on [(k-1/2)/2^j, k/2^j)).
    """
    rows = np.zeros((len(haar_indices(j_max)), t.size))
    for row, (j, k) in enumerate(haar_indices(j_max)):
        scale = 2.0 ** (j / 2.0)
        lo = (k - 1.0) / 2.0**j
        mid = (k - 0.5) / 2.0**j
        hi = k / 2.0**j
        rows[row] = scale * (
            ((t >= lo) & (t < mid)).astype(float) - ((t >= mid) & (t < hi)).astype(float)
        )
    return rows


def fourier_basis(k_max: int, t: np.ndarray) -> np.ndarray:
    """Rows sin(2 pi k t) for k = 1..k_max followed by the matching cos rows."""
    k = np.arange(1, k_max + 1)[:, None]
    arg = 2.0 * np.pi * k * t[None, :]
    return np.vstack([np.sin(arg), np.cos(arg)])


def _coefficient_weights(family: ProjectionFamily) -> np.ndarray:
    if isinstance(family, (HaarPoly, HaarExp)):
        return np.array([family.weight(j, k) for j, k in haar_indices(family.j_max)])
    if isinstance(family, (FourierPoly, FourierExp)):
        w = np.array([family.weight(k) for k in range(1, family.k_max + 1)])
        return np.concatenate([w, w])
    raise DataError(f"family {family!r} has no coefficient weights")


def _bm_values(rng: np.random.Generator, t: np.ndarray) -> np.ndarray:
    has_origin = t[0] == 0.0
    aug = t if has_origin else np.concatenate(([0.0], t))
    steps = np.sqrt(np.diff(aug)) * rng.standard_normal(aug.size - 1)
    path = np.concatenate(([0.0], np.cumsum(steps)))
    return path if has_origin else path[1:]


def _bb_values(rng: np.random.Generator, t: np.ndarray) -> np.ndarray:
    aug = t
    start = 0
    if aug[0] != 0.0:
        aug = np.concatenate(([0.0], aug))
        start = 1
    if aug[-1] != 1.0:
        aug = np.concatenate((aug, [1.0]))
    bm = _bm_values(rng, aug)
    bridge = bm - aug * bm[-1]
    return bridge[start : start + t.size]


def _basis_and_weights(family: ProjectionFamily, t: np.ndarray):
    if isinstance(family, (HaarPoly, HaarExp)):
        return haar_basis(family.j_max, t), _coefficient_weights(family)
    return fourier_basis(family.k_max, t), _coefficient_weights(family)


def sample_paths(
    family: ProjectionFamily, grid: Grid, count: int, seed: SeedSpec
) -> np.ndarray:
    """`count` independent realizations on `grid`, one row per direction.

    Direction q consumes the stream `seed.child(q)`, so
    `sample_paths(...)[q]` equals `sample_path(family, grid, seed.child(q))`
    and adding directions never perturbs earlier ones.
    """
    if count < 1:
        raise DataError("count must be >= 1")
    t = grid.points
    if isinstance(family, (BrownianMotion, BrownianBridge)):
        draw = _bm_values if isinstance(family, BrownianMotion) else _bb_values
        out = np.empty((count, t.size))
        for q in range(count):
            out[q] = draw(seed.child(q).generator(), t)
        return out
    if isinstance(family, EstimatedKL):
        if grid != family.system.grid:
            raise DataError("estimated family paths live on the eigensystem grid")
        return kl_path_matrix(family.system, count, seed)
    basis, weights = _basis_and_weights(family, t)
    coeffs = np.empty((count, weights.size))
    for q in range(count):
        coeffs[q] = seed.child(q).generator().standard_normal(weights.size)
    return (coeffs * weights) @ basis


def sample_path(family: ProjectionFamily, grid: Grid, seed: SeedSpec) -> Curve:
    """One realization of the family evaluated at the grid points.

    Brownian paths are simulated by exact Gaussian increments with variance
    equal to the grid spacing (a virtual origin, and for the bridge a
    virtual endpoint at t = 1, are inserted when the grid lacks them), so
    the finite-dimensional distributions are exact rather than truncated.
    """
    t = grid.points
    rng = seed.generator()
    if isinstance(family, BrownianMotion):
        return Curve(grid, _bm_values(rng, t))
    if isinstance(family, BrownianBridge):
        return Curve(grid, _bb_values(rng, t))
    if isinstance(family, EstimatedKL):
        system = family.system
        if grid != system.grid:
            raise DataError("estimated family paths live on the eigensystem grid")
        root = np.sqrt(system.eigenvalues)
        xi = rng.standard_normal(root.size)
        return Curve(grid, (xi * root) @ system.functions)
    basis, weights = _basis_and_weights(family, t)
    coeffs = rng.standard_normal(weights.size)
    return Curve(grid, (coeffs * weights) @ basis)


def kl_path_matrix(system: EigenSystem, count: int, seed: SeedSpec) -> np.ndarray:
    """Karhunen-Loeve sample matrix (count x grid length) from `system`.

    Path q is sum_j sqrt(lambda_j) xi_{j,q} phi_j with xi i.i.d. standard
    normal drawn from `seed.child(q)`. Every retained eigenpair is used;
    truncation is the covariance estimator's responsibility.
    """
    if count < 1:
        raise DataError("count must be >= 1")
    lam = system.eigenvalues
    if lam.max() <= 0.0:
        raise DegenerateError("degenerate covariance: no positive eigenvalue")
    root = np.sqrt(lam)
    coeffs = np.empty((count, lam.size))
    for q in range(count):
        coeffs[q] = seed.child(q).generator().standard_normal(lam.size)
    return (coeffs * root) @ system.functions


def sample_kl(system: EigenSystem, count: int, seed: SeedSpec) -> list[Curve]:
    """`count` i.i.d. Karhunen-Loeve paths on the system's grid."""
    values = kl_path_matrix(system, count, seed)
    return [Curve(system.grid, v) for v in values]


def whitened_path_matrix(
    system: EigenSystem, count: int, seed: SeedSpec, floor_ratio: float = 1e-10
) -> np.ndarray:
    """Variance-equalizing direction matrix (count x grid length).

    Path q is sum_j lambda_j^(-1/2) xi_{j,q} phi_j over the eigenpairs with
    lambda_j > floor_ratio * lambda_1, so projecting a curve yields an
    equal-variance random mix of its standardized principal scores. Large
    uninformative variance directions no longer dominate the projections,
    which is what lets scale and shift structure in the smaller components
    drive the dissimilarities.
    """
    if count < 1:
        raise DataError("count must be >= 1")
    lam = system.eigenvalues
    if lam.max() <= 0.0:
        raise DegenerateError("degenerate covariance: no positive eigenvalue")
    keep = lam > floor_ratio * lam.max()
    root = 1.0 / np.sqrt(lam[keep])
    coeffs = np.empty((count, root.size))
    for q in range(count):
        coeffs[q] = seed.child(q).generator().standard_normal(root.size)
    return (coeffs * root) @ system.functions[keep]
