"""Two-stage ensemble clustering pipeline.

Stage I projects every curve onto prespecified Gaussian-process directions
and clusters the projected vectors under the normalized MADD cost. Stage
II re-estimates projection directions from the stage-one labels (pooled
covariance eigenpairs, Karhunen-Loeve sampling) and clusters again. Both
stages run for every (family, projection count) combination; the
combination and stage with the smallest normalized cost win.

Irregular and fragmented data change only the plumbing: stage-one
directions are realized once on the union of all observation grids and
restricted to each curve's own grid, stage-two covariance estimation goes
through the smoothing path, and stage-two directions are interpolated from
their estimation grid onto each curve's grid before the quadrature.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .covariance import (
    SmootherConfig,
    pooled_eigenpairs_irregular,
    pooled_eigenpairs_regular,
)
from .dataset import FunctionalDataset, Grid, Partition, Regime
from .errors import ConfigError, DataError, DegenerateError
from .madd import madd_matrix
from .optimizer import OptimizerConfig, optimize
from .quadrature import interpolate_rows, trapezoid_weights
from .sampling import (
    ProjectionFamily,
    SeedSpec,
    default_families,
    kl_path_matrix,
    sample_paths,
    whitened_path_matrix,
)

STAGE_TWO_GRID_SIZE = 101


@dataclass(frozen=True)
class EnsembleConfig:
    """Configuration of the full (family, projection count) sweep."""

    k: int
    families: tuple[ProjectionFamily, ...] = field(default_factory=default_families)
    m_set: tuple[int, ...] = (10, 50, 100, 500, 1000)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    smoother: SmootherConfig = field(default_factory=SmootherConfig)
    variance_cutoff: float = 0.99
    stage2_directions: str = "whitened"
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "m_set", tuple(int(m) for m in self.m_set))
        if len(self.families) == 0:
            raise ConfigError("families must be non-empty")
        if len(self.m_set) == 0:
            raise ConfigError("m_set must be non-empty")
        if any(b <= a for a, b in zip(self.m_set, self.m_set[1:])):
            raise ConfigError("m_set must be strictly increasing")
        if self.m_set[0] < 1:
            raise ConfigError("projection counts must be >= 1")
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.stage2_directions not in ("whitened", "kl"):
            raise ConfigError("stage2_directions must be 'whitened' or 'kl'")


@dataclass(frozen=True)
class Skipped:
    """Marker for a stage-two run that was skipped, with the reason."""

    reason: str


@dataclass(frozen=True)
class ComboRecord:
    """Outcome of one (family, M) combination."""

    family_index: int
    family_label: str
    m: int
    stage1: Partition
    cost1: float
    stage2: Optional[Partition]
    cost2: Optional[float]
    skip_reason: Optional[str]
    v: float


@dataclass(frozen=True)
class EnsembleResult:
    """Every combination's costs plus the selected combination and partition."""

    combos: tuple[ComboRecord, ...]
    family_index: int
    family_label: str
    m: int
    stage: int
    partition: Partition
    cost: float
    diagnostics: tuple[str, ...]


def _curve_indices_in(grid: Grid, curve_points: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(grid.points, curve_points)
    if not np.array_equal(grid.points[idx], curve_points):
        raise DataError("curve grid is not a subset of the union grid")
    return idx


def _project_restricted(data: FunctionalDataset, grid: Grid, paths: np.ndarray) -> np.ndarray:
    """Project each curve on path realizations restricted to its own grid."""
    P = np.empty((data.n, paths.shape[0]))
    for i, curve in enumerate(data.curves):
        idx = _curve_indices_in(grid, curve.grid.points)
        w = trapezoid_weights(curve.grid.points)
        P[i] = paths[:, idx] @ (w * curve.values)
    return P


def _project_interpolated(data: FunctionalDataset, grid: Grid, paths: np.ndarray) -> np.ndarray:
    """Project each curve on paths interpolated from `grid` to the curve grid."""
    P = np.empty((data.n, paths.shape[0]))
    for i, curve in enumerate(data.curves):
        vals = interpolate_rows(grid.points, paths, curve.grid.points)
        w = trapezoid_weights(curve.grid.points)
        P[i] = vals @ (w * curve.values)
    return P


def _project_common(data: FunctionalDataset, paths: np.ndarray) -> np.ndarray:
    w = trapezoid_weights(data.common_grid.points)
    return (data.values_matrix() * w) @ paths.T


def stage_one(
    data: FunctionalDataset,
    family: ProjectionFamily,
    m: int,
    k: int,
    seed: SeedSpec,
    optimizer: OptimizerConfig = OptimizerConfig(),
) -> tuple[Partition, float, np.ndarray]:
    """Cluster from `m` prespecified-family projections.

    Directions use the stream `seed.child(0)` (one child per direction) and
    the optimizer uses `seed.child(1)`. For regular data the directions are
    realized on the common grid; otherwise each direction is realized once
    on the union of all observation grids and evaluated on each curve's own
    grid, so every curve sees the same direction function.

    Returns the partition, its normalized cost, and the n x m projected
    matrix.
    """
    if m < 1:
        raise ConfigError("m must be >= 1")
    if data.regime is Regime.REGULAR:
        grid = data.common_grid
        paths = sample_paths(family, grid, m, seed.child(0))
        P = _project_common(data, paths)
    else:
        grid = data.union_grid()
        paths = sample_paths(family, grid, m, seed.child(0))
        P = _project_restricted(data, grid, paths)
    D = madd_matrix(P)
    cfg = OptimizerConfig(optimizer.restarts, optimizer.max_sweeps, seed.child(1))
    partition, cost = optimize(D, k, cfg)
    return partition, cost, P


def stage_two(
    data: FunctionalDataset,
    stage1: Partition,
    m: int,
    k: int,
    cfg: EnsembleConfig,
    seed: SeedSpec,
) -> Union[tuple[Partition, float], Skipped]:
    """Cluster from `m` data-driven projections built on the stage-one labels.

    The covariance operator is estimated from the stage-one labels
    (cluster-wise centering, pooled covariance, eigenpairs). Directions are
    then drawn on the estimation grid per `cfg.stage2_directions`:
    "whitened" (default) mixes the standardized principal scores with equal
    variance over the full estimated spectrum, while "kl" draws plain
    Karhunen-Loeve samples of the estimated covariance truncated at
    `cfg.variance_cutoff`. For irregular or fragmented data the directions
    are interpolated onto each curve's grid before the quadrature.
    Degenerate situations (a singleton stage-one cluster, a covariance with
    no positive eigenvalue, smoothing failures) return :class:`Skipped`
    instead of raising, so the ensemble can fall back to the stage-one
    cost.
    """
    whiten = cfg.stage2_directions == "whitened"
    cutoff = 1.0 if whiten else cfg.variance_cutoff
    try:
        if data.regime is Regime.REGULAR:
            _, system = pooled_eigenpairs_regular(data, stage1, cutoff)
        else:
            _, system = pooled_eigenpairs_irregular(data, stage1, cfg.smoother, cutoff)
        if whiten:
            paths = whitened_path_matrix(system, m, seed.child(0))
        else:
            paths = kl_path_matrix(system, m, seed.child(0))
    except DegenerateError as exc:
        msg = str(exc)
        reason = "cluster too small" if "cluster too small" in msg else "degenerate covariance"
        return Skipped(reason)
    except DataError as exc:
        return Skipped(str(exc))
    if data.regime is Regime.REGULAR:
        P = _project_common(data, paths)
    else:
        P = _project_interpolated(data, system.grid, paths)
    D = madd_matrix(P)
    opt = cfg.optimizer
    partition, cost = optimize(D, k, OptimizerConfig(opt.restarts, opt.max_sweeps, seed.child(1)))
    return partition, cost


def run_ensemble(data: FunctionalDataset, cfg: EnsembleConfig) -> EnsembleResult:
    """Full sweep over families and projection counts with min-cost selection.

    Each combination (l, M) gets the seed `cfg.seed.child(l, M-index)`, so
    extending the M grid never perturbs other combinations' draws. The
    selected combination minimizes v = min(stage-1 cost, stage-2 cost);
    exact ties resolve to the earlier family, then the smaller M, then
    stage one.
    """
    if cfg.k >= data.n:
        raise ConfigError(f"k={cfg.k} needs at least k + 1 curves, got n={data.n}")
    combos: list[ComboRecord] = []
    diagnostics: list[str] = []
    best = None  # (v, position in combos)
    for l, family in enumerate(cfg.families):
        for mi, m in enumerate(cfg.m_set):
            combo_seed = cfg.seed.child(l, mi)
            try:
                part1, cost1, _ = stage_one(
                    data, family, m, cfg.k, combo_seed.child(1), cfg.optimizer
                )
            except (DataError, DegenerateError) as exc:
                diagnostics.append(f"family={family.label} M={m}: stage 1 failed: {exc}")
                continue
            outcome = stage_two(data, part1, m, cfg.k, cfg, combo_seed.child(2))
            if isinstance(outcome, Skipped):
                record = ComboRecord(
                    l, family.label, m, part1, cost1, None, None, outcome.reason, cost1
                )
                diagnostics.append(
                    f"family={family.label} M={m}: stage 2 skipped: {outcome.reason}"
                )
            else:
                part2, cost2 = outcome
                record = ComboRecord(
                    l, family.label, m, part1, cost1, part2, cost2, None,
                    min(cost1, cost2),
                )
            combos.append(record)
            if best is None or record.v < best[0]:
                best = (record.v, len(combos) - 1)
    if best is None:
        raise DegenerateError(
            "all combinations failed: " + "; ".join(diagnostics)
        )
    chosen = combos[best[1]]
    if chosen.cost2 is not None and chosen.cost2 < chosen.cost1:
        stage, partition = 2, chosen.stage2
    else:
        stage, partition = 1, chosen.stage1
    return EnsembleResult(
        combos=tuple(combos),
        family_index=chosen.family_index,
        family_label=chosen.family_label,
        m=chosen.m,
        stage=stage,
        partition=partition,
        cost=chosen.v,
        diagnostics=tuple(diagnostics),
    )
