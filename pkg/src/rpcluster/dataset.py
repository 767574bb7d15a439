"""Core domain types: observation grids, curves, datasets and partitions.

All types are immutable after construction and safe to share across
concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError


class Regime(Enum):
    """Observation pattern of a functional dataset."""

    REGULAR = "regular"
    IRREGULAR = "irregular"
    FRAGMENTED = "fragmented"


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Grid:
    """Strictly increasing observation times inside the unit interval.

    The working domain is fixed to [0, 1]; ingested data with other time
    scales are affinely rescaled at load time (see :mod:`rpcluster.io`).
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DataError("a grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise DataError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise DataError("grid points must be strictly increasing")
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise DataError(
                f"grid points must lie in [0, 1], got span [{pts[0]}, {pts[-1]}]"
            )
        object.__setattr__(self, "points", _frozen(pts))

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and np.array_equal(self.points, other.points)

    def __hash__(self) -> int:
        return hash(self.points.tobytes())

    @property
    def span(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])


def uniform_grid(size: int = 100) -> Grid:
    """Equi-spaced grid of `size` points spanning [0, 1]."""
    if size < 2:
        raise DataError("a grid needs at least two points")
    return Grid(np.linspace(0.0, 1.0, size))


@dataclass(frozen=True)
class Curve:
    """One functional observation: a grid plus one value per grid point."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size != len(self.grid):
            raise DataError("curve values must match the grid length")
        if not np.all(np.isfinite(vals)):
            raise DataError("curve values must be finite")
        object.__setattr__(self, "values", _frozen(vals))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class FunctionalDataset:
    """A sample of curves together with its observation regime.

    Invariants: at least three curves (the MADD dissimilarity divides by
    n - 2), and in the regular regime all curves share one grid.
    """

    curves: tuple[Curve, ...]
    regime: Regime
    ids: tuple = None

    def __post_init__(self):
        curves = tuple(self.curves)
        if len(curves) < 3:
            raise DataError("a dataset needs at least 3 curves")
        ids = self.ids if self.ids is not None else tuple(range(len(curves)))
        ids = tuple(ids)
        if len(ids) != len(curves):
            raise DataError("ids must match the number of curves")
        if len(set(ids)) != len(ids):
            raise DataError("curve ids must be unique")
        if self.regime is Regime.REGULAR:
            g0 = curves[0].grid
            if any(c.grid != g0 for c in curves[1:]):
                raise DataError("regular datasets require one common grid")
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return len(self.curves)

    @property
    def common_grid(self) -> Grid:
        if self.regime is not Regime.REGULAR:
            raise DataError("only regular datasets have a common grid")
        return self.curves[0].grid

    def union_grid(self) -> Grid:
        """Sorted union of every curve's observation times."""
        pts = np.unique(np.concatenate([c.grid.points for c in self.curves]))
        return Grid(pts)

    def values_matrix(self) -> np.ndarray:
        """n x G value matrix; regular datasets only."""
        if self.regime is not Regime.REGULAR:
            raise DataError("only regular datasets have a value matrix")
        return np.vstack([c.values for c in self.curves])


@dataclass(frozen=True)
class Partition:
    """Assignment of {1..n} into k non-empty clusters, canonically numbered.

    Canonical form: cluster labels are 1..k in order of first appearance,
    which makes partition equality and Rand-index checks deterministic.
    Use :func:`partition_from_labels` to canonicalize arbitrary labels.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise DataError("partition labels must be a non-empty 1-d sequence")
        if self.k < 1:
            raise DataError("k must be positive")
        seen: list[int] = []
        for lab in labels.tolist():
            if lab not in seen:
                seen.append(lab)
        if seen != list(range(1, self.k + 1)):
            raise DataError(
                "labels are not canonical: expected clusters 1..k numbered by "
                "first appearance, with every cluster non-empty"
            )
        labels = labels.copy()
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Partition)
            and self.k == other.k
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self) -> int:
        return hash((self.k, self.labels.tobytes()))

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k + 1)[1:]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)


def partition_from_labels(labels: Sequence) -> Partition:
    """Canonicalize an arbitrary label sequence into a :class:`Partition`.

    Any label alphabet is accepted; labels are renumbered 1..k by order of
    first appearance, so label lists related by a permutation of the
    alphabet map to the same partition.
    """
    labels = list(labels)
    if len(labels) == 0:
        raise DataError("labels must be non-empty")
    remap: dict = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        if lab not in remap:
            remap[lab] = len(remap) + 1
        out[i] = remap[lab]
    return Partition(out, k=len(remap))


def build_dataset(
    records: Iterable[tuple], fragmented: bool = False
) -> FunctionalDataset:
    """Assemble a dataset from (curve-id, time, value) triples.

    Records are grouped by curve id and sorted by time; the regime is
    inferred (regular iff all grids are identical, irregular otherwise).
    Fragmented data cannot be told apart from irregular data by looking at
    grids alone, so it must be declared via `fragmented=True`.
    """
    groups: dict = {}
    for rec in records:
        try:
            cid, t, v = rec
        except (TypeError, ValueError) as exc:
            raise DataError(f"expected (curve-id, time, value) records, got {rec!r}") from exc
        t = float(t)
        v = float(v)
        if not np.isfinite(t) or t < 0.0 or t > 1.0:
            raise DataError(f"curve {cid!r}: time {t} outside the domain [0, 1]")
        if not np.isfinite(v):
            raise DataError(f"curve {cid!r}: non-finite value at time {t}")
        bucket = groups.setdefault(cid, {})
        if t in bucket:
            raise DataError(f"duplicate record for curve {cid!r} at time {t}")
        bucket[t] = v
    try:
        ids = sorted(groups)
    except TypeError as exc:
        raise DataError("curve ids must be mutually comparable") from exc
    curves = []
    for cid in ids:
        bucket = groups[cid]
        if len(bucket) < 2:
            raise DataError(f"curve {cid!r} has fewer than 2 distinct times")
        times = np.array(sorted(bucket))
        values = np.array([bucket[t] for t in times])
        curves.append(Curve(Grid(times), values))
    if fragmented:
        regime = Regime.FRAGMENTED
    elif all(c.grid == curves[0].grid for c in curves[1:]):
        regime = Regime.REGULAR
    else:
        regime = Regime.IRREGULAR
    return FunctionalDataset(tuple(curves), regime, tuple(ids))
