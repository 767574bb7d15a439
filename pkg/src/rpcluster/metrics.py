"""Evaluation helpers: Rand index and finite-difference derivatives."""

from __future__ import annotations

import numpy as np

from .dataset import Curve, Partition
from .errors import ConfigError, DataError


def rand_index(a: Partition, b: Partition) -> float:
    """Fraction of object pairs on which two partitions agree.

    A pair agrees when it is co-clustered in both partitions or separated
    in both. Computed from the contingency table with exact integer
    arithmetic, so the value is symmetric in its arguments to the bit.
    """
    if len(a) != len(b):
        raise DataError("partitions must have equal length")
    n = len(a)
    if n < 2:
        raise DataError("rand_index needs at least two objects")
    table = np.zeros((a.k, b.k), dtype=np.int64)
    np.add.at(table, (a.labels - 1, b.labels - 1), 1)

    def pairs(x) -> int:
        x = np.asarray(x, dtype=np.int64)
        return int((x * (x - 1) // 2).sum())

    total = n * (n - 1) // 2
    agree = total + 2 * pairs(table) - pairs(table.sum(axis=1)) - pairs(table.sum(axis=0))
    return agree / total


def derivative(curve: Curve, order: int) -> Curve:
    """First or second derivative by central differences on the same grid.

    Interior points use central differences and the boundaries second-order
    one-sided stencils, so the result is exact for polynomials up to the
    requested order plus one. Only equi-spaced grids are supported, which
    is how derivative preprocessing is applied to regular real data.
    """
    if order not in (1, 2):
        raise ConfigError("derivative order must be 1 or 2")
    if len(curve) < order + 2:
        raise DataError(f"order-{order} derivative needs at least {order + 2} points")
    t = curve.grid.points
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-8, atol=1e-12):
        raise DataError("derivative preprocessing needs an equi-spaced grid")
    values = curve.values
    for _ in range(order):
        values = np.gradient(values, t, edge_order=2)
    return Curve(curve.grid, values)
