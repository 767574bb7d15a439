"""Trapezoid-rule inner products on arbitrary grids, plus interpolation.

The trapezoid rule is exact whenever the integrand is piecewise linear
between grid points, is symmetric in its arguments, and costs the same as
a one-sided Riemann sum.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .dataset import Curve, Grid
from .errors import DataError


class QuadratureKind(Enum):
    """Recognized quadrature rules (extension point; trapezoid only)."""

    TRAPEZOID = "trapezoid"


def trapezoid_weights(points: np.ndarray) -> np.ndarray:
    """Weights w such that sum(w * f) is the trapezoid rule for f on `points`."""
    d = np.diff(points)
    w = np.zeros(points.size)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def inner_product(f: Curve, g: Curve) -> float:
    """Trapezoid approximation of the L2 inner product over the grid span.

    Both curves must live on the identical grid; interpolate one of them
    first otherwise. Gaps inside the grid are integrated as-is (linearly
    between the observed points, with no imputation of new values).
    """
    if f.grid != g.grid:
        raise DataError(
            "curves live on different grids; interpolate onto a common grid first"
        )
    w = trapezoid_weights(f.grid.points)
    return float(np.sum(w * (f.values * g.values)))


def interpolate_rows(
    points: np.ndarray, rows: np.ndarray, targets: np.ndarray
) -> np.ndarray:
    """Piecewise-linear interpolation of each row of `rows` at `targets`.

    `rows` has one function per row, sampled at `points`. No extrapolation:
    every target must lie inside [points[0], points[-1]].
    """
    if targets[0] < points[0] or targets[-1] > points[-1]:
        raise DataError(
            f"target points [{targets[0]}, {targets[-1]}] leave the source span "
            f"[{points[0]}, {points[-1]}]; extrapolation is not supported"
        )
    idx = np.searchsorted(points, targets, side="right")
    idx = np.clip(idx, 1, points.size - 1)
    lo = points[idx - 1]
    hi = points[idx]
    frac = (targets - lo) / (hi - lo)
    return rows[..., idx - 1] * (1.0 - frac) + rows[..., idx] * frac


def interpolate_to(direction: Curve, target: Grid) -> Curve:
    """Evaluate `direction` at the points of `target` by linear interpolation."""
    vals = interpolate_rows(direction.grid.points, direction.values, target.points)
    return Curve(target, vals)
