"""Synthetic data generators for the ten benchmark models.

Models 1-5 and 7-9 are 40-term truncated expansions in a sine basis with
model-specific eigenvalue decays, innovations (standard normal, or scaled
t with three degrees of freedom in Models 3-4) and mean structure; Models
6 and 10 are Brownian bridges with square-root mean shifts, simulated
exactly. The irregularization and fragmentation transforms reproduce the
two degraded observation regimes: per-curve random subsampling of a fine
grid, and removal of one random contiguous sub-interval per curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import (
    Curve,
    FunctionalDataset,
    Grid,
    Partition,
    Regime,
    partition_from_labels,
    uniform_grid,
)
from .errors import ConfigError, DataError
from .sampling import SeedSpec, _bb_values

N_TERMS = 40

_POPULATION_COUNT = {1: 2, 2: 2, 3: 2, 4: 2, 5: 2, 6: 2, 7: 3, 8: 3, 9: 3, 10: 3}


@dataclass(frozen=True)
class ModelSpec:
    """One benchmark model instance: id, per-population sizes, grid, seed."""

    model: int
    sizes: tuple[int, ...]
    grid: Grid = field(default_factory=uniform_grid)
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if self.model not in _POPULATION_COUNT:
            raise ConfigError(f"unknown model id {self.model}; expected 1..10")
        expected = _POPULATION_COUNT[self.model]
        if len(self.sizes) != expected:
            raise ConfigError(
                f"model {self.model} has {expected} populations, got sizes {self.sizes}"
            )
        if any(s < 1 for s in self.sizes):
            raise ConfigError("population sizes must be positive")


@dataclass(frozen=True)
class LabeledDataset:
    """A dataset plus its ground-truth partition."""

    dataset: FunctionalDataset
    truth: Partition

    def __post_init__(self):
        if len(self.truth) != self.dataset.n:
            raise DataError("truth partition must cover the dataset")


def sine_basis(t: np.ndarray, frequency_step: int = 1) -> np.ndarray:
    """Rows sqrt(2) sin(j * step * pi * t) for j = 1..40."""
    j = np.arange(1, N_TERMS + 1)[:, None]
    return np.sqrt(2.0) * np.sin(j * frequency_step * np.pi * t[None, :])


def _theta(kind: str) -> np.ndarray:
    j = np.arange(1, N_TERMS + 1, dtype=float)
    if kind == "poly1.05":
        return j ** (-1.05)
    if kind == "poly2":
        return j ** (-2.0)
    if kind == "geom2":
        return 2.0 ** (-j)
    if kind == "geom4":
        return 4.0 ** (-j)
    if kind == "exp":
        return np.exp(-j)
    raise ValueError(kind)


def _innovations(rng: np.random.Generator, heavy: bool) -> np.ndarray:
    if heavy:
        # t with 3 df has variance 3; dividing by sqrt(3) standardizes it
        return rng.standard_t(3, size=N_TERMS) / np.sqrt(3.0)
    return rng.standard_normal(N_TERMS)


def _coefficient_means(shifts: tuple[float, ...]) -> np.ndarray:
    mu = np.zeros(N_TERMS)
    mu[: len(shifts)] = shifts
    return mu


# Per model: list of populations, each a dict understood by generate_model.
def _population_specs(model: int, t: np.ndarray):
    zero = np.zeros_like(t)
    if model == 1:
        mu1 = 2.0 * (t**2 - 1.0 / 3.0)
        return [
            dict(theta="poly1.05", mean_curve=mu1),
            dict(theta="poly1.05", mean_curve=zero),
        ]
    if model == 2:
        return [dict(theta="poly2"), dict(theta="geom2")]
    if model == 3:
        mu1 = np.sqrt(np.abs(t - 0.5))
        return [
            dict(theta="poly1.05", mean_curve=mu1, heavy=True, step=2),
            dict(theta="poly1.05", mean_curve=zero, heavy=True, step=2),
        ]
    if model == 4:
        return [dict(theta="poly2", heavy=True), dict(theta="exp", heavy=True)]
    if model == 5:
        return [
            dict(theta="poly2", coef_means=(0.0, -0.5, 1.0, -0.5)),
            dict(theta="poly2", coef_means=(0.0, -0.75, 0.75, -0.75)),
        ]
    if model == 6:
        return [dict(bridge=True), dict(bridge=True, shift=np.sqrt(t))]
    if model == 7:
        mu1 = 2.0 * (t**2 - 1.0 / 3.0)
        return [
            dict(theta="poly1.05", mean_curve=mu1),
            dict(theta="poly1.05", mean_curve=zero),
            dict(theta="poly1.05", mean_curve=-mu1),
        ]
    if model == 8:
        return [dict(theta="poly2"), dict(theta="geom4"), dict(theta="exp")]
    if model == 9:
        return [
            dict(theta="poly2", coef_means=(0.0, -0.5, 1.0, -0.5)),
            dict(theta="poly2", coef_means=(0.0, -0.75, 0.75, -0.75)),
            dict(theta="poly2", coef_means=(0.0, -1.0, 0.5, -1.0)),
        ]
    if model == 10:
        return [
            dict(bridge=True),
            dict(bridge=True, shift=np.sqrt(t)),
            dict(bridge=True, shift=-np.sqrt(t)),
        ]
    raise ConfigError(f"unknown model id {model}")


def generate_model(spec: ModelSpec) -> LabeledDataset:
    """Generate one labeled dataset exactly per the model's formulas.

    Curve i uses the stream `spec.seed.child(i)` (global curve index), so
    per-curve generation is order-independent and parallelizable.
    """
    t = spec.grid.points
    pops = _population_specs(spec.model, t)
    curves: list[Curve] = []
    labels: list[int] = []
    index = 0
    for pop_label, (size, pop) in enumerate(zip(spec.sizes, pops), start=1):
        if pop.get("bridge"):
            shift = pop.get("shift", np.zeros_like(t))
            for _ in range(size):
                rng = spec.seed.child(index).generator()
                curves.append(Curve(spec.grid, _bb_values(rng, t) + shift))
                labels.append(pop_label)
                index += 1
        else:
            basis = sine_basis(t, pop.get("step", 1))
            # theta is the coefficient scale (per-mode innovation sd); the
            # benchmark tables are only attainable with this convention
            theta = _theta(pop["theta"])
            mean_curve = pop.get("mean_curve", np.zeros_like(t))
            coef_means = _coefficient_means(pop.get("coef_means", ()))
            for _ in range(size):
                rng = spec.seed.child(index).generator()
                z = _innovations(rng, pop.get("heavy", False))
                coeffs = theta * z + coef_means
                curves.append(Curve(spec.grid, coeffs @ basis + mean_curve))
                labels.append(pop_label)
                index += 1
    dataset = FunctionalDataset(tuple(curves), Regime.REGULAR)
    return LabeledDataset(dataset, partition_from_labels(labels))


def irregularize(
    data: LabeledDataset, fine_size: int = 1000, keep: int = 100, seed: SeedSpec = SeedSpec(0)
) -> LabeledDataset:
    """Per-curve random subsampling of a fine regular grid.

    Each curve keeps exactly `keep` time points, drawn independently and
    without replacement from its `fine_size`-point grid, so observation
    grids become curve-specific. Truth labels are untouched.
    """
    ds = data.dataset
    if ds.regime is not Regime.REGULAR:
        raise DataError("irregularize expects curves on a common fine grid")
    if len(ds.common_grid) != fine_size:
        raise DataError(
            f"irregularize expects a {fine_size}-point grid, got {len(ds.common_grid)}"
        )
    if keep > fine_size:
        raise DataError(f"cannot keep {keep} of {fine_size} points")
    if keep < 2:
        raise DataError("keep must be >= 2")
    curves = []
    for i, curve in enumerate(ds.curves):
        rng = seed.child(i).generator()
        idx = np.sort(rng.choice(fine_size, size=keep, replace=False))
        curves.append(Curve(Grid(curve.grid.points[idx]), curve.values[idx]))
    out = FunctionalDataset(tuple(curves), Regime.IRREGULAR, ds.ids)
    return LabeledDataset(out, data.truth)


def fragment(
    data: LabeledDataset, segments: int = 10, seed: SeedSpec = SeedSpec(0)
) -> LabeledDataset:
    """Remove one random length-1/segments sub-interval from each curve.

    The domain [0, 1] is split into `segments` equal sub-intervals; per
    curve one index is drawn uniformly and every observation inside that
    sub-interval is dropped (the last sub-interval is closed at t = 1).
    Truth labels are untouched.
    """
    ds = data.dataset
    if ds.regime is not Regime.REGULAR:
        raise DataError("fragment expects regular data")
    if segments < 1:
        raise DataError("segments must be >= 1")
    curves = []
    for i, curve in enumerate(ds.curves):
        rng = seed.child(i).generator()
        r = int(rng.integers(1, segments + 1))
        t = curve.grid.points
        lo = (r - 1) / segments
        hi = r / segments
        inside = (t >= lo) & ((t < hi) | ((r == segments) & (t <= hi)))
        keep = ~inside
        if keep.sum() < 2:
            raise DataError(
                f"curve {ds.ids[i]!r} would lose all but {int(keep.sum())} points"
            )
        curves.append(Curve(Grid(t[keep]), curve.values[keep]))
    out = FunctionalDataset(tuple(curves), Regime.FRAGMENTED, ds.ids)
    return LabeledDataset(out, data.truth)
