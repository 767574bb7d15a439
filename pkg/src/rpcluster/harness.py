"""Experiment harness: replicated runs, Rand-index summaries, result files.

Replicate r derives its streams from the master seed as child(r, 0) for
data generation, child(r, 1) for the regime transform and child(r, 2) for
the ensemble, so results are independent of scheduling and adding
replicates never perturbs earlier ones.

Result files are reproducible: `results.csv` and `summary.json` are pure
functions of the configuration and master seed. Wall-clock timings are
inherently not, so they go to a separate `timings.csv` sidecar instead of
the results file.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dataset import (
    FunctionalDataset,
    Partition,
    Regime,
    partition_from_labels,
    uniform_grid,
)
from .errors import ConfigError, DataError
from .io import load_dataset_csv, load_labels_csv, write_labels_csv
from .metrics import derivative as curve_derivative
from .metrics import rand_index
from .models import ModelSpec, fragment, generate_model, irregularize
from .optimizer import OptimizerConfig
from .pipeline import EnsembleConfig, run_ensemble
from .sampling import SeedSpec, default_families
from .svgplot import write_svg

FINE_GRID_SIZE = 1000
IRREGULAR_KEEP = 100
FRAGMENT_SEGMENTS = 10


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    out_dir: Path
    k: Optional[int] = None
    k_sweep: tuple[int, ...] = ()
    model: Optional[int] = None
    sizes: tuple[int, ...] = ()
    regime: Regime = Regime.REGULAR
    grid_size: int = 100
    data_csv: Optional[Path] = None
    labels_csv: Optional[Path] = None
    derivative: Optional[int] = None
    families: tuple = field(default_factory=default_families)
    m_set: tuple[int, ...] = (10, 50, 100, 500, 1000)
    restarts: int = 10
    replicates: int = 1
    master_seed: int = 0
    plot: bool = False

    def __post_init__(self):
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "k_sweep", tuple(int(k) for k in self.k_sweep))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "m_set", tuple(int(m) for m in self.m_set))
        if (self.model is None) == (self.data_csv is None):
            raise ConfigError("exactly one data source: --model or --data")
        if self.model is not None and not self.sizes:
            raise ConfigError("model experiments need --sizes")
        if (self.k is None) == (len(self.k_sweep) == 0):
            raise ConfigError("exactly one of --k or --k-sweep is required")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.derivative is not None and self.derivative not in (1, 2):
            raise ConfigError("derivative order must be 1 or 2")


def _fmt(x: float) -> str:
    return repr(float(x))


def _simulate(cfg: ExperimentConfig, replicate: int, master: SeedSpec):
    if cfg.regime is Regime.IRREGULAR:
        spec = ModelSpec(
            cfg.model, cfg.sizes, uniform_grid(FINE_GRID_SIZE), master.child(replicate, 0)
        )
        labeled = irregularize(
            generate_model(spec), FINE_GRID_SIZE, IRREGULAR_KEEP, master.child(replicate, 1)
        )
    else:
        spec = ModelSpec(
            cfg.model, cfg.sizes, uniform_grid(cfg.grid_size), master.child(replicate, 0)
        )
        labeled = generate_model(spec)
        if cfg.regime is Regime.FRAGMENTED:
            labeled = fragment(labeled, FRAGMENT_SEGMENTS, master.child(replicate, 1))
    return labeled.dataset, labeled.truth


def _load_csv_source(cfg: ExperimentConfig):
    dataset = load_dataset_csv(cfg.data_csv, fragmented=cfg.regime is Regime.FRAGMENTED)
    if cfg.derivative is not None:
        if dataset.regime is not Regime.REGULAR:
            raise DataError("derivative preprocessing needs regular data")
        dataset = FunctionalDataset(
            tuple(curve_derivative(c, cfg.derivative) for c in dataset.curves),
            dataset.regime,
            dataset.ids,
        )
    truth: Optional[Partition] = None
    if cfg.labels_csv is not None:
        mapping = load_labels_csv(cfg.labels_csv)
        try:
            truth = partition_from_labels([mapping[str(cid)] for cid in dataset.ids])
        except KeyError as exc:
            raise DataError(f"labels file misses curve id {exc.args[0]!r}") from exc
    return dataset, truth


def _ensemble_config(cfg: ExperimentConfig, k: int, seed: SeedSpec) -> EnsembleConfig:
    return EnsembleConfig(
        k=k,
        families=tuple(cfg.families),
        m_set=cfg.m_set,
        optimizer=OptimizerConfig(restarts=cfg.restarts),
        seed=seed,
    )


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run all replicates (and the K sweep, when configured); write reports.

    Emits `results.csv` with one row per replicate (and per K during a
    sweep), `summary.json` with Rand statistics and the selected
    (family, M, stage) frequency table, `timings.csv` with wall times, and
    per-replicate labels files (plus SVG plots when requested). Returns the
    summary as a dictionary.
    """
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    master = SeedSpec(cfg.master_seed)
    k_values = cfg.k_sweep if cfg.k_sweep else (cfg.k,)
    sweeping = bool(cfg.k_sweep)

    csv_source = None
    if cfg.data_csv is not None:
        csv_source = _load_csv_source(cfg)

    rows: list[dict] = []
    timings: list[tuple[int, int, float]] = []
    for replicate in range(cfg.replicates):
        if csv_source is not None:
            dataset, truth = csv_source
        else:
            dataset, truth = _simulate(cfg, replicate, master)
        for k in k_values:
            start = time.perf_counter()
            result = run_ensemble(dataset, _ensemble_config(cfg, k, master.child(replicate, 2)))
            wall = time.perf_counter() - start
            timings.append((replicate, k, wall))
            row = {
                "replicate": replicate,
                "k": k,
                "l_star": result.family_label,
                "M_star": result.m,
                "s_star": result.stage,
                "final_cost": result.cost,
            }
            if truth is not None:
                row["rand_index"] = rand_index(result.partition, truth)
            rows.append(row)
            suffix = f"_k{k}" if sweeping else ""
            write_labels_csv(
                out / f"labels_rep{replicate}{suffix}.csv",
                dataset.ids,
                result.partition.labels.tolist(),
            )
            if cfg.plot:
                write_svg(out / f"plot_rep{replicate}{suffix}.svg", dataset, result.partition)

    has_rand = all("rand_index" in r for r in rows)
    columns = ["replicate"] + (["k"] if sweeping else []) + [
        "l_star", "M_star", "s_star", "final_cost",
    ] + (["rand_index"] if has_rand else [])
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            value = row[col]
            cells.append(_fmt(value) if isinstance(value, float) else str(value))
        lines.append(",".join(cells))
    (out / "results.csv").write_text("\n".join(lines) + "\n")

    with (out / "timings.csv").open("w") as fh:
        fh.write("replicate,k,wall_seconds\n")
        for replicate, k, wall in timings:
            fh.write(f"{replicate},{k},{wall:.6f}\n")

    summary: dict = {"replicates": cfg.replicates, "master_seed": cfg.master_seed}
    freq: dict[str, int] = {}
    for row in rows:
        key = f"{row['l_star']}:M={row['M_star']}:s={row['s_star']}"
        freq[key] = freq.get(key, 0) + 1
    summary["selection_counts"] = dict(sorted(freq.items()))
    if has_rand:
        for k in k_values:
            vals = [r["rand_index"] for r in rows if r["k"] == k]
            stats = {
                "mean_rand": float(np.mean(vals)),
                "sd_rand": float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0,
            }
            if sweeping:
                summary.setdefault("per_k", {})[str(k)] = stats
            else:
                summary.update(stats)
    if sweeping:
        cost_by_k = {
            k: float(np.mean([r["final_cost"] for r in rows if r["k"] == k]))
            for k in k_values
        }
        summary["mean_final_cost_by_k"] = {str(k): v for k, v in cost_by_k.items()}
        summary["best_k"] = int(min(cost_by_k, key=lambda k: (cost_by_k[k], k)))
    else:
        summary["mean_final_cost"] = float(np.mean([r["final_cost"] for r in rows]))
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
