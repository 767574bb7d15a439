"""Command-line front end.

Subcommands: `simulate` emits model CSVs, `cluster` runs the two-stage
ensemble on a CSV, `evaluate` computes the Rand index of two label files,
`bench` reproduces Monte-Carlo tables for the benchmark models, and `plot`
renders an SVG of curves colored by cluster.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
degeneracy with no recoverable combination.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import Regime, partition_from_labels, uniform_grid
from .errors import ConfigError, DataError, DegenerateError
from .harness import (
    FINE_GRID_SIZE,
    FRAGMENT_SEGMENTS,
    IRREGULAR_KEEP,
    ExperimentConfig,
    run_experiment,
)
from .io import (
    load_dataset_csv,
    load_labels_csv,
    parse_config_file,
    write_dataset_csv,
    write_labels_csv,
)
from .metrics import rand_index
from .models import ModelSpec, fragment, generate_model, irregularize
from .sampling import FAMILY_LABELS, SeedSpec, default_families
from .svgplot import write_svg

_REGIMES = {r.value: r for r in Regime}


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}") from exc


def _parse_families(text: str):
    families = []
    for name in text.split(","):
        name = name.strip()
        if not name:
            continue
        if name not in FAMILY_LABELS:
            raise ConfigError(
                f"unknown family {name!r}; choose from {', '.join(sorted(FAMILY_LABELS))}"
            )
        families.append(FAMILY_LABELS[name])
    if not families:
        raise ConfigError("families must be non-empty")
    return tuple(families)


def _apply_config_file(args: argparse.Namespace) -> None:
    """Fill unset flags from a key=value config file (flags win)."""
    if getattr(args, "config", None) is None:
        return
    values = parse_config_file(args.config)
    for key, raw in values.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(f"config key {key!r} matches no option")
        if getattr(args, dest) is None:
            setattr(args, dest, raw)


def _common_run_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--k", type=int, default=None, help="number of clusters")
    sub.add_argument("--k-sweep", default=None, help="comma list of K values to sweep")
    sub.add_argument("--families", default=None, help="comma list of projection families")
    sub.add_argument("--m-set", default=None, help="comma list of projection counts")
    sub.add_argument("--restarts", default=None, help="optimizer restarts (default 10)")
    sub.add_argument("--seed", default=None, help="master seed (default 0)")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--config", default=None, help="key=value config file")


def _run_settings(args: argparse.Namespace) -> dict:
    _apply_config_file(args)
    return dict(
        k=int(args.k) if args.k is not None else None,
        k_sweep=_parse_int_list(args.k_sweep) if args.k_sweep else (),
        families=_parse_families(args.families) if args.families else default_families(),
        m_set=_parse_int_list(args.m_set) if args.m_set else (10, 50, 100, 500, 1000),
        restarts=int(args.restarts) if args.restarts is not None else 10,
        master_seed=int(args.seed) if args.seed is not None else 0,
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    _apply_config_file(args)
    regime = _REGIMES[args.regime]
    seed = SeedSpec(int(args.seed) if args.seed is not None else 0)
    if regime is Regime.IRREGULAR:
        spec = ModelSpec(args.model, _parse_int_list(args.sizes), uniform_grid(FINE_GRID_SIZE), seed.child(0))
        labeled = irregularize(generate_model(spec), FINE_GRID_SIZE, IRREGULAR_KEEP, seed.child(1))
    else:
        spec = ModelSpec(args.model, _parse_int_list(args.sizes), uniform_grid(args.grid_size), seed.child(0))
        labeled = generate_model(spec)
        if regime is Regime.FRAGMENTED:
            labeled = fragment(labeled, FRAGMENT_SEGMENTS, seed.child(1))
    out = Path(args.out if args.out is not None else ".")
    out.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(out / "data.csv", labeled.dataset)
    write_labels_csv(out / "truth.csv", labeled.dataset.ids, labeled.truth.labels.tolist())
    print(f"wrote {out / 'data.csv'} and {out / 'truth.csv'}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    settings = _run_settings(args)
    cfg = ExperimentConfig(
        out_dir=Path(args.out if args.out is not None else "."),
        k=settings["k"],
        k_sweep=settings["k_sweep"],
        data_csv=Path(args.data),
        labels_csv=Path(args.labels) if args.labels else None,
        regime=_REGIMES[args.regime],
        derivative=int(args.derivative) if args.derivative is not None else None,
        families=settings["families"],
        m_set=settings["m_set"],
        restarts=settings["restarts"],
        replicates=int(args.reps) if args.reps is not None else 1,
        master_seed=settings["master_seed"],
        plot=args.plot,
    )
    summary = run_experiment(cfg)
    print(f"wrote {cfg.out_dir / 'results.csv'}")
    if "mean_rand" in summary:
        print(f"mean rand index: {summary['mean_rand']:.4f}")
    if "best_k" in summary:
        print(f"best K by minimum ensemble cost: {summary['best_k']}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    settings = _run_settings(args)
    cfg = ExperimentConfig(
        out_dir=Path(args.out if args.out is not None else "."),
        k=settings["k"],
        k_sweep=settings["k_sweep"],
        model=args.model,
        sizes=_parse_int_list(args.sizes),
        regime=_REGIMES[args.regime],
        grid_size=args.grid_size,
        families=settings["families"],
        m_set=settings["m_set"],
        restarts=settings["restarts"],
        replicates=int(args.reps) if args.reps is not None else 1,
        master_seed=settings["master_seed"],
        plot=args.plot,
    )
    summary = run_experiment(cfg)
    print(f"wrote {cfg.out_dir / 'results.csv'}")
    if "mean_rand" in summary:
        print(f"mean rand index: {summary['mean_rand']:.4f} (sd {summary['sd_rand']:.4f})")
    if "best_k" in summary:
        print(f"best K by minimum ensemble cost: {summary['best_k']}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    a = load_labels_csv(args.labels_a)
    b = load_labels_csv(args.labels_b)
    if set(a) != set(b):
        raise DataError("label files describe different curve ids")
    ids = sorted(a)
    pa = partition_from_labels([a[i] for i in ids])
    pb = partition_from_labels([b[i] for i in ids])
    print(f"{rand_index(pa, pb)!r}")
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    dataset = load_dataset_csv(args.data, fragmented=args.regime == "fragmented")
    mapping = load_labels_csv(args.labels)
    try:
        partition = partition_from_labels([mapping[str(cid)] for cid in dataset.ids])
    except KeyError as exc:
        raise DataError(f"labels file misses curve id {exc.args[0]!r}") from exc
    write_svg(args.out, dataset, partition)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpcluster",
        description="Two-stage ensemble random-projection clustering for functional data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="emit benchmark-model CSVs")
    p.add_argument("--model", type=int, required=True, help="model id 1..10")
    p.add_argument("--sizes", required=True, help="comma list of population sizes")
    p.add_argument("--regime", choices=sorted(_REGIMES), default="regular")
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--seed", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("cluster", help="run the ensemble on a CSV dataset")
    p.add_argument("--data", required=True, help="wide or long CSV")
    p.add_argument("--labels", default=None, help="truth labels CSV (for Rand index)")
    p.add_argument("--regime", choices=sorted(_REGIMES), default="regular")
    p.add_argument("--derivative", choices=["1", "2"], default=None)
    p.add_argument("--reps", default=None, help="replicate runs (fresh projection draws)")
    p.add_argument("--plot", action="store_true", help="emit SVG plots")
    _common_run_options(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("bench", help="Monte-Carlo benchmark on a model")
    p.add_argument("--model", type=int, required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--regime", choices=sorted(_REGIMES), default="regular")
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--reps", default=None)
    p.add_argument("--plot", action="store_true")
    _common_run_options(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("evaluate", help="Rand index of two label files")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("plot", help="SVG plot of curves colored by labels")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--regime", choices=sorted(_REGIMES), default="regular")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except DegenerateError as exc:
        print(f"degenerate result: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
