"""CSV ingestion and emission.

Two data layouts are supported: wide (one row per curve, header row holds
the grid times; regular data only) and long (curve_id,time,value rows; any
regime). Observation times are affinely rescaled onto [0, 1] at load time
using the global extremes, because every projection family is defined on
the unit interval. Label files are curve_id,label rows and all joins
between files go through the curve id.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dataset import FunctionalDataset, Regime, build_dataset
from .errors import ConfigError, DataError

_LONG_HEADER = ["curve_id", "time", "value"]


def _fmt(x: float) -> str:
    return repr(float(x))


def _rescale_times(records: list[tuple]) -> list[tuple]:
    times = np.array([t for _, t, _ in records], dtype=float)
    if not np.all(np.isfinite(times)):
        raise DataError("observation times must be finite")
    lo, hi = times.min(), times.max()
    if hi <= lo:
        raise DataError("observation times must span a non-empty interval")
    return [(cid, (t - lo) / (hi - lo), v) for cid, t, v in records]


def load_dataset_csv(path, fragmented: bool = False) -> FunctionalDataset:
    """Load a wide or long CSV (sniffed from the header) as a dataset."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows or len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header = rows[0]
    records: list[tuple] = []
    if [h.strip() for h in header[:3]] == _LONG_HEADER:
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected curve_id,time,value")
            try:
                records.append((row[0], float(row[1]), float(row[2])))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    else:
        if header[0].strip() != "curve_id":
            raise DataError(
                f"{path}: expected a 'curve_id' first column or a "
                "curve_id,time,value header"
            )
        try:
            times = [float(h) for h in header[1:]]
        except ValueError as exc:
            raise DataError(f"{path}: wide header must hold grid times: {exc}") from exc
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: row length does not match header")
            try:
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            records.extend((row[0], t, v) for t, v in zip(times, values))
    return build_dataset(_rescale_times(records), fragmented=fragmented)


def write_dataset_csv(path, dataset: FunctionalDataset) -> None:
    """Write regular data in the wide layout, anything else in the long one."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if dataset.regime is Regime.REGULAR:
            grid = dataset.common_grid
            writer.writerow(["curve_id"] + [_fmt(t) for t in grid.points])
            for cid, curve in zip(dataset.ids, dataset.curves):
                writer.writerow([cid] + [_fmt(v) for v in curve.values])
        else:
            writer.writerow(_LONG_HEADER)
            for cid, curve in zip(dataset.ids, dataset.curves):
                for t, v in zip(curve.grid.points, curve.values):
                    writer.writerow([cid, _fmt(t), _fmt(v)])


def write_labels_csv(path, ids, labels) -> None:
    labels = list(labels)
    ids = list(ids)
    if len(ids) != len(labels):
        raise DataError("ids and labels must have equal length")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["curve_id", "label"])
        for cid, lab in zip(ids, labels):
            writer.writerow([cid, lab])


def load_labels_csv(path) -> dict[str, str]:
    """Label file as an id -> label mapping (both kept as strings)."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows or [h.strip() for h in rows[0][:2]] != ["curve_id", "label"]:
        raise DataError(f"{path}: expected a curve_id,label header")
    out: dict[str, str] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) < 2:
            raise DataError(f"{path}:{lineno}: expected curve_id,label")
        if row[0] in out:
            raise DataError(f"{path}:{lineno}: duplicate curve id {row[0]!r}")
        out[row[0]] = row[1]
    if not out:
        raise DataError(f"{path}: no label rows")
    return out


def parse_config_file(path) -> dict[str, str]:
    """Flat key=value configuration file; '#' starts a comment line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out
