"""CSV emission: '#'-prefixed header lines, comma separated, '.' decimals."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .analytics.mfd import AGGREGATE_COLUMNS, SAMPLE_COLUMNS, MfdEstimate


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def write_csv(path, columns, rows, header_lines=()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    path.write_text(buf.getvalue())
    return path


def read_csv(path) -> tuple[list[str], list[dict]]:
    """Header comment lines and data rows as dicts of strings."""
    lines = Path(path).read_text().splitlines()
    header = [ln[2:] if ln.startswith("# ") else ln[1:] for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return header, list(csv.DictReader(body))


def csv_body(path) -> str:
    return "\n".join(ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#"))


def write_mfd(mfd: MfdEstimate, out_dir, header_lines=(), stem=None) -> tuple[Path, Path]:
    stem = stem or f"mfd_{mfd.policy}"
    out_dir = Path(out_dir)
    agg = write_csv(out_dir / f"{stem}_aggregate.csv", AGGREGATE_COLUMNS, mfd.aggregate_rows(), header_lines)
    smp = write_csv(out_dir / f"{stem}_samples.csv", SAMPLE_COLUMNS, mfd.sample_rows(), header_lines)
    return agg, smp


def read_mfd_samples(path) -> MfdEstimate:
    _, rows = read_csv(path)
    if not rows:
        raise ValueError(f"{path}: no samples")
    ks = sorted({float(r["k"]) for r in rows})
    reps = max(int(r["rep"]) for r in rows) + 1
    samples = np.full((len(ks), reps), np.nan)
    for r in rows:
        samples[ks.index(float(r["k"])), int(r["rep"])] = float(r["flow"])
    first = rows[0]
    return MfdEstimate(
        first["policy"], float(first["lambda"]), float(first["delta"]), float(first["p"]), ks, samples
    )
