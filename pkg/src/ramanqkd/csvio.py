"""CSV emission and ingestion.

Every emitted file starts with ``#`` comment lines echoing the command and the
resolved parameters, followed by a header row. Numbers are written with
``repr`` so output is locale-independent and round-trips exactly.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

from .calib import CountRecord
from .errors import ConfigError
from .plans import parse_plan

COUNT_RECORD_COLUMNS = ("plan_id", "direction", "length_km", "counts_per_gate", "n_gates")


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):
        return format_value(v.item())
    return str(v)


def flatten(d: dict, prefix: str = "") -> list[tuple[str, str]]:
    out = []
    for key in sorted(d):
        v = d[key]
        name = f"{prefix}{key}"
        if isinstance(v, dict):
            out.extend(flatten(v, name + "."))
        elif isinstance(v, (list, tuple)):
            out.append((name, " ".join(_compact(x) for x in v)))
        else:
            out.append((name, format_value(v)))
    return out


def _compact(x) -> str:
    if isinstance(x, (list, tuple)):
        return ":".join(_compact(y) for y in x)
    return format_value(x)


def render_csv(columns: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n" if line else "#\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_text(text: str, path: str | Path | None, stream=None):
    if path is None:
        stream.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def strip_comments(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def read_count_records(path: str | Path, power_dbm: float) -> list[CountRecord]:
    """Load a count-record CSV; ``plan_id`` is a preset name or a plan file path."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    missing = set(COUNT_RECORD_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ConfigError(f"{path}: missing columns {', '.join(sorted(missing))}")
    plans = {}
    out = []
    for lineno, row in enumerate(reader, 2):
        key = (row["plan_id"], row["direction"])
        try:
            if key not in plans:
                plans[key] = parse_plan(row["plan_id"], power_dbm=power_dbm,
                                        direction=row["direction"])
            out.append(CountRecord(plans[key], float(row["length_km"]),
                                   float(row["counts_per_gate"]), int(row["n_gates"])))
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}: data row {lineno - 1}: {exc}") from None
    return out


def write_count_records(records: Iterable[CountRecord], comments: Sequence[str] = ()) -> str:
    rows = [(r.plan.name, r.plan.direction, r.z_km, r.counts_per_gate, r.n_gates)
            for r in records]
    return render_csv(COUNT_RECORD_COLUMNS, rows, comments)
