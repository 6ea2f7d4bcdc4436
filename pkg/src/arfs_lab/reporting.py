"""Structured pass/fail reports and their deterministic serialization.

Reports are plain values; nothing here asserts or exits. The JSON and CSV
writers are bit-stable for fixed inputs: keys are sorted and every float is
rounded to 12 significant digits before formatting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence


@dataclass(frozen=True)
class Report:
    """Outcome of one verification: {"check", "pass", "margin", "witness"}."""

    check: str
    passed: bool
    margin: float
    witness: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "check": self.check,
            "pass": self.passed,
            "margin": self.margin,
            "witness": self.witness,
        }


def round_floats(obj: Any, sig: int = 12) -> Any:
    """Recursively round floats to ``sig`` significant digits; numpy arrays
    and scalars are converted to plain Python values first."""
    if hasattr(obj, "tolist") and hasattr(obj, "shape"):
        obj = obj.tolist()
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return repr(obj)
        return float(f"{obj:.{sig}g}")
    if isinstance(obj, dict):
        return {str(k): round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, sig) for v in obj]
    return obj


def _as_dict(item: Any) -> dict:
    return item.to_jsonable() if isinstance(item, Report) else dict(item)


def emit_report(results: Sequence[Any], format: str, out: str) -> None:
    """Write reports (Report objects or plain row dicts) to ``out``.

    JSON: one object with a "reports" array, sorted keys. CSV: the union of
    row keys as a sorted header plus one row per entry; non-scalar cells are
    embedded as compact JSON. Output bytes depend only on the inputs.
    """
    rows = [round_floats(_as_dict(r)) for r in results]
    if format == "json":
        text = json.dumps({"reports": rows}, sort_keys=True, indent=2) + "\n"
    elif format == "csv":
        keys = sorted({k for row in rows for k in row})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow(
                [
                    json.dumps(row.get(k), sort_keys=True)
                    if isinstance(row.get(k), (dict, list))
                    else row.get(k, "")
                    for k in keys
                ]
            )
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {format!r}")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
