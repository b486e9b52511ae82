"""Report container and deterministic CSV / JSON serialization.

Floats are written with 17 significant digits so binary64 values survive a
round trip.  JSON has no NaN, so a NaN float is written as null.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Any, Iterable

from . import __version__

SCHEMA_VERSION = 1

# column name -> type, per row kind; order is the CSV column order
ROW_SCHEMAS: dict[str, dict[str, type]] = {
    "zm": {
        "modulus": int,
        "subgroup_order": int,
        "subgroup_index": int,
        "basis": str,
        "bound": float,
        "bound_main": float,
        "generating_primes": list,
        "largest_needed_prime": int,
        "pass_zm": bool,
        "pass_main": bool,
        "status": str,
        "reason": str,
    },
    "quad": {
        "fundamental_disc": int,
        "conductor": int,
        "discriminant": int,
        "conductor_norm": int,
        "class_number": int,
        "invariant_factors": str,
        "bound": float,
        "primes_used": list,
        "threshold_prime": int,
        "exceptional": bool,
        "status": str,
        "reason": str,
    },
    "constants": {
        "name": str,
        "computed": float,
        "constant": float,
        "relation": str,
        "slack": float,
        "status": str,
        "note": str,
    },
}


def timestamp() -> str:
    """UTC ISO-8601 time, pinned by SOURCE_DATE_EPOCH when that is set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def row_from_result(kind: str, result: Any) -> dict[str, Any]:
    d = dataclasses.asdict(result)
    if kind == "constants":
        d["status"] = "PASS" if d.pop("passed") else "FAIL"
    return {k: d[k] for k in ROW_SCHEMAS[kind]}


@dataclass
class Report:
    kind: str
    config: dict[str, Any]
    rows: list[dict[str, Any]] = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(default_factory=timestamp)

    @classmethod
    def from_results(cls, kind: str, config: dict[str, Any], results: Iterable[Any]) -> "Report":
        return cls(kind, config, [row_from_result(kind, r) for r in results])

    @property
    def summary(self) -> dict[str, int]:
        counts = {"total": len(self.rows), "passed": 0, "failed": 0, "skipped": 0}
        for r in self.rows:
            s = r["status"]
            if s in ("PASS", "VACUOUS"):
                counts["passed"] += 1
            elif s == "SKIPPED":
                counts["skipped"] += 1
            else:
                counts["failed"] += 1
        return counts

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0

    def summary_line(self) -> str:
        s = self.summary
        return f"{self.kind}: {s['total']} rows, {s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "version": self.version,
            "timestamp": self.timestamp,
            "kind": self.kind,
            "config": self.config,
            "rows": [{k: _json_value(v) for k, v in r.items()} for r in self.rows],
            "summary": self.summary,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        cols = list(ROW_SCHEMAS[self.kind])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_csv_cell(r[c]) for c in cols])
        return buf.getvalue()

    def dump(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _json_value(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return str(v)


def _parse_cell(text: str, typ: type):
    if typ is int:
        return int(text)
    if typ is float:
        return float(text)
    if typ is bool:
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r}")
        return text == "true"
    if typ is list:
        return [int(x) for x in text.split()]
    return text


def read_csv(text: str, kind: str) -> list[dict[str, Any]]:
    schema = ROW_SCHEMAS[kind]
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != list(schema):
        raise ValueError(f"CSV header does not match the {kind} schema")
    return [{k: _parse_cell(r[k], schema[k]) for k in schema} for r in reader]


def read_json(text: str) -> dict[str, Any]:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    schema = ROW_SCHEMAS[doc["kind"]]
    for r in doc["rows"]:
        for k, typ in schema.items():
            if typ is float and r[k] is None:
                r[k] = math.nan
            elif typ is float:
                r[k] = float(r[k])
    return doc
