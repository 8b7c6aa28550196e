"""Pool/spec ingestion and JSON/CSV report emission.

Floats are written with 17 significant digits so every value reads back
bit-exactly, and output is a pure function of the report, so rerunning a
seeded command reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from functools import singledispatch

from .errors import InvalidInputError, MajvoteError, ParseError
from .experiments import ExperimentResult, ExperimentSpec
from .knapsack import SolveReport
from .voting import Classifier, ClassifierPool

SCHEMA_VERSION = "1"


class OutputError(MajvoteError):
    exit_code = 2


@dataclass
class Record:
    """A flat named result (one CSV row) for commands without a richer type."""

    kind: str
    fields: dict
    rows: list[dict] = field(default_factory=list)


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed {what}: {exc.msg}", exc.lineno, exc.colno) from None


def parse_pool(document: str) -> ClassifierPool:
    doc = _load_json(document, "pool file")
    if not isinstance(doc, dict) or set(doc) != {"classifiers"}:
        extra = sorted(set(doc) - {"classifiers"}) if isinstance(doc, dict) else None
        if extra:
            raise InvalidInputError(f"unknown pool file field(s): {extra}")
        raise InvalidInputError('pool file must be an object with a single "classifiers" list')
    entries = doc["classifiers"]
    if not isinstance(entries, list) or not entries:
        raise InvalidInputError('"classifiers" must be a nonempty list')
    members = []
    seen = set()
    for pos, entry in enumerate(entries):
        where = f"classifiers[{pos}]"
        if not isinstance(entry, dict):
            raise InvalidInputError(f"{where}: expected an object")
        unknown = set(entry) - {"id", "accuracy", "time"}
        if unknown:
            raise InvalidInputError(f"{where}: unknown field(s) {sorted(unknown)}")
        for key in ("id", "accuracy", "time"):
            if key not in entry:
                raise InvalidInputError(f"{where}: missing field {key!r}")
        cid = entry["id"]
        if not isinstance(cid, str) or not cid:
            raise InvalidInputError(f"{where}: field 'id' must be a nonempty string")
        for key in ("accuracy", "time"):
            v = entry[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InvalidInputError(f"{where} ({cid!r}): field {key!r} must be a number")
        if not 0.0 <= entry["accuracy"] <= 1.0:
            raise InvalidInputError(f"{where} ({cid!r}): field 'accuracy' = {entry['accuracy']} outside [0, 1]")
        if not entry["time"] >= 0.0:
            raise InvalidInputError(f"{where} ({cid!r}): field 'time' = {entry['time']} must be >= 0")
        if cid in seen:
            raise InvalidInputError(f"{where}: duplicate id {cid!r}")
        seen.add(cid)
        members.append(Classifier(cid, entry["accuracy"], entry["time"]))
    return ClassifierPool(tuple(members))


def load_experiment_spec(document: str) -> ExperimentSpec:
    return ExperimentSpec.from_dict(_load_json(document, "experiment spec"))


# -- conversion to documents and tables ---------------------------------------


@singledispatch
def to_document(obj) -> dict:
    raise TypeError(f"cannot report objects of type {type(obj).__name__}")


@to_document.register
def _(obj: SolveReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "solve_report",
        "best": list(obj.best.member_ids),
        "accuracy": obj.accuracy,
        "total_time": obj.total_time,
        "budget": obj.budget,
        "scheme": obj.scheme,
        "method": obj.method,
        "evaluations": obj.evaluations,
        "infeasible": obj.infeasible,
        "restarts_run": obj.restarts_run,
        "stop_rule": obj.stop_rule,
        "trace": [[i, a] for i, a in obj.trace],
    }


@to_document.register
def _(obj: ExperimentResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": obj.kind,
        "metadata": obj.metadata,
        "summary": obj.summary,
        "columns": obj.columns,
        "rows": [{c: r.get(c) for c in obj.columns} for r in obj.rows],
    }


@to_document.register
def _(obj: ClassifierPool) -> dict:
    return {"classifiers": [{"id": c.id, "accuracy": c.accuracy, "time": c.time} for c in obj]}


@to_document.register
def _(obj: Record) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": obj.kind, **obj.fields}
    if obj.rows:
        doc["rows"] = obj.rows
    return doc


@singledispatch
def to_table(obj) -> tuple[list[str], list[dict]]:
    raise TypeError(f"cannot tabulate objects of type {type(obj).__name__}")


@to_table.register
def _(obj: SolveReport):
    doc = to_document(obj)
    doc.pop("schema_version")
    doc.pop("kind")
    doc.pop("trace")
    return list(doc), [doc]


@to_table.register
def _(obj: ExperimentResult):
    return obj.columns, obj.rows


@to_table.register
def _(obj: ClassifierPool):
    return ["id", "accuracy", "time"], to_document(obj)["classifiers"]


@to_table.register
def _(obj: Record):
    if obj.rows:
        columns = list(obj.fields) + [c for c in obj.rows[0] if c not in obj.fields]
        return columns, [{**obj.fields, **r} for r in obj.rows]
    return list(obj.fields), [obj.fields]


# -- serialization -------------------------------------------------------------


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise InvalidInputError(f"cannot serialize non-finite value {x}")
    text = format(x, ".17g")
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def _json(value, level: int = 0) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(v, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(_json(v, level + 1) for v in value) + "]"
        return "[\n" + ",\n".join(pad + _json(v, level + 1) for v in value) + "\n" + end + "]"
    if hasattr(value, "item"):  # numpy scalar
        return _json(value.item(), level)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_json(obj) -> str:
    return _json(to_document(obj)) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    if hasattr(value, "item"):
        return _cell(value.item())
    return str(value)


def dumps_csv(obj) -> str:
    columns, rows = to_table(obj)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def emit_report(result, fmt: str = "json", destination="-") -> None:
    """Write ``result`` as JSON or CSV to a path, or to stdout for ``"-"``."""
    if fmt == "json":
        text = dumps_json(result)
    elif fmt == "csv":
        text = dumps_csv(result)
    else:
        raise InvalidInputError(f"unknown output format {fmt!r}; use json or csv")
    if destination in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write report to {destination}: {exc.strerror}") from None
