"""JSON element files and CSV/JSON batch tables.

Element files look like::

    {"algebra": {"family": "real-sym", "rank": 2, "ambient": 3},
     "data": [a11, a12, a22]}

``data`` holds flat coordinates in the documented ordering. A ``matrix`` key may be
given instead: a nested ``r x r`` list (real family) or ``r x r x d`` list of
components. Matrices that are not exactly Hermitian are rejected.
"""

import csv
import io as _io
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import AlgebraDescriptor, Element, from_matrix
from .errors import SchemaError

FORMATS = ("csv", "json")


def parse_algebra(data):
    if not isinstance(data, dict):
        raise SchemaError("'algebra' must be an object with family/rank/ambient")
    unknown = set(data) - {"family", "rank", "ambient"}
    if unknown:
        raise SchemaError(f"unknown algebra keys: {sorted(unknown)}")
    try:
        return AlgebraDescriptor.from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"invalid algebra descriptor: {exc}") from exc


def element_from_dict(doc):
    if not isinstance(doc, dict) or "algebra" not in doc:
        raise SchemaError("element document needs an 'algebra' key")
    unknown = set(doc) - {"algebra", "data", "matrix"}
    if unknown:
        raise SchemaError(f"unknown element keys: {sorted(unknown)}")
    alg = parse_algebra(doc["algebra"])
    if ("data" in doc) == ("matrix" in doc):
        raise SchemaError("give exactly one of 'data' or 'matrix'")
    try:
        if "data" in doc:
            values = np.asarray(doc["data"], dtype=float)
            if values.shape != (alg.ambient_dim,):
                raise SchemaError(f"'data' must hold {alg.ambient_dim} numbers for {alg}")
            if not np.all(np.isfinite(values)):
                raise SchemaError("'data' contains non-finite numbers")
            return Element(alg, values)
        return from_matrix(alg, np.asarray(doc["matrix"], dtype=float))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed element data: {exc}") from exc


def element_to_dict(x):
    return {"algebra": x.alg.to_dict(), "data": [float(v) for v in x.coords]}


def read_element(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return element_from_dict(doc)


def write_element(x, path):
    Path(path).write_text(json.dumps(element_to_dict(x), indent=2) + "\n")


def _fmt(v):
    return format(float(v), ".17g")


def batch_metadata(alg, seed, extra=None, policy=None):
    meta = {
        "tool": "cone-wishart",
        "version": __version__,
        "algebra": alg.to_dict() if alg is not None else None,
        "seed": seed,
        "truncation_policy": policy.to_dict() if policy is not None else None,
    }
    if extra:
        meta.update(extra)
    return meta


def _timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_table(path, columns, rows, metadata, fmt="csv"):
    """Write a numeric table; ``path=None`` returns the text instead."""
    if fmt not in FORMATS:
        raise SchemaError(f"format must be one of {FORMATS}")
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.zeros((0, len(columns)))
    if fmt == "csv":
        buf = _io.StringIO()
        buf.write(f"# timestamp: {_timestamp()}\n")
        for key, value in metadata.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    else:
        doc = {"timestamp": _timestamp(), "metadata": metadata, "columns": list(columns), "rows": rows.tolist()}
        text = json.dumps(doc, indent=1) + "\n"
    if path is None:
        return text
    Path(path).write_text(text)
    return None


def read_table(path):
    """Inverse of :func:`write_table`; returns ``(columns, rows, metadata)``."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return doc["columns"], np.asarray(doc["rows"], dtype=float), doc["metadata"]
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            if key != "timestamp":
                meta[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = np.array([[float(v) for v in row] for row in reader], dtype=float)
    return columns, rows.reshape(-1, len(columns)), meta


def coordinate_columns(alg):
    return [f"c{k}" for k in range(alg.ambient_dim)]


def write_batch(batch, path, fmt="csv", policy=None):
    meta = batch_metadata(
        batch.alg,
        batch.seed,
        {"method": batch.method.value, "eta": batch.params.eta, "n_draws": len(batch)},
        policy,
    )
    return write_table(path, coordinate_columns(batch.alg), batch.coords, meta, fmt)


def read_batch(path):
    """Read a batch table back as ``(algebra, coords, metadata)``."""
    columns, rows, meta = read_table(path)
    alg = parse_algebra(meta["algebra"])
    if len(columns) != alg.ambient_dim:
        raise SchemaError("column count does not match the algebra")
    return alg, rows, meta


def dumps(obj):
    """JSON with non-finite floats written as strings."""

    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return str(v)
        if isinstance(v, dict):
            return {k: clean(w) for k, w in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(w) for w in v]
        if isinstance(v, np.generic):
            return clean(v.item())
        if isinstance(v, np.ndarray):
            return clean(v.tolist())
        return v

    return json.dumps(clean(obj), indent=2)
