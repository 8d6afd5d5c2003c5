"""File formats: scheme files, JSON reports, slot traces, run manifests.

Field names are documented in ``docs/formats.md``. Reports are written with
sorted keys and no timestamps so repeated runs are byte-identical; the
timestamp lives in the manifest only.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .core import Scheme
from .errors import ArgumentError

SCHEME_FILE_VERSION = "1"
TOOL_VERSION = "0.1.0"


def rational(q: Fraction) -> dict:
    """Exact rational plus a 6-place decimal for humans."""
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator, "decimal": f"{float(q):.6f}"}


def read_rational(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(obj["num"], obj["den"])
    if isinstance(obj, (int, str)):
        return Fraction(obj)
    raise ArgumentError(f"not a rational: {obj!r}")


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(obj: Any, path: Optional[Path]) -> str:
    text = dumps(obj)
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text


# -- scheme files -------------------------------------------------------------

def scheme_to_document(scheme: Scheme) -> dict:
    doc = {
        "version": SCHEME_FILE_VERSION,
        "v": scheme.v,
        "k": scheme.k,
        "m": scheme.m,
        "label": scheme.label,
        "sequences": [list(s) for s in scheme.sequences],
    }
    if scheme.metadata:
        doc["metadata"] = to_jsonable(dict(scheme.metadata))
    return doc


def scheme_from_document(doc: dict) -> Scheme:
    if not isinstance(doc, dict):
        raise ArgumentError("scheme file must hold a JSON object")
    version = doc.get("version")
    if version != SCHEME_FILE_VERSION:
        raise ArgumentError(f"unsupported scheme file version {version!r}")
    for key in ("v", "k", "m", "sequences"):
        if key not in doc:
            raise ArgumentError(f"scheme file is missing {key!r}")
    seqs = doc["sequences"]
    if len(seqs) != doc["k"]:
        raise ArgumentError(f"k={doc['k']} but the file lists {len(seqs)} sequences")
    if any(len(s) != doc["v"] for s in seqs):
        raise ArgumentError(f"every sequence must have length v={doc['v']}")
    base = int(doc.get("channel_base", 0))
    scheme = Scheme.from_channels(seqs, base=base, m=doc["m"], label=doc.get("label", ""),
                                  metadata=dict(doc.get("metadata") or {}))
    return scheme


def save_scheme(scheme: Scheme, path: Path) -> None:
    Path(path).write_text(dumps(scheme_to_document(scheme)), encoding="utf-8")


def load_scheme(path: Path) -> Scheme:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"{path}: not valid JSON ({exc})") from exc
    return scheme_from_document(doc)


def channel_base(scheme: Scheme) -> int:
    return int(scheme.metadata.get("channel_base", 0))


# -- traces, manifests, csv ---------------------------------------------------

def trace_lines(trace) -> Iterable[str]:
    for rec in trace.records:
        yield json.dumps(to_jsonable(rec), sort_keys=True)


def write_trace(trace, path: Path) -> None:
    Path(path).write_text("".join(line + "\n" for line in trace_lines(trace)), encoding="utf-8")


def timestamp() -> str:
    """UTC timestamp, pinned by SOURCE_DATE_EPOCH when set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclasses.dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config: dict
    seed: int
    tool_version: str = TOOL_VERSION
    timestamp: str = ""


def make_manifest(subcommand: str, config: dict, seed: int) -> RunManifest:
    return RunManifest(subcommand, config, seed, TOOL_VERSION, timestamp())


def manifest_path(out: Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_csv(rows: list[dict], path: Path) -> None:
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    fields = sorted({k for r in rows for k in r})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _csv_cell(r.get(k)) for k in fields})


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)
