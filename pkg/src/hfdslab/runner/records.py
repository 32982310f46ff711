"""Append-only JSONL record log and flat exports.

One record per line:

    {"schema": 1, "kind": "train"|"measure"|"fit", "config_hash": "...",
     "point": {...}, "payload": {...}, "meta": {"ts": ..., "wall_ms": ...,
     "version": ...}}

Everything outside "meta" is deterministic for a given config: re-running a
config reproduces the payload bytes exactly (criterion: byte-identical
payloads excluding timestamps). Exports split by kind, one file per kind,
stable column order, shortest round-trip floats.
"""

from __future__ import annotations

import csv
import io
import json
import time
from pathlib import Path

from .. import __version__

SCHEMA_VERSION = 1
KINDS = ("train", "measure", "fit")


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=True)


def point_key(kind: str, point: dict) -> str:
    return f"{kind}:{_canonical(point)}"


def payload_line(record: dict) -> str:
    """The deterministic part of a record (everything but meta)."""
    return _canonical({k: v for k, v in record.items() if k != "meta"})


class RecordWriter:
    """Serialized appender; the single place records get written."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, kind: str, config_hash: str, point: dict, payload: dict,
               wall_ms: float = 0.0) -> dict:
        if kind not in KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        record = {
            "schema": SCHEMA_VERSION,
            "kind": kind,
            "config_hash": config_hash,
            "point": point,
            "payload": payload,
            "meta": {"ts": time.time(), "wall_ms": wall_ms,
                     "version": __version__},
        }
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(_canonical(record) + "\n")
        return record

    def completed_keys(self) -> set:
        done = set()
        for rec in read_records(self.path):
            done.add((rec["config_hash"], point_key(rec["kind"], rec["point"])))
        return done


def read_records(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list):
        out[prefix] = json.dumps(obj)
    else:
        out[prefix] = obj


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def export(records: list[dict], fmt: str, out_dir) -> list[Path]:
    """Write one file per record kind; returns the paths written."""
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown export format {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for kind in KINDS:
        rows = [r for r in records if r["kind"] == kind]
        if not rows:
            continue
        path = out_dir / f"records_{kind}.{fmt}"
        if fmt == "jsonl":
            with path.open("w", encoding="utf-8") as fh:
                for r in rows:
                    fh.write(_canonical(r) + "\n")
        else:
            flats = []
            for r in rows:
                f: dict = {}
                _flatten("", r, f)
                flats.append(f)
            lead = ["schema", "kind", "config_hash"]
            rest = sorted({k for f in flats for k in f} - set(lead))
            cols = lead + rest
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for f in flats:
                w.writerow([_csv_cell(f.get(c)) for c in cols])
            path.write_text(buf.getvalue(), encoding="utf-8")
        written.append(path)
    return written
