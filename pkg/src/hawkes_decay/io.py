"""File formats: event CSV, parameter JSON, decay-estimate JSON and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import EventStream, HawkesParams, RealizationSet, as_realizations
from .estimators import DecayEstimates
from .exceptions import EmptyInput, ParseError, ValidationError

__all__ = [
    "EVENT_HEADER",
    "parse_events",
    "format_events",
    "write_events",
    "parse_params",
    "read_estimates",
    "dumps",
    "write_json",
    "write_text",
    "RunManifest",
    "config_hash",
]

EVENT_HEADER = ("realization_id", "dim", "t")


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8", None) from exc


def parse_events(path, M: int = 1) -> RealizationSet:
    """Read an event CSV with header ``realization_id,dim,t``.

    Rows are grouped by realization id in order of first appearance. The
    horizon of each realization is its last event time.

    Raises
    ------
    EmptyInput
        The file holds no header or no rows.
    ParseError
        A malformed row; the message carries the 1-based line number.
    NonMonotoneTime, DimOutOfRange
        From :class:`EventStream` validation.
    """
    text = _read_text(path)
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows:
        raise EmptyInput(f"{path}: empty event file")
    header = tuple(c.strip() for c in rows[0])
    if header != EVENT_HEADER:
        raise ParseError(f"expected header {','.join(EVENT_HEADER)}, got {','.join(header)}", 1)
    groups: dict[int, tuple[list, list]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
        try:
            rid, d, t = int(row[0]), int(row[1]), float(row[2])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from exc
        if not math.isfinite(t):
            raise ParseError(f"time {row[2]!r} is not finite", lineno)
        ts, ds = groups.setdefault(rid, ([], []))
        ts.append(t)
        ds.append(d)
    if not groups:
        raise EmptyInput(f"{path}: no events")
    streams = []
    for rid, (ts, ds) in groups.items():
        try:
            streams.append(EventStream(ts, ds, n_dims=M, realization_id=rid))
        except ValidationError as exc:
            raise type(exc)(f"realization {rid}: {exc}") from exc
    return RealizationSet(tuple(streams))


def format_events(realizations) -> str:
    rs = as_realizations(realizations)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVENT_HEADER)
    for s in rs:
        for t, d in zip(s.times, s.dims):
            w.writerow((s.realization_id, int(d), repr(float(t))))
    return buf.getvalue()


def write_events(path, realizations) -> Path:
    return write_text(path, format_events(realizations))


def parse_params(path) -> HawkesParams:
    """Read a parameter JSON document ``{"mu", "alpha", "beta"}``.

    A scalar ``beta`` is the shared decay; a matrix gives per-pair decays,
    which can be simulated and scored but not fitted.
    """
    try:
        doc = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{exc.msg} in {path}", exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return HawkesParams.from_dict(doc)


def read_estimates(path) -> DecayEstimates:
    try:
        doc = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{exc.msg} in {path}", exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return DecayEstimates.from_dict(doc)


def _plain(obj):
    # json's float repr is the shortest round-trip form, i.e. up to 17 digits
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(doc) -> str:
    return json.dumps(_plain(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(path, text: str) -> Path:
    """Write atomically via a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, doc) -> Path:
    return write_text(path, dumps(doc))


def config_hash(config: dict, input_files=()) -> str:
    """SHA-256 over the canonical config JSON and the bytes of every input file."""
    h = hashlib.sha256(dumps(config).encode("utf-8"))
    for p in input_files:
        h.update(b"\0" + str(Path(p).name).encode("utf-8") + b"\0")
        h.update(Path(p).read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    command: list
    config_hash: str
    seed: int | None
    version: str
    started: str
    finished: str = ""
    outputs: list = field(default_factory=list)

    # wall-clock entries; everything else is reproducible
    VOLATILE = ("started", "finished")

    def to_dict(self) -> dict:
        return {
            "command": list(self.command),
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "outputs": sorted(self.outputs),
        }

    def write(self, directory) -> Path:
        return write_json(Path(directory) / "manifest.json", self.to_dict())
