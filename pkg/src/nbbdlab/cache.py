"""Deterministic result caching keyed by run parameters.

A RunRecord captures one driver invocation: subcommand, fully resolved
parameters, payload outputs, wall time, tool version, and a content hash
of any input files.  The cache key hashes exactly what determines the
outputs (subcommand, parameters, version, input hash); wall time and the
outputs themselves stay out of the key, so a repeated request hits the
same entry and reproduces a byte-identical payload.  Payloads must be
JSON-representable without NaN or Infinity (canonical_json enforces it):
drivers encode undefined diagnostics as None.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

__all__ = ["RunRecord", "canonical_json", "content_hash", "run_key",
           "ResultsCache"]


@dataclass(frozen=True)
class RunRecord:
    """One completed driver run, as persisted in the results cache."""

    subcommand: str
    parameters: dict
    outputs: dict
    wall_time_s: float
    version: str
    input_hash: str

    @property
    def output_hash(self) -> str:
        return hashlib.sha256(
            canonical_json(self.outputs).encode("utf-8")).hexdigest()

    @property
    def key(self) -> str:
        return run_key(self.subcommand, self.parameters, self.version,
                       self.input_hash)


def canonical_json(obj) -> str:
    """Sorted-keys, fixed-separator JSON: equal dicts give equal bytes."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def content_hash(paths) -> str:
    """sha256 over the concatenated bytes of the given files, each framed
    by its length so distinct splits cannot collide; '' for no inputs."""
    paths = [p for p in (paths or []) if p is not None]
    if not paths:
        return ""
    h = hashlib.sha256()
    for p in paths:
        data = Path(p).read_bytes()
        h.update(str(len(data)).encode("ascii"))
        h.update(b"\0")
        h.update(data)
    return h.hexdigest()


def run_key(subcommand: str, parameters: dict, version: str,
            input_hash: str) -> str:
    payload = canonical_json({"subcommand": subcommand,
                              "parameters": parameters,
                              "version": version,
                              "input_hash": input_hash})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResultsCache:
    """File-per-record cache under a root directory; disabled for root None."""

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root is not None else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> dict | None:
        """The stored record dict, or None on miss/disabled cache."""
        if self.root is None:
            return None
        path = self._path(key)
        if not path.is_file():
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def put(self, record: RunRecord, key: str | None = None) -> None:
        """Store the record, by default under its own parameter-derived key.

        Callers whose lookup key differs from the record's echoed
        parameters (drivers normalize grids, paths, and defaults) pass
        the lookup key explicitly so a rerun finds its own entry."""
        if self.root is None:
            return
        key = key or record.key
        entry = asdict(record)
        entry["output_hash"] = record.output_hash
        tmp = self._path(key).with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(entry))
        os.replace(tmp, self._path(key))
