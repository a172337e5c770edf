"""Experiment reports and delimited output.

Every experiment returns an ExperimentReport: per-point rows, the
empirical constants, and a status in {pass, fail, inconclusive}.  CSV
bodies are deterministic functions of the data (floats via repr); the
summary block is the only place timing metadata may appear.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .profiles import RatioProfile

PASS, FAIL, INCONCLUSIVE, ERROR = "pass", "fail", "inconclusive", "error"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2, ERROR: 3}


@dataclass
class ExperimentReport:
    name: str
    params: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    status: str = PASS
    seed: int | None = None
    notes: list = field(default_factory=list)

    def require(self, condition: bool, note: str):
        """Record a failed requirement without raising."""
        if not condition:
            self.status = FAIL
            self.notes.append(f"FAIL: {note}")
        return condition

    def inconclusive(self, note: str):
        if self.status != FAIL:
            self.status = INCONCLUSIVE
        self.notes.append(f"INCONCLUSIVE: {note}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def summary_mapping(self) -> dict:
        out = {"experiment": self.name, "status": self.status}
        if self.seed is not None:
            out["seed"] = str(self.seed)
        for k, v in self.params.items():
            out[f"param.{k}"] = _fmt(v)
        for k, v in self.constants.items():
            out[f"constant.{k}"] = _fmt(v)
        for i, note in enumerate(self.notes):
            out[f"note.{i}"] = str(note)
        return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, np.ndarray):
        return ",".join(repr(float(x)) for x in v.ravel())
    return str(v)


def csv_body(rows, columns=None) -> str:
    """Render rows as CSV text with a schema comment line; deterministic."""
    if columns is None:
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    buf = io.StringIO()
    buf.write("# columns: " + ",".join(columns) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv(path, rows, columns=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_body(rows, columns))
    return path


def keyvalue_body(mapping: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in mapping.items())


def write_keyvalues(path, mapping: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(keyvalue_body(mapping))
    return path


def profile_rows(profile: RatioProfile):
    return list(profile.rows())


def write_profile_csv(path, profile: RatioProfile) -> Path:
    return write_csv(path, profile_rows(profile), columns=["argument", "ratio"])


def write_batch_csv(path, batch) -> Path:
    """Exit batch as CSV plus a sidecar .meta key=value block."""
    d = batch.positions.shape[1]
    cols = (["index"] + [f"exit_x{k}" for k in range(d)]
            + ["time", "jump", "steps", "censored"])
    rows = []
    for i in range(batch.n):
        row = {"index": i, "time": batch.times[i],
               "jump": int(batch.jump_flags[i]), "steps": int(batch.steps[i]),
               "censored": int(batch.censored[i])}
        for k in range(d):
            row[f"exit_x{k}"] = batch.positions[i, k]
        rows.append(row)
    path = write_csv(path, rows, columns=cols)
    from .config import model_mapping  # deferred: avoids an import cycle
    from .geometry import geometry_to_mapping
    meta = {"seed": batch.seed, "n": batch.n, "strategy": batch.strategy,
            "start": _fmt(batch.start)}
    for k, v in batch.params.items():
        meta[f"param.{k}"] = _fmt(v)
    for k, v in model_mapping(batch.model).items():
        meta[f"model.{k}"] = v
    for k, v in geometry_to_mapping(batch.geometry).items():
        meta[f"geometry.{k}"] = v
    write_keyvalues(str(path) + ".meta", meta)
    return path


def stderr_of_fraction(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)
