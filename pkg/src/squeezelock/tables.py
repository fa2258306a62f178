"""Plot-ready tables and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def _fmt(v):
    return format(float(v), ".12g")


@dataclass
class CurveTable:
    columns: list
    rows: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, len(self.columns))
        if self.rows.shape[1] != len(self.columns):
            raise ValueError("row width does not match the column count")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("table contains non-finite values")

    @classmethod
    def from_columns(cls, columns, provenance=""):
        names = list(columns)
        return cls(names, np.column_stack([np.asarray(columns[k], dtype=float)
                                           for k in names]), provenance)

    def column(self, name):
        return self.rows[:, self.columns.index(name)]

    def to_csv(self, path=None):
        buf = io.StringIO()
        if self.provenance:
            buf.write(f"# {self.provenance}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def read_csv(path):
    """Read a table written by :meth:`CurveTable.to_csv`."""
    lines = Path(path).read_text().splitlines()
    provenance = ""
    if lines and lines[0].startswith("# "):
        provenance = lines.pop(0)[2:]
    reader = csv.reader(lines)
    columns = next(reader)
    rows = [[float(v) for v in r] for r in reader]
    return CurveTable(columns, np.array(rows).reshape(len(rows), len(columns)), provenance)


def spectrogram_csv(spec, path=None):
    """Dense matrix: first column is the bin start time (s), header carries Hz."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time_s"] + [_fmt(f) for f in spec.frequencies])
    for t, row in zip(spec.times, spec.values):
        w.writerow([_fmt(t)] + [_fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def spectrogram_record(spec):
    return {
        "bin_duration_s": spec.bin_duration,
        "fft_segment_s": spec.fft_segment,
        "pickup_lines": [list(p) for p in spec.pickup_lines],
        "times_s": [float(t) for t in spec.times],
        "frequencies_hz": [float(f) for f in spec.frequencies],
        "values_db": [[float(v) for v in row] for row in spec.values],
    }


def write_json(record, path=None):
    text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
