"""Deterministic CSV and JSON writers for run outputs.

All numeric CSV values use 17 significant digits; JSON documents are dumped
with sorted keys and no incidental state (no timestamps), so re-running a
command with the same config and seed reproduces every output byte.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np


def fmt(x):
    """Format one number at 17 significant digits."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_matrix_csv(path, matrix):
    """Dense matrix as CSV: one row per line, comma-separated."""
    m = np.atleast_2d(np.asarray(matrix))
    with open(path, "w") as fh:
        for row in m:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_matrix_csv(path):
    with open(path) as fh:
        rows = [[float(v) for v in line.strip().split(",")] for line in fh if line.strip()]
    return np.asarray(rows)


def write_table_csv(path, header, rows):
    """CSV with a header row; cells may be str or numeric."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def dump_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def config_hash(config_dict):
    """Stable hash of a canonicalized config document."""
    blob = json.dumps(config_dict, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
