"""File formats used by the command line tool.

Matrices travel as comma-separated values with 17 significant digits,
enough to round-trip a double.  Point sets are d rows by n columns, one
point per column, same as in memory.  Echo arrival times travel as JSON,
an array of per-microphone arrays, because microphones can hear different
numbers of echoes.
"""

from __future__ import annotations

import json

import numpy as np


def load_matrix(path) -> np.ndarray:
    """Read a CSV matrix; a single row or value still comes back 2-d."""
    arr = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return arr


def save_matrix(path, values) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(values, dtype=float)), delimiter=",", fmt="%.17g")


def load_vector(path) -> np.ndarray:
    """Read a CSV file as a flat vector regardless of its row/column layout."""
    return load_matrix(path).reshape(-1)


def load_times(path) -> list:
    """Read per-microphone arrival times from JSON: an array of arrays of
    seconds, one inner array per microphone, each ascending."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list) or not data:
        raise ValueError("expected a JSON array of per-microphone time arrays")
    out = []
    for i, times in enumerate(data):
        if not isinstance(times, list):
            raise ValueError(f"entry {i} is not an array of times")
        arr = np.asarray(times, dtype=float).reshape(-1)
        if arr.size and np.any(np.diff(arr) < 0):
            raise ValueError(f"times for microphone {i + 1} are not ascending")
        out.append(arr)
    return out
