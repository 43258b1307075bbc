"""JSON encoding for matrices, vectors and ensembles.

Matrices and vectors share one layout, ``{"dim": n, "entries": [[re, im], ...]}``,
row-major. ``json`` writes floats with ``repr`` so doubles round-trip bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, MetricQMError
from .linalg import as_matrix, as_vector


def _pairs(flat: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in flat]


def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    return {"dim": int(m.shape[0]), "entries": _pairs(m.reshape(-1))}


def vector_to_json(v) -> dict:
    x = as_vector(v)
    return {"dim": int(x.shape[0]), "entries": _pairs(x)}


def _entries(obj: dict) -> tuple[int, np.ndarray]:
    try:
        dim = int(obj["dim"])
        raw = obj["entries"]
        values = np.array([complex(float(re), float(im)) for re, im in raw], dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise MetricQMError(f"malformed matrix/vector JSON: {exc}") from exc
    if dim < 1:
        raise MetricQMError(f"dim must be positive, got {dim}")
    return dim, values


def matrix_from_json(obj: dict) -> np.ndarray:
    dim, values = _entries(obj)
    if values.size != dim * dim:
        raise DimensionMismatch(f"matrix of dim {dim} needs {dim * dim} entries, got {values.size}")
    return as_matrix(values.reshape(dim, dim))


def vector_from_json(obj: dict) -> np.ndarray:
    dim, values = _entries(obj)
    if values.size != dim:
        raise DimensionMismatch(f"vector of dim {dim} needs {dim} entries, got {values.size}")
    return as_vector(values)


def load_matrix(path: str | Path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MetricQMError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(obj)


def dump_matrix(a, path: str | Path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(a)))
