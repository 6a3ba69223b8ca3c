"""File formats: complex JSON, point/matrix/signal/flow CSV, weights JSON.

All JSON is written with sorted keys and a fixed indent so identical inputs
produce byte-identical files. CSV numbers carry 17 significant digits, enough
to round-trip float64 exactly. Point and signal CSVs have no header; flow
CSVs carry a single header line naming every column.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complexes import Simplex, SimplicialComplex
from .errors import ValidationError
from .flows import FlowComponentTrace, FlowTrajectory
from .laplacians import HodgeLaplacian, WeightAssignment

FLOAT_FMT = "%.17g"


def jsonable(obj):
    """Recursively convert numpy containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(key): jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(val) for val in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def write_json(document: dict, path) -> None:
    text = json.dumps(jsonable(document), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def save_complex(complex_: SimplicialComplex, path) -> None:
    levels = {
        str(k): [list(s.vertices) for s in complex_.simplices(k)]
        for k in range(complex_.dimension + 1)
    }
    write_json({"dimension": complex_.dimension, "simplices": levels}, path)


def load_complex(path) -> SimplicialComplex:
    doc = read_json(path)
    if not isinstance(doc, dict) or "dimension" not in doc or "simplices" not in doc:
        raise ValidationError(f"{path}: expected keys 'dimension' and 'simplices'")
    dim = doc["dimension"]
    if not isinstance(dim, int) or dim < 0:
        raise ValidationError(f"{path}: dimension must be a nonnegative integer")
    levels = []
    for k in range(dim + 1):
        entries = doc["simplices"].get(str(k))
        if entries is None:
            raise ValidationError(f"{path}: missing simplex list for order {k}")
        group = []
        for verts in entries:
            if len(verts) != k + 1:
                raise ValidationError(
                    f"{path}: simplex {verts} listed at order {k}"
                )
            group.append(Simplex(tuple(verts)))
        levels.append(group)
    return SimplicialComplex(levels)


def save_points(points: np.ndarray, path) -> None:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValidationError("points must be a 2-D array")
    np.savetxt(path, pts, fmt=FLOAT_FMT, delimiter=",")


def load_points(path) -> np.ndarray:
    pts = np.loadtxt(path, delimiter=",", ndmin=2)
    if not np.all(np.isfinite(pts)):
        raise ValidationError(f"{path}: points must be finite")
    return pts


def save_matrix(matrix: np.ndarray, path) -> None:
    np.savetxt(path, np.asarray(matrix, dtype=float), fmt=FLOAT_FMT, delimiter=",")


def load_matrix(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def laplacian_envelope(laplacian: HodgeLaplacian, matrix_file: str | None = None):
    """JSON envelope with the shape, order, and weight vectors of an operator."""
    k = laplacian.order
    vectors = laplacian.weights.vectors
    doc = {
        "order": k,
        "shape": list(laplacian.full.shape),
        "weights": {
            "lower": vectors[k - 1] if k >= 1 else None,
            "level": laplacian.w_k,
            "upper": vectors[k + 1] if k + 1 < len(vectors) else None,
        },
    }
    if matrix_file is not None:
        doc["matrix_file"] = matrix_file
    return doc


def save_signal(values: np.ndarray, path) -> None:
    vec = np.asarray(values, dtype=float)
    if vec.ndim != 1:
        raise ValidationError("signal must be a 1-D vector")
    np.savetxt(path, vec, fmt=FLOAT_FMT)


def load_signal(path) -> np.ndarray:
    vec = np.loadtxt(path, ndmin=1)
    if vec.ndim != 1:
        raise ValidationError(f"{path}: signal must be a single column")
    if not np.all(np.isfinite(vec)):
        raise ValidationError(f"{path}: signal must be finite")
    return vec


def save_flow_csv(result: FlowTrajectory | FlowComponentTrace, path) -> None:
    """Time column, one column per state entry, then component norm columns
    when the result carries a component split."""
    dim = result.states.shape[1]
    header = ["time"] + [f"x{i}" for i in range(dim)]
    columns = [result.times[:, None], result.states]
    if isinstance(result, FlowComponentTrace):
        norms = result.component_norms()
        header += ["gradient_norm", "harmonic_norm", "curl_norm"]
        columns += [
            norms["gradient"][:, None],
            norms["harmonic"][:, None],
            norms["curl"][:, None],
        ]
    table = np.hstack(columns)
    np.savetxt(
        path, table, fmt=FLOAT_FMT, delimiter=",", header=",".join(header), comments=""
    )


def load_flow_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as handle:
        header = handle.readline().strip().split(",")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[1] != len(header):
        raise ValidationError(f"{path}: header and data column counts differ")
    return header, table


def save_weights(weights: WeightAssignment | dict, path) -> None:
    if isinstance(weights, WeightAssignment):
        vecs = {str(k): vec for k, vec in enumerate(weights.vectors)}
    else:
        vecs = {str(k): np.asarray(v, dtype=float) for k, v in weights.items()}
    write_json(vecs, path)


def load_weights(path) -> dict[int, np.ndarray]:
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected an order-to-weights mapping")
    out = {}
    for key, values in doc.items():
        try:
            order = int(key)
        except ValueError:
            raise ValidationError(f"{path}: non-integer order key {key!r}") from None
        vec = np.asarray(values, dtype=float)
        if vec.ndim != 1:
            raise ValidationError(f"{path}: weights for order {key} must be a list")
        out[order] = vec
    return out
