"""JSON encodings for states, channels, measurements and results.

Complex entries are ``[re, im]`` pairs and floats are written with ``repr``
precision, so a dump/load round trip is bit-exact.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .measurements import POVM, VonNeumannMeasurement
from .qcore import (BipartiteState, DensityMatrix, DimensionError, Ensemble, PureState,
                    QuantumChannel)

SCHEMA = "v1"


class SchemaError(ValueError):
    """A JSON document does not follow the expected layout."""


def encode_complex(arr) -> list:
    arr = np.asarray(arr, dtype=np.complex128)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"complex array must be nested [re, im] pairs: {exc}") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise SchemaError("complex array must end in [re, im] pairs")
    out = np.empty(arr.shape[:-1], dtype=np.complex128)
    out.real, out.imag = arr[..., 0], arr[..., 1]
    return out


def _require(d: dict, *keys: str) -> None:
    if not isinstance(d, dict):
        raise SchemaError("expected a JSON object")
    missing = [k for k in keys if k not in d]
    if missing:
        raise SchemaError(f"missing field(s): {', '.join(missing)}")


def state_to_json(state) -> dict:
    if isinstance(state, PureState):
        return {"schema": SCHEMA, "dims": list(state.dims), "vector": encode_complex(state.vector)}
    return {"schema": SCHEMA, "dims": list(state.dims), "matrix": encode_complex(state.matrix)}


def state_from_json(d: dict) -> DensityMatrix:
    """Mixed or pure state; bipartite dims give a ``BipartiteState``."""
    _require(d, "dims")
    dims = tuple(int(x) for x in d["dims"])
    if "vector" in d:
        vec = decode_complex(d["vector"])
        if vec.ndim != 1:
            raise SchemaError("vector must be a list of [re, im] pairs")
        mat = PureState(vec, dims).density().matrix
    elif "matrix" in d:
        mat = decode_complex(d["matrix"])
        if mat.ndim != 2:
            raise SchemaError("matrix must be a list of rows of [re, im] pairs")
    else:
        raise SchemaError("state needs a 'matrix' or a 'vector' field")
    if int(np.prod(dims)) != mat.shape[0]:
        raise DimensionError(f"dims {list(dims)} do not match matrix size {mat.shape[0]}")
    if len(dims) == 2:
        return BipartiteState(mat, dims)
    return DensityMatrix(mat, dims)


def channel_to_json(ch: QuantumChannel) -> dict:
    return {"schema": SCHEMA, "dim_in": ch.dim_in, "dim_out": ch.dim_out,
            "kraus": encode_complex(ch.kraus)}


def channel_from_json(d: dict) -> QuantumChannel:
    _require(d, "kraus")
    ks = decode_complex(d["kraus"])
    if ks.ndim != 3:
        raise SchemaError("kraus must be a list of matrices")
    ch = QuantumChannel(ks)
    for key, val in (("dim_in", ch.dim_in), ("dim_out", ch.dim_out)):
        if key in d and int(d[key]) != val:
            raise DimensionError(f"{key} = {d[key]} disagrees with the Kraus shape ({val})")
    return ch


def measurement_to_json(meas) -> dict:
    return {"schema": SCHEMA, "dim": meas.dim, "type": meas.kind,
            "elements": encode_complex(meas.elements)}


def measurement_from_json(d: dict):
    _require(d, "type", "elements")
    ops = decode_complex(d["elements"])
    if d["type"] == "vn":
        return VonNeumannMeasurement(ops)
    if d["type"] == "povm":
        return POVM(ops)
    raise SchemaError(f"unknown measurement type {d['type']!r}")


def ensemble_to_json(ens: Ensemble) -> dict:
    return {"weights": [float(w) for w in ens.weights],
            "states": [state_to_json(s) for s in ens.states]}


def encode_certificate(cert) -> Any:
    if cert is None:
        return None
    if isinstance(cert, (POVM, VonNeumannMeasurement)):
        return {"kind": "measurement", **measurement_to_json(cert)}
    if isinstance(cert, Ensemble):
        return {"kind": "ensemble", **ensemble_to_json(cert)}
    if isinstance(cert, (DensityMatrix, PureState)):
        return {"kind": "state", **state_to_json(cert)}
    if hasattr(cert, "weights") and hasattr(cert, "a") and hasattr(cert, "b"):
        return {"kind": "separable", "weights": [float(w) for w in cert.weights],
                "a": encode_complex(cert.a), "b": encode_complex(cert.b)}
    if isinstance(cert, (tuple, list)):
        return [encode_certificate(c) for c in cert]
    raise TypeError(f"cannot encode certificate of type {type(cert).__name__}")


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def result_to_json(res) -> dict:
    return {"schema": SCHEMA, "name": res.name, "value": to_jsonable(res.value),
            "bound_direction": res.bound_direction,
            "certificate": encode_certificate(res.certificate),
            "report": to_jsonable(res.report), "extras": to_jsonable(res.extras)}


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, allow_nan=False) + "\n"


def digest(obj) -> str:
    """sha256 over the canonical compact JSON encoding."""
    text = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(text.encode()).hexdigest()


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj) -> Path:
    return atomic_write_text(path, dumps(obj))


def read_json(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
