"""JSON encoding of product-state sets, density matrices and reports.

Set format::

    {"dims": [3, 3], "states": [{"locals": [[1, 0, 0], [1, -1, 0]]}, ...], "stopper": 4}

Amplitudes are JSON integers when integral, ``"p/q"`` strings when rational,
numbers when real floats and ``[re, im]`` pairs when complex.

Density matrix format::

    {"dims": [3, 3], "entries": [[re, im], ...], "declared_rank": 4}

with ``entries`` in row-major order.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

import numpy as np

from .states import DensityMatrix, LocalVector, ProductBasisSet, ProductState


class FormatError(ValueError):
    """Input JSON does not follow the expected schema."""


def encode_amp(a) -> Any:
    if isinstance(a, int):
        return a
    if isinstance(a, Fraction):
        return str(a)
    if isinstance(a, float):
        return a
    c = complex(a)
    return [c.real, c.imag]


def decode_amp(x) -> Any:
    if isinstance(x, bool):
        raise FormatError("boolean amplitude")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational amplitude {x!r}") from exc
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise FormatError(f"cannot decode amplitude {x!r}")


def set_to_dict(upb: ProductBasisSet) -> dict:
    out = {
        "dims": list(upb.dims),
        "states": [{"locals": [[encode_amp(a) for a in v.amps] for v in s.locals]} for s in upb.states],
        "stopper": upb.stopper,
    }
    if upb.name:
        out["name"] = upb.name
    return out


def set_from_dict(data: dict) -> ProductBasisSet:
    try:
        dims = data["dims"]
        states = data["states"]
    except (KeyError, TypeError) as exc:
        raise FormatError("product set needs 'dims' and 'states'") from exc
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise FormatError("'dims' must be a list of integers")
    parsed = []
    for i, st in enumerate(states):
        locals_ = st.get("locals") if isinstance(st, dict) else None
        if not isinstance(locals_, list):
            raise FormatError(f"state {i} lacks a 'locals' list")
        parsed.append(ProductState([LocalVector([decode_amp(a) for a in v]) for v in locals_]))
    return ProductBasisSet(dims, parsed, data.get("stopper"), data.get("name", ""))


def density_to_dict(rho: DensityMatrix) -> dict:
    flat = rho.matrix.reshape(-1)
    return {
        "dims": list(rho.dims),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
        "declared_rank": rho.declared_rank,
    }


def density_from_dict(data: dict) -> DensityMatrix:
    try:
        dims = [int(d) for d in data["dims"]]
        entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("density matrix needs 'dims' and 'entries'") from exc
    D = int(np.prod(dims))
    if len(entries) != D * D:
        raise FormatError(f"expected {D * D} entries for dims {dims}, got {len(entries)}")
    vals = np.array([decode_amp(e) if isinstance(e, list) else float(e) for e in entries], dtype=complex)
    return DensityMatrix(vals.reshape(D, D), dims, data.get("declared_rank"))


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_set(path: str) -> ProductBasisSet:
    return set_from_dict(load_json(path))


def load_density(path: str) -> DensityMatrix:
    return density_from_dict(load_json(path))


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and tuples into JSON types."""
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, str) else k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return c.real if c.imag == 0 else [c.real, c.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def digest(obj) -> str:
    """SHA-256 of the canonical JSON form of ``obj``."""
    canon = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
