"""JSON helpers: canonical dumps, digests, norm specs and OFF ingestion."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError, GeometryError


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _clean(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, float) or isinstance(obj, np.floating):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj, indent=None) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(_clean(obj), sort_keys=True, indent=indent, default=_default, allow_nan=False)


def digest(obj) -> str:
    return hashlib.sha256(dumps(obj).encode()).hexdigest()


def parse_float(v) -> float:
    if isinstance(v, str):
        if v in ("inf", "Infinity", "+inf"):
            return math.inf
        raise ConfigError(f"cannot parse {v!r} as a number")
    return float(v)


def norm_from_json(obj, bodies=None):
    from .bodies import body_from_json
    from .geometry import GaugeNorm, PNorm

    kind = obj.get("kind")
    if kind == "p":
        return PNorm(parse_float(obj.get("p", 2.0)))
    if kind == "weighted":
        return PNorm(parse_float(obj["p"]), tuple(obj["w"]))
    if kind == "gauge":
        ref = obj["body"]
        if isinstance(ref, str):
            if not bodies or ref not in bodies:
                raise ConfigError(f"unknown body id {ref!r} in gauge norm")
            return GaugeNorm(bodies[ref])
        return GaugeNorm(body_from_json(ref, bodies))
    raise ConfigError(f"unknown norm kind {kind!r}")


def read_off(source, dim=None, base_dir=None) -> np.ndarray:
    """Vertex list of an OFF file (faces are ignored; the hull is recomputed).

    With ``dim=2`` only the first two coordinates are kept.
    """
    path = Path(source)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    lines = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or not lines[0].upper().endswith("OFF"):
        raise GeometryError(f"{path} is not an OFF file")
    header = lines[0].split()
    rest = lines[1:]
    if len(header) > 1:
        counts = header[1:]
    else:
        counts, rest = rest[0].split(), rest[1:]
    nv = int(counts[0])
    verts = np.array([[float(v) for v in rest[i].split()] for i in range(nv)])
    if dim is not None:
        verts = verts[:, :dim]
    return verts
