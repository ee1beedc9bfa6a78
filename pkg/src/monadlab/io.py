"""JSON tensor files and run reports.

Exact entries are strings ("3", "-2/7"); complex entries are [re, im]
pairs; prime-field entries are residue strings in [0, p).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .linalg import DEFAULT_PRIME, to_fraction_array
from .tensors import ATensor, STensor

FORMAT = "monadlab-tensor"
FORMAT_VERSION = 1
_PRIME_RE = re.compile(r"^prime\((\d+)\)$")


class FormatError(ValueError):
    """Malformed or inconsistent tensor/report file."""


def tool_version() -> str:
    from . import __version__

    return __version__


@dataclass
class TensorFile:
    kind: str                  # "ATensor" or "STensor"
    k: int
    field: str                 # "rational", "complex" or "prime(p)"
    tensor: object             # ATensor or STensor
    metadata: dict = field(default_factory=dict)

    @property
    def prime(self) -> Optional[int]:
        m = _PRIME_RE.match(self.field)
        return int(m.group(1)) if m else None


def expected_shape(kind: str, k: int) -> tuple:
    if kind == "ATensor":
        return (4, k, 2 * k + 2)
    if kind == "STensor":
        return (k, k, 4, 4)
    raise FormatError(f"unknown tensor kind {kind!r}")


# --------------------------------------------------------------- entries

def _encode_scalar(x, fld: str):
    if fld == "complex":
        z = complex(x)
        return [z.real, z.imag]
    q = Fraction(x)
    return str(q)


def _decode_scalar(x, fld: str, p: Optional[int]):
    if fld == "complex":
        if not (isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x)):
            raise FormatError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if not isinstance(x, str):
        raise FormatError(f"exact entry must be a string, got {x!r}")
    try:
        q = Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {x!r}") from exc
    if p is not None:
        if q.denominator != 1 or not 0 <= q.numerator < p:
            raise FormatError(f"prime-field entry {x!r} is not a residue mod {p}")
    return q


def _nested(arr, fld: str):
    if not isinstance(arr, np.ndarray):
        return _encode_scalar(arr, fld)
    if arr.ndim == 0:
        return _encode_scalar(arr.item(), fld)
    return [_nested(a, fld) for a in arr]


def _shape_of(obj, fld: str) -> tuple:
    """Shape of a nested list, treating [re, im] pairs as scalars in complex files."""
    if fld == "complex" and isinstance(obj, list) and len(obj) == 2 and all(
            isinstance(t, (int, float)) for t in obj):
        return ()
    if not isinstance(obj, list):
        return ()
    if not obj:
        return (0,)
    shapes = {_shape_of(o, fld) for o in obj}
    if len(shapes) != 1:
        raise FormatError("ragged entries")
    return (len(obj),) + shapes.pop()


def _flat_entries(obj, fld: str, depth: int) -> list:
    if depth == 0:
        return [obj]
    out = []
    for o in obj:
        out.extend(_flat_entries(o, fld, depth - 1))
    return out


# ---------------------------------------------------------------- tensors

def _field_of_tensor(t) -> str:
    return "rational" if t.exact else "complex"


def tensor_to_json(t, metadata: Optional[dict] = None, fld: Optional[str] = None) -> dict:
    if isinstance(t, ATensor):
        kind, arr = "ATensor", t.a
    elif isinstance(t, STensor):
        kind, arr = "STensor", t.blocks()
    else:
        raise TypeError("expected ATensor or STensor")
    fld = fld or _field_of_tensor(t)
    meta = {"tool_version": tool_version()}
    meta.update(metadata or {})
    return {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "kind": kind,
        "k": t.k,
        "field": fld,
        "entries": _nested(np.asarray(arr), fld),
        "metadata": meta,
    }


def tensor_from_json(obj: dict) -> TensorFile:
    if not isinstance(obj, dict):
        raise FormatError("tensor file must be a JSON object")
    if obj.get("format") != FORMAT:
        raise FormatError(f"not a {FORMAT} file")
    if obj.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported version {obj.get('version')!r}")
    kind = obj.get("kind")
    k = obj.get("k")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise FormatError(f"bad k {k!r}")
    fld = obj.get("field")
    p = None
    if fld not in ("rational", "complex"):
        m = _PRIME_RE.match(str(fld))
        if not m:
            raise FormatError(f"unknown field {fld!r}")
        p = int(m.group(1))
    shape = expected_shape(kind, k)
    entries = obj.get("entries")
    got = _shape_of(entries, fld)
    if got != shape:
        raise FormatError(f"{kind} with k={k} needs shape {shape}, file has {got}")
    flat = [_decode_scalar(x, fld, p) for x in _flat_entries(entries, fld, len(shape))]
    if fld == "complex":
        arr = np.array(flat, dtype=complex).reshape(shape)
    else:
        arr = np.empty(len(flat), dtype=object)
        arr[:] = flat
        arr = arr.reshape(shape)
    try:
        if kind == "ATensor":
            tensor = ATensor.from_array(arr, exact=fld != "complex")
        else:
            tensor = _stensor_from_blocks(arr, fld)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    meta = obj.get("metadata", {})
    if not isinstance(meta, dict):
        raise FormatError("metadata must be an object")
    return TensorFile(kind, k, fld, tensor, meta)


def _stensor_from_blocks(arr: np.ndarray, fld: str) -> STensor:
    k = arr.shape[0]
    for i in range(k):
        for j in range(k):
            a, b = arr[i, j], arr[j, i]
            bad = np.any(a != -b) if fld != "complex" else not np.allclose(a, -b, atol=0)
            if bad:
                raise FormatError(f"sigma blocks ({i},{j}) and ({j},{i}) are not opposite")
    return STensor.from_blocks(arr, exact=fld != "complex")


def dumps(obj: dict) -> str:
    """Canonical serialisation: sorted keys, one-space indent, trailing newline."""
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def save_tensor(path: str, t, metadata: Optional[dict] = None, fld: Optional[str] = None) -> None:
    text = dumps(tensor_to_json(t, metadata, fld))
    with open(path, "w") as fh:
        fh.write(text)


def load_tensor(path: str) -> TensorFile:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return tensor_from_json(obj)


# ---------------------------------------------------------------- reports

def jsonable(x):
    """Convert numpy scalars/arrays, Fractions and complex numbers for JSON output."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    return x


TIMING_KEYS = frozenset({"seconds", "max_seconds", "audit_seconds", "timings"})


def strip_timings(x):
    """Drop wall-clock fields so reports compare byte-for-byte."""
    if isinstance(x, dict):
        return {k: strip_timings(v) for k, v in x.items() if k not in TIMING_KEYS}
    if isinstance(x, list):
        return [strip_timings(v) for v in x]
    return x


@dataclass
class RunReport:
    command: list
    config: dict
    results: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    passed: bool = True
    failures: list = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        self.failures.append(message)

    def to_json(self, with_timings: bool = True) -> dict:
        out = {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "summary": {"passed": self.passed, "failures": self.failures},
            "tool_version": tool_version(),
        }
        if with_timings:
            out["timings"] = self.timings
            return jsonable(out)
        return strip_timings(jsonable(out))


def save_report(path: str, report: RunReport, with_timings: bool = True) -> None:
    text = dumps(report.to_json(with_timings))
    with open(path, "w") as fh:
        fh.write(text)


def load_report(path: str) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    for key in ("command", "config", "results", "summary"):
        if key not in obj:
            raise FormatError(f"report lacks {key!r}")
    return obj
