"""JSON wire formats for states and channels.

State file::

    {"dim": d, "trace_class": "normalized" | "subnormalized",
     "matrix": [[[re, im], ...], ...]}

Channel file::

    {"in_dim": n, "out_dim": m, "kind": "cptp" | "tni", "kraus": [matrix, ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .qstate import (
    NORMALIZED,
    DensityState,
    QuantumChannel,
    as_matrix,
    validate_state,
)


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data, field: str = "matrix") -> np.ndarray:
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {field!r}: not a nested numeric array ({exc})") from None
    if a.ndim != 3 or a.shape[2] != 2:
        raise ParseError(f"field {field!r}: expected rows x cols x [re, im], got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParseError(f"field {field!r}: non-finite entry")
    return a[..., 0] + 1j * a[..., 1]


def _require(d: dict, key: str):
    if key not in d:
        raise ParseError(f"missing field {key!r}")
    return d[key]


def state_to_dict(state) -> dict:
    m = as_matrix(state)
    tc = state.trace_class if isinstance(state, DensityState) else NORMALIZED
    return {"dim": m.shape[0], "trace_class": tc, "matrix": encode_matrix(m)}


def state_from_dict(d: dict) -> DensityState:
    if not isinstance(d, dict):
        raise ParseError("state file must contain a JSON object")
    dim = _require(d, "dim")
    tc = d.get("trace_class", NORMALIZED)
    m = decode_matrix(_require(d, "matrix"))
    if m.shape != (dim, dim):
        raise ParseError(f"field 'matrix': shape {m.shape} does not match dim {dim}")
    return validate_state(m, tc)


def channel_to_dict(ch: QuantumChannel) -> dict:
    return {
        "in_dim": ch.in_dim,
        "out_dim": ch.out_dim,
        "kind": ch.kind,
        "kraus": [encode_matrix(k) for k in ch.kraus],
    }


def channel_from_dict(d: dict) -> QuantumChannel:
    if not isinstance(d, dict):
        raise ParseError("channel file must contain a JSON object")
    in_dim, out_dim = _require(d, "in_dim"), _require(d, "out_dim")
    kraus = [decode_matrix(k, f"kraus[{i}]") for i, k in enumerate(_require(d, "kraus"))]
    for i, k in enumerate(kraus):
        if k.shape != (out_dim, in_dim):
            raise ParseError(f"field 'kraus[{i}]': shape {k.shape}, expected {(out_dim, in_dim)}")
    return QuantumChannel(tuple(kraus), d.get("kind", "cptp"))


def _read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_state(path) -> DensityState:
    return state_from_dict(_read_json(path))


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)))


def load_channel(path) -> QuantumChannel:
    return channel_from_dict(_read_json(path))


def save_channel(ch: QuantumChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch)))
