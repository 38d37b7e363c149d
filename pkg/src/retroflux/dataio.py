"""Ingestion and persistence: `t,value` CSV and JSON model documents.

CSV contract: UTF-8, header line exactly ``t,value``, one record per line,
``.`` decimal point, LF or CRLF endings, strictly increasing times.  Parse
errors carry the 1-based line number.  Model documents are JSON objects with
fields ``a``, ``b``, ``c``, optional ``forcing {kappa, alpha, eta}`` and an
optional ``metadata`` string map; unknown fields are rejected with their
path.  Both formats round-trip doubles exactly through shortest-repr
rendering.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyBodyError,
    MalformedHeaderError,
    MissingFieldError,
    NonMonotonicTimeError,
    NonNumericFieldError,
    TypeMismatchError,
    UnknownFieldError,
)
from .integrator import ForcingSpec, GoodwillSpec
from .model import ModelParams
from .series import TimeSeries

__all__ = [
    "ModelDocument",
    "decode_model_document",
    "encode_model_document",
    "format_number",
    "load_timeseries_csv",
    "write_timeseries_csv",
]

_HEADER = "t,value"


@dataclass(frozen=True)
class ModelDocument:
    """Model parameters plus optional forcing and free-form metadata."""

    params: ModelParams
    forcing: ForcingSpec | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, value in self.metadata.items():
            if not isinstance(key, str) or not isinstance(value, str):
                raise TypeError("metadata must map strings to strings")
        object.__setattr__(self, "metadata", dict(self.metadata))


def format_number(value: float) -> str:
    """Shortest decimal that parses back to the same double.

    Integral values drop the trailing ``.0`` (so 1.0 renders as ``1``);
    negative zero keeps its sign to stay bit-exact through a round trip.
    """
    if value == 0.0:
        return "-0" if math.copysign(1.0, value) < 0 else "0"
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _parse_field(token: str, line_number: int, column: str) -> float:
    if token != token.strip() or "_" in token:
        raise NonNumericFieldError(
            f"line {line_number}: {column} field {token!r} is not a plain decimal"
        )
    try:
        value = float(token)
    except ValueError:
        raise NonNumericFieldError(
            f"line {line_number}: {column} field {token!r} is not a number"
        ) from None
    if not math.isfinite(value):
        raise NonNumericFieldError(
            f"line {line_number}: {column} field {token!r} is not finite"
        )
    return value


def load_timeseries_csv(data: bytes | str) -> TimeSeries:
    """Parse a `t,value` CSV byte stream into a TimeSeries."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [line[:-1] if line.endswith("\r") else line for line in lines]
    if not lines or lines[0] != _HEADER:
        got = lines[0] if lines else ""
        raise MalformedHeaderError(f"expected header {_HEADER!r}, got {got!r}")
    times: list[float] = []
    values: list[float] = []
    for line_number, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 2:
            raise NonNumericFieldError(
                f"line {line_number}: expected 2 comma-separated fields, "
                f"got {len(fields)}"
            )
        t = _parse_field(fields[0], line_number, "t")
        v = _parse_field(fields[1], line_number, "value")
        if times and t <= times[-1]:
            raise NonMonotonicTimeError(
                f"line {line_number}: time {format_number(t)} does not increase "
                f"past {format_number(times[-1])}"
            )
        times.append(t)
        values.append(v)
    if not times:
        raise EmptyBodyError("CSV has a header but no records")
    return TimeSeries(np.array(times), np.array(values))


def write_timeseries_csv(series: TimeSeries) -> bytes:
    """Emit the exact format accepted by load_timeseries_csv."""
    lines = [_HEADER]
    for t, v in series:
        lines.append(f"{format_number(t)},{format_number(v)}")
    lines.append("")
    return "\n".join(lines).encode("utf-8")


# --- model documents -------------------------------------------------------


def encode_model_document(document: ModelDocument) -> str:
    """Serialize a ModelDocument to deterministic JSON text."""
    params = document.params
    obj: dict = {"a": params.a, "b": params.b, "c": params.c}
    forcing = document.forcing
    if forcing is not None:
        block: dict = {}
        if forcing.theta is not None:
            block["kappa"] = forcing.theta.kappa
            block["alpha"] = forcing.theta.alpha
        if isinstance(forcing.eta, TimeSeries):
            block["eta"] = [[t, v] for t, v in forcing.eta]
        elif forcing.eta is not None:
            block["eta"] = forcing.eta
        obj["forcing"] = block
    if document.metadata:
        obj["metadata"] = {k: document.metadata[k] for k in sorted(document.metadata)}
    return json.dumps(obj, indent=2) + "\n"


def _require_number(obj: dict, key: str, path: str) -> float:
    if key not in obj:
        raise MissingFieldError(path)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatchError(f"{path}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise TypeMismatchError(f"{path}: expected a finite number, got {value!r}")
    return value


def _decode_forcing(block, path: str) -> ForcingSpec:
    if not isinstance(block, dict):
        raise TypeMismatchError(f"{path}: expected an object, got {block!r}")
    for key in block:
        if key not in ("kappa", "alpha", "eta"):
            raise UnknownFieldError(f"{path}.{key}")
    theta = None
    if "kappa" in block or "alpha" in block:
        kappa = _require_number(block, "kappa", f"{path}.kappa")
        alpha = _require_number(block, "alpha", f"{path}.alpha")
        try:
            theta = GoodwillSpec(kappa=kappa, alpha=alpha)
        except ValueError as exc:
            raise TypeMismatchError(f"{path}: {exc}") from None
    eta = None
    if "eta" in block:
        raw = block["eta"]
        if isinstance(raw, bool):
            raise TypeMismatchError(f"{path}.eta: expected a number or pair list")
        if isinstance(raw, (int, float)):
            eta = float(raw)
            if not math.isfinite(eta):
                raise TypeMismatchError(f"{path}.eta: expected a finite number")
        elif isinstance(raw, list):
            for i, item in enumerate(raw):
                if (
                    not isinstance(item, list)
                    or len(item) != 2
                    or any(
                        isinstance(x, bool) or not isinstance(x, (int, float))
                        for x in item
                    )
                ):
                    raise TypeMismatchError(
                        f"{path}.eta[{i}]: expected a [time, value] number pair"
                    )
            try:
                eta = TimeSeries.from_pairs(raw)
            except ValueError as exc:
                raise TypeMismatchError(f"{path}.eta: {exc}") from None
        else:
            raise TypeMismatchError(
                f"{path}.eta: expected a number or pair list, got {raw!r}"
            )
    return ForcingSpec(theta=theta, eta=eta)


def decode_model_document(text: str | bytes) -> ModelDocument:
    """Parse JSON text into a validated ModelDocument.

    Unknown fields are rejected with their dotted path; numbers are parsed
    at full double precision; domain constraints (c >= 0, kappa > 0, ...)
    are enforced here, never clamped.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TypeMismatchError(f"document is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise TypeMismatchError(f"document root must be an object, got {obj!r}")
    for key in obj:
        if key not in ("a", "b", "c", "forcing", "metadata"):
            raise UnknownFieldError(key)
    a = _require_number(obj, "a", "a")
    b = _require_number(obj, "b", "b")
    c = _require_number(obj, "c", "c")
    try:
        params = ModelParams(a=a, b=b, c=c)
    except ValueError as exc:
        raise TypeMismatchError(str(exc)) from None
    forcing = _decode_forcing(obj["forcing"], "forcing") if "forcing" in obj else None
    metadata: dict[str, str] = {}
    if "metadata" in obj:
        block = obj["metadata"]
        if not isinstance(block, dict):
            raise TypeMismatchError("metadata: expected an object")
        for key, value in block.items():
            if not isinstance(value, str):
                raise TypeMismatchError(f"metadata.{key}: expected a string")
            metadata[key] = value
    return ModelDocument(params=params, forcing=forcing, metadata=metadata)
