"""Newline-delimited wire format for the lockstep exchange.

Each record is one UTF-8 line holding a single JSON object with a fixed
key order and a "type" tag in {"hello", "meas", "cmd", "ctl", "end"}.
Floats are rendered as shortest round-trip decimals (Python float repr),
so decoding reproduces every field bit-exactly and a foreign runtime that
emits the same digits produces byte-identical lines.

The END session marker is its own record type on the wire; in the object
model it is a ControlFrame with kind END.
"""

import hashlib
import json
import math
from dataclasses import dataclass

from .errors import FrameEncodeError, FrameParseError, UnsupportedFrameError

PROTOCOL_VERSION = 1

CTL_READY = "READY"
CTL_PAUSE = "PAUSE"
CTL_RESUME = "RESUME"
CTL_END = "END"
CTL_ERROR = "ERROR"

EVENT_RELAY = "relay_closed"
EVENT_V_CEILING = "v_ceiling"
EVENT_I_CUTOFF = "i_cutoff"


@dataclass(frozen=True)
class MeasurementFrame:
    """Plant-to-controller measurands for one exchange."""

    seq: int
    t_sim: float
    v_primary: float
    v_secondary: float
    i_primary: float
    i_secondary: float
    relay_closed: bool
    event: str = None

    def __post_init__(self):
        object.__setattr__(self, "t_sim", float(self.t_sim))
        object.__setattr__(self, "v_primary", float(self.v_primary))
        object.__setattr__(self, "v_secondary", float(self.v_secondary))
        object.__setattr__(self, "i_primary", float(self.i_primary))
        object.__setattr__(self, "i_secondary", float(self.i_secondary))


@dataclass(frozen=True)
class CommandFrame:
    """Controller-to-plant reply; seq must echo the measurement seq."""

    seq: int
    ready: bool
    running_mode: str
    time_of_operation: float
    duty: float

    def __post_init__(self):
        object.__setattr__(self, "time_of_operation", float(self.time_of_operation))
        object.__setattr__(self, "duty", float(self.duty))
        if not 0.0 <= self.duty < 1.0:
            raise ValueError(f"duty {self.duty} outside [0, 1)")


@dataclass(frozen=True)
class ControlFrame:
    """Flow-control traffic: READY, PAUSE, RESUME, END, ERROR."""

    kind: str
    detail: str = ""

    def __post_init__(self):
        if self.kind not in (CTL_READY, CTL_PAUSE, CTL_RESUME, CTL_END, CTL_ERROR):
            raise ValueError(f"unknown control kind {self.kind!r}")


@dataclass(frozen=True)
class HelloFrame:
    """Session opener; the plant side's hello carries the loop parameters."""

    version: int
    role: str  # "plant" or "controller"
    dt_ctrl: float
    config: dict = None  # plant side only; controller echoes the digest
    digest: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dt_ctrl", float(self.dt_ctrl))


def _require_finite(frame, names, values):
    for name, value in zip(names, values):
        if not math.isfinite(value):
            raise FrameEncodeError(f"non-finite field {name!r} in {type(frame).__name__}")


def _dump(obj) -> bytes:
    return (json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def encode_frame(frame) -> bytes:
    """Encode any frame as one newline-terminated wire line."""
    if isinstance(frame, MeasurementFrame):
        _require_finite(
            frame,
            ("t_sim", "v_primary", "v_secondary", "i_primary", "i_secondary"),
            (frame.t_sim, frame.v_primary, frame.v_secondary, frame.i_primary, frame.i_secondary),
        )
        obj = {
            "type": "meas",
            "seq": frame.seq,
            "t": frame.t_sim,
            "vp": frame.v_primary,
            "vs": frame.v_secondary,
            "ip": frame.i_primary,
            "is": frame.i_secondary,
            "relay": frame.relay_closed,
        }
        if frame.event is not None:
            obj["event"] = frame.event
        return _dump(obj)
    if isinstance(frame, CommandFrame):
        _require_finite(
            frame, ("time_of_operation", "duty"), (frame.time_of_operation, frame.duty)
        )
        return _dump(
            {
                "type": "cmd",
                "seq": frame.seq,
                "ready": frame.ready,
                "mode": frame.running_mode,
                "top": frame.time_of_operation,
                "duty": frame.duty,
            }
        )
    if isinstance(frame, ControlFrame):
        if frame.kind == CTL_END:
            return _dump({"type": "end", "detail": frame.detail})
        return _dump({"type": "ctl", "kind": frame.kind, "detail": frame.detail})
    if isinstance(frame, HelloFrame):
        _require_finite(frame, ("dt_ctrl",), (frame.dt_ctrl,))
        obj = {
            "type": "hello",
            "version": frame.version,
            "role": frame.role,
            "dt_ctrl": frame.dt_ctrl,
        }
        if frame.config is not None:
            obj["config"] = frame.config
        obj["digest"] = frame.digest
        return _dump(obj)
    raise FrameEncodeError(f"cannot encode object of type {type(frame).__name__}")


def _reject_constant(name):
    raise FrameParseError(f"non-finite JSON constant {name}")


def _as_int(obj, field):
    if field not in obj:
        raise FrameParseError(f"missing required field {field!r}")
    v = obj[field]
    if type(v) is not int:
        raise FrameParseError(f"field {field!r} must be an integer")
    return v


def _as_float(obj, field):
    if field not in obj:
        raise FrameParseError(f"missing required field {field!r}")
    v = obj[field]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FrameParseError(f"field {field!r} must be a number")
    return float(v)


def _as_bool(obj, field):
    if field not in obj:
        raise FrameParseError(f"missing required field {field!r}")
    v = obj[field]
    if not isinstance(v, bool):
        raise FrameParseError(f"field {field!r} must be a boolean")
    return v


def _as_str(obj, field, default=None):
    if field not in obj:
        if default is not None:
            return default
        raise FrameParseError(f"missing required field {field!r}")
    v = obj[field]
    if not isinstance(v, str):
        raise FrameParseError(f"field {field!r} must be a string")
    return v


def decode_frame(line):
    """Decode one wire line (bytes or str) into its typed frame.

    Unknown fields are ignored for forward compatibility; missing required
    fields and malformed JSON are rejected with the failing byte offset.
    """
    if isinstance(line, bytes):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FrameParseError("line is not valid UTF-8", offset=exc.start) from exc
    else:
        text = line
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FrameParseError(f"bad JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(obj, dict):
        raise FrameParseError("record is not an object")
    tag = _as_str(obj, "type")
    if tag == "meas":
        seq = _as_int(obj, "seq")
        event = obj.get("event")
        if event is not None and not isinstance(event, str):
            raise FrameParseError("field 'event' must be a string")
        return MeasurementFrame(
            seq=seq,
            t_sim=_as_float(obj, "t"),
            v_primary=_as_float(obj, "vp"),
            v_secondary=_as_float(obj, "vs"),
            i_primary=_as_float(obj, "ip"),
            i_secondary=_as_float(obj, "is"),
            relay_closed=_as_bool(obj, "relay"),
            event=event,
        )
    if tag == "cmd":
        return CommandFrame(
            seq=_as_int(obj, "seq"),
            ready=_as_bool(obj, "ready"),
            running_mode=_as_str(obj, "mode"),
            time_of_operation=_as_float(obj, "top"),
            duty=_as_float(obj, "duty"),
        )
    if tag == "ctl":
        return ControlFrame(kind=_as_str(obj, "kind"), detail=_as_str(obj, "detail", ""))
    if tag == "end":
        return ControlFrame(kind=CTL_END, detail=_as_str(obj, "detail", ""))
    if tag == "hello":
        version = _as_int(obj, "version")
        config = obj.get("config")
        if config is not None and not isinstance(config, dict):
            raise FrameParseError("field 'config' must be an object")
        return HelloFrame(
            version=version,
            role=_as_str(obj, "role"),
            dt_ctrl=_as_float(obj, "dt_ctrl"),
            config=config,
            digest=_as_str(obj, "digest", ""),
        )
    raise UnsupportedFrameError(f"unknown frame type {tag!r}")


def canonical_json(obj) -> str:
    """Compact JSON with the caller's key order; the digest input format."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def config_digest(config_obj) -> str:
    """SHA-256 over the canonical serialization of a loop-config object."""
    return hashlib.sha256(canonical_json(config_obj).encode("utf-8")).hexdigest()
