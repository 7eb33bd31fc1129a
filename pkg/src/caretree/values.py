"""Typed blackboard values: booleans, numbers, text, durations, timestamps.

Durations and timestamps are distinct types on purpose: a timer period must
be a duration, and comparing a duration against a bare number is an authoring
bug we want surfaced, not coerced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import TypeMismatchError


@dataclass(frozen=True)
class Duration:
    """A length of virtual time, stored in seconds."""

    seconds: float

    def __post_init__(self):
        if self.seconds < 0:
            raise ValueError("duration must be non-negative")


@dataclass(frozen=True)
class Timestamp:
    """A point on the virtual timeline, in seconds since run start."""

    seconds: float


TypedValue = bool | int | float | str | Duration | Timestamp

_UNIT_SECONDS = {"s": 1, "m": 60, "h": 3600, "d": 86400}
_DURATION_RE = re.compile(r"^(\d+(?:\.\d+)?)([smhd])$")


def parse_duration(text: str) -> Duration:
    m = _DURATION_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad duration {text!r}; expected forms like 15s, 30m, 2h, 3d")
    return Duration(float(m.group(1)) * _UNIT_SECONDS[m.group(2)])


def format_duration(d: Duration) -> str:
    # Largest unit that divides the value exactly keeps files readable: 7200 -> 2h.
    secs = d.seconds
    for unit in ("d", "h", "m"):
        size = _UNIT_SECONDS[unit]
        if secs >= size and secs % size == 0:
            return f"{int(secs // size)}{unit}"
    return f"{_trim_number(secs)}s"


def _trim_number(x: float):
    return int(x) if float(x).is_integer() else x


def value_kind(value: TypedValue) -> str:
    # bool is a subclass of int, so it must be checked first.
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "text"
    if isinstance(value, Duration):
        return "duration"
    if isinstance(value, Timestamp):
        return "timestamp"
    raise TypeMismatchError(f"unsupported blackboard value type {type(value).__name__}")


_ORDERED_KINDS = {"number", "duration", "timestamp"}


def compare_values(op: str, left: TypedValue, right: TypedValue) -> bool:
    lk, rk = value_kind(left), value_kind(right)
    if lk != rk:
        raise TypeMismatchError(f"cannot compare {lk} with {rk}")
    lval = left.seconds if lk in ("duration", "timestamp") else left
    rval = right.seconds if rk in ("duration", "timestamp") else right
    if op == "==":
        return lval == rval
    if op == "!=":
        return lval != rval
    if lk not in _ORDERED_KINDS:
        raise TypeMismatchError(f"ordering comparison {op!r} not defined for {lk} values")
    if op == "<":
        return lval < rval
    if op == "<=":
        return lval <= rval
    if op == ">":
        return lval > rval
    if op == ">=":
        return lval >= rval
    raise ValueError(f"unknown comparison operator {op!r}")


def literal_text(value: TypedValue) -> str:
    """Canonical source form of a literal, as written in the DSL."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return str(_trim_number(value))
    if isinstance(value, Duration):
        return format_duration(value)
    if isinstance(value, Timestamp):
        return f"@{_trim_number(value.seconds)}"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeMismatchError(f"unsupported literal type {type(value).__name__}")


def value_to_json(value: TypedValue):
    """JSON encoding used by scenario files, traces, and the HTTP API."""
    if isinstance(value, Duration):
        return {"duration": format_duration(value)}
    if isinstance(value, Timestamp):
        return {"timestamp": value.seconds}
    return value


def value_from_json(raw) -> TypedValue:
    if isinstance(raw, dict):
        if set(raw) == {"duration"}:
            spec = raw["duration"]
            return parse_duration(spec) if isinstance(spec, str) else Duration(float(spec))
        if set(raw) == {"timestamp"}:
            return Timestamp(float(raw["timestamp"]))
        raise ValueError(f"bad typed value object {raw!r}")
    if isinstance(raw, (bool, int, float, str)):
        return raw
    raise ValueError(f"unsupported value {raw!r}")
