"""Parsing of quantities with explicit unit suffixes ("1T", "20 nm", "1e15cm-3")."""

from __future__ import annotations

import math
import re

from .errors import ParseError

UNITS = {
    "field": {"T": 1.0, "mT": 1e-3, "uT": 1e-6},
    "temperature": {"K": 1.0, "mK": 1e-3},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "min": 60.0, "h": 3600.0},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "volume": {"m3": 1.0, "cm3": 1e-6, "mm3": 1e-9},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "rate": {"s-1": 1.0, "/s": 1.0},
    "angular": {"rad/s": 1.0},
    "energy": {"J": 1.0},
    "resistance": {"ohm": 1.0, "kohm": 1e3},
    "concentration": {"m-3": 1.0, "cm-3": 1e6},
}
SI_UNIT = {
    "field": "T", "temperature": "K", "time": "s", "length": "m", "volume": "m^3",
    "frequency": "Hz", "rate": "1/s", "angular": "rad/s", "energy": "J",
    "resistance": "ohm", "concentration": "m^-3",
}

_NUMBER = re.compile(r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$")


def parse_quantity(text: str, kind: str, line=None, column=None) -> float | int | str:
    """Value of ``text`` in SI units for a parameter of the given kind.

    Kinds: a key of UNITS (suffix required), "number" (no suffix), "int",
    "str". ``line``/``column`` locate the text for error messages.
    """
    if kind == "str":
        return text.strip()
    m = _NUMBER.match(text)
    if not m:
        raise ParseError(f"not a number: {text!r}", line, column)
    value, suffix = float(m.group(1)), m.group(2)
    if kind in ("number", "int"):
        if suffix:
            raise ParseError(f"unexpected unit {suffix!r} on dimensionless value", line, column)
        if kind == "int":
            if value != int(value):
                raise ParseError(f"expected an integer, got {text!r}", line, column)
            return int(value)
        return value
    table = UNITS[kind]
    if not suffix:
        raise ParseError(f"missing unit for {kind} value {text!r} "
                         f"(one of {', '.join(table)})", line, column)
    if suffix not in table:
        raise ParseError(f"unknown {kind} unit {suffix!r} (one of {', '.join(table)})",
                         line, column)
    out = value * table[suffix]
    if not math.isfinite(out):
        raise ParseError(f"value {text!r} is not finite", line, column)
    return out


def parse_config(text: str):
    """Flat ``key = value`` lines; '#' starts a comment.

    Returns [(key, value, line, key_column, value_column)].
    """
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected key = value", n, col)
        key, value = body.split("=", 1)
        kcol = len(key) - len(key.lstrip()) + 1
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        if not key.strip():
            raise ParseError("empty key", n, kcol)
        out.append((key.strip(), value.strip(), n, kcol, vcol))
    return out
