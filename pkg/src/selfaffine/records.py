"""Key=value records and CSV with exact rationals.

A record is a block of ``key=value`` lines; records are separated by one
blank line.  Values: integers and rationals as ``n`` or ``n/d``, booleans as
``true``/``false``, intervals as ``[lo, hi]``, missing values as ``none``.
"""

from __future__ import annotations

import csv
import enum
import io
from fractions import Fraction
from typing import Iterable

from .params import RationalInterval, parse_rational


def format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, (int, Fraction, RationalInterval)):
        return str(value)
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    text = str(value)
    if "\n" in text:
        raise ValueError("record values must be single-line")
    return text


def format_record(items: Iterable[tuple[str, object]]) -> str:
    lines = []
    for key, value in items:
        if "=" in key or not key:
            raise ValueError(f"bad record key {key!r}")
        lines.append(f"{key}={format_value(value)}")
    return "\n".join(lines) + "\n"


def parse_records(text: str) -> list[dict[str, str]]:
    records, cur = [], {}
    for line in text.splitlines():
        if not line.strip():
            if cur:
                records.append(cur)
                cur = {}
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"not a key=value line: {line!r}")
        cur[key] = value
    if cur:
        records.append(cur)
    return records


def parse_bool(text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_interval(text: str) -> RationalInterval:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"not an interval: {text!r}")
    lo, hi = s[1:-1].split(",")
    return RationalInterval(parse_rational(lo), parse_rational(hi))


SWEEP_COLUMNS = ("a", "verdict", "branch", "in_outer_band", "in_inner_band", "oracle")


def write_csv(rows: Iterable[dict], columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[dict]:
    """Inverse of ``write_csv`` for sweep rows: ``a`` comes back as a Fraction."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = dict(row)
        parsed["a"] = parse_rational(row["a"])
        for key in ("in_outer_band", "in_inner_band"):
            if row.get(key) not in (None, "none"):
                parsed[key] = parse_bool(row[key])
        out.append(parsed)
    return out
