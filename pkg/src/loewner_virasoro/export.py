"""Deterministic JSON/CSV artifact writers."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if all(ch not in text for ch in ".eE") and "n" not in text:
        text += ".0"
    return text


def _to_plain(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_to_plain(x) for x in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(x) for x in obj]
    return obj


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with sorted keys and floats at 17 significant digits."""

    def enc(o: Any, level: int) -> str:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None:
            return "null"
        if o is True:
            return "true"
        if o is False:
            return "false"
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _float(o)
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(x, (list, dict)) for x in o):
                return "[" + ", ".join(enc(x, level + 1) for x in o) + "]"
            return "[\n" + ",\n".join(pad + enc(x, level + 1) for x in o) + "\n" + end + "]"
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = sorted(o.items())
            body = ",\n".join(f"{pad}{enc(str(k), level + 1)}: {enc(v, level + 1)}" for k, v in items)
            return "{\n" + body + "\n" + end + "}"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(_to_plain(obj), 0) + "\n"


def canonical_hash(config: dict, length: int = 12) -> str:
    """Prefix of the SHA-256 of the config's canonical JSON form."""
    return hashlib.sha256(dumps(config, indent=0).encode()).hexdigest()[:length]


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_float(float(x)) for x in row])
    return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
