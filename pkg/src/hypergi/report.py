"""JSON artifacts: stable key order and floats fixed to 12 significant digits."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

REPORT_VERSION = 1


def _fix_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _fix_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fix_floats(v) for v in obj]
    return obj


def dumps(payload: dict) -> str:
    data = {"version": REPORT_VERSION, **payload}
    return json.dumps(_fix_floats(data), sort_keys=True, indent=2) + "\n"


def write(payload: dict, path: str | Path | None) -> str:
    text = dumps(payload)
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
