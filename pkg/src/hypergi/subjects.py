"""Bundled subject corpus.

The corpus directory holds ``.hg`` files plus ``manifest.json``; the
``HYPERGI_CORPUS`` environment variable points at an alternative directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import UnknownSubject
from .lang import Program, SecurityPolicy, parse

REPAIR_CLASSES = ("fixable_no_loss", "tradeoff_only", "leak_free")


@dataclass(frozen=True)
class SubjectEntry:
    name: str
    path: Path
    expected_leak_bits: float
    repair_class: str


def corpus_dir() -> Path:
    env = os.environ.get("HYPERGI_CORPUS")
    return Path(env) if env else Path(__file__).parent / "corpus"


def manifest() -> dict[str, SubjectEntry]:
    root = corpus_dir()
    data = json.loads((root / "manifest.json").read_text())
    entries = {}
    for item in data["subjects"]:
        if item["repair_class"] not in REPAIR_CLASSES:
            raise ValueError(f"bad repair_class for {item['name']}: {item['repair_class']}")
        entries[item["name"]] = SubjectEntry(
            item["name"], root / item["path"], float(item["expected_leak_bits"]), item["repair_class"]
        )
    return entries


def subject_names() -> list[str]:
    return list(manifest())


def load_subject(name: str) -> tuple[Program, SecurityPolicy]:
    entries = manifest()
    if name not in entries:
        raise UnknownSubject(f"unknown subject {name!r}; known: {', '.join(entries)}")
    p = parse(entries[name].path.read_text(encoding="utf-8"), name=name)
    return p, p.policy


def load_program(ref: str) -> Program:
    """Load by corpus name, or from a ``.hg`` path when ``ref`` names a file."""
    path = Path(ref)
    if path.suffix == ".hg" or path.is_file():
        return parse(path.read_text(encoding="utf-8"), name=path.stem)
    return load_subject(ref)[0]
