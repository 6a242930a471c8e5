"""Deletion-driven leak localization.

Each statement is deleted in turn and the hypertest suite is re-measured on
the variant. The leakage reduction, normalized by the largest one, ranks the
statements; statements with equal normalized deltas form one class.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EditError, NoLeak
from .hypergen import HypertestSuite
from .lang import DEFAULT_STEP_BUDGET, Delete, Program, apply_edit
from .qif import suite_leakage

FLOOR = 0.05
CLASS_TOL = 1e-9


@dataclass(frozen=True)
class StatementScore:
    sid: int
    span: tuple[int, int] | None
    raw_delta: float
    normalized: float
    class_id: int
    probability: float


@dataclass(frozen=True)
class LocalizationMap:
    scores: tuple[StatementScore, ...]
    l_o: float
    max_delta: float

    @property
    def probabilities(self) -> list[float]:
        return [s.probability for s in self.scores]

    @classmethod
    def uniform(cls, p: Program) -> LocalizationMap:
        """No localization information: every statement equally likely."""
        n = len(p.statements)
        return cls(tuple(StatementScore(i, s.span, 0.0, 0.0, 0, 1 / n) for i, s in enumerate(p.statements)), 0.0, 0.0)

    def to_json(self) -> dict:
        return {
            "l_o": self.l_o,
            "max_delta": self.max_delta,
            "statements": [
                {
                    "id": s.sid,
                    "span": list(s.span) if s.span else None,
                    "raw_delta_bits": s.raw_delta,
                    "normalized": s.normalized,
                    "class": s.class_id,
                    "probability": s.probability,
                }
                for s in self.scores
            ],
        }


def classes_of(values: list[float], tol: float = CLASS_TOL) -> list[int]:
    """Group equal-within-``tol`` values; class 0 holds the largest."""
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    ids = [0] * len(values)
    cls, anchor = -1, None
    for i in order:
        if anchor is None or anchor - values[i] > tol:
            cls += 1
            anchor = values[i]
        ids[i] = cls
    return ids


def localize(p: Program, suite: HypertestSuite, step_budget: int = DEFAULT_STEP_BUDGET) -> LocalizationMap:
    l_o = suite_leakage(p, suite, step_budget).bits
    if l_o <= 0:
        raise NoLeak(f"{p.name}: suite leakage is 0, nothing to localize")
    raw = []
    for sid in range(len(p.statements)):
        try:
            variant = apply_edit(p, Delete(sid))
        except EditError:
            raw.append(0.0)
            continue
        raw.append(max(0.0, l_o - suite_leakage(variant, suite, step_budget).bits))
    max_delta = max(raw)
    normalized = [d / max_delta for d in raw] if max_delta > 0 else [0.0] * len(raw)
    weights = [x + FLOOR for x in normalized]
    total = sum(weights)
    class_ids = classes_of(normalized)
    scores = tuple(
        StatementScore(i, p.statements[i].span, raw[i], normalized[i], class_ids[i], weights[i] / total)
        for i in range(len(raw))
    )
    return LocalizationMap(scores, l_o, max_delta)
