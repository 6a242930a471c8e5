"""Entropy and leakage over empirical run distributions.

Leakage of a deterministic program is the conditional entropy of the
observation given the low inputs, computed by the chain rule as
H(L', L) - H(L). All logs are base 2.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Hashable, Iterable, Mapping

from .errors import EmptyDistribution, EmptySuite
from .lang import DEFAULT_STEP_BUDGET, Observation, Program, runner, wrap64

if TYPE_CHECKING:
    from .hypergen import Hypertest

NEG_CLAMP = 1e-12


class EmpiricalDistribution:
    """Outcome counts; probabilities are count/total."""

    def __init__(self, counts: Mapping[Hashable, int] | None = None):
        self.counts: Counter = Counter()
        for k, c in (counts or {}).items():
            if c < 0:
                raise ValueError(f"negative count for {k!r}")
            if c:
                self.counts[k] = c

    @classmethod
    def from_samples(cls, samples: Iterable[Hashable]) -> EmpiricalDistribution:
        d = cls()
        d.counts.update(samples)
        return d

    def add(self, key: Hashable, count: int = 1) -> None:
        self.counts[key] += count

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def probabilities(self) -> dict:
        n = self.total
        return {k: c / n for k, c in self.counts.items()}

    def __len__(self) -> int:
        return len(self.counts)


def _entropy_of_counts(counts: Iterable[int]) -> float:
    counts = [c for c in counts if c > 0]
    n = sum(counts)
    if n == 0:
        raise EmptyDistribution("entropy of an empty distribution")
    h = -sum(c / n * math.log2(c / n) for c in counts)
    return max(h, 0.0)


def entropy(d: EmpiricalDistribution | Mapping[Hashable, int]) -> float:
    """Plug-in Shannon entropy in bits."""
    counts = d.counts if isinstance(d, EmpiricalDistribution) else d
    return _entropy_of_counts(counts.values())


# A run is (low key, observation); lows are tuples in policy order.
JointRuns = list[tuple[tuple[int, ...], Observation]]


def conditional_entropy(runs: JointRuns) -> float:
    """H(obs | low) = H(obs, low) - H(low), tiny negative residue clamped to 0."""
    if not runs:
        raise EmptyDistribution("no runs")
    joint = Counter(runs)
    low = Counter(l for l, _ in runs)
    h = _entropy_of_counts(joint.values()) - _entropy_of_counts(low.values())
    if h < 0:
        if h < -NEG_CLAMP:
            raise ArithmeticError(f"conditional entropy {h} is negative beyond rounding")
        h = 0.0
    return h


@dataclass(frozen=True)
class LeakEstimate:
    bits: float
    runs_used: int
    hypertests_used: int

    def to_json(self) -> dict:
        return {"bits": self.bits, "runs": self.runs_used, "hypertests": self.hypertests_used}


def _args(p: Program, low: Mapping[str, int], high: Mapping[str, int]) -> tuple[int, ...]:
    return tuple(wrap64(low[n] if n in low else high[n]) for n in p.input_names)


def hypertest_runs(p: Program, t: Hypertest, step_budget: int = DEFAULT_STEP_BUDGET) -> JointRuns:
    run = runner(p)
    key = tuple(t.low.values())
    return [(key, run(*_args(p, t.low, hb), budget=step_budget)) for hb in t.highs]


def leakage_of_hypertest(p: Program, t: Hypertest, step_budget: int = DEFAULT_STEP_BUDGET) -> float:
    """Entropy of the observations across the hypertest's secrets at its fixed low."""
    obs = [o for _, o in hypertest_runs(p, t, step_budget)]
    return entropy(Counter(obs))


def suite_leakage(p: Program, suite: list[Hypertest], step_budget: int = DEFAULT_STEP_BUDGET) -> LeakEstimate:
    if not suite:
        raise EmptySuite("hypertest suite is empty")
    widths = {len(t.highs) for t in suite}
    if len(widths) != 1:
        raise ValueError(f"hypertests have unequal high-binding counts: {sorted(widths)}")
    runs: JointRuns = []
    for t in suite:
        runs.extend(hypertest_runs(p, t, step_budget))
    return LeakEstimate(conditional_entropy(runs), len(runs), len(suite))
