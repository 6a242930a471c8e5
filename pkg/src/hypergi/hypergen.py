"""Binary-search hypertest generation.

The low-input space is halved repeatedly; each half is probed with a few
low points, each run against several distinct secrets. Leaking hypertests go
into a max-priority queue and the search descends into the half with the
larger mean entropy.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .errors import Unsplittable
from .lang import DEFAULT_STEP_BUDGET, InputDecl, Program, SecurityPolicy, decode_index
from .qif import LeakEstimate, leakage_of_hypertest, suite_leakage


@dataclass
class Hypertest:
    low: dict[str, int]
    highs: list[dict[str, int]]
    observed_entropy: float = 0.0

    def low_key(self) -> tuple[int, ...]:
        return tuple(self.low.values())

    def to_json(self) -> dict:
        return {"low": dict(self.low), "highs": [dict(h) for h in self.highs], "entropy_bits": self.observed_entropy}

    @classmethod
    def from_json(cls, data: dict) -> Hypertest:
        return cls(dict(data["low"]), [dict(h) for h in data["highs"]], float(data.get("entropy_bits", 0.0)))


HypertestSuite = list[Hypertest]


@dataclass(frozen=True)
class Region:
    """Per low input an inclusive interval, in policy order."""

    names: tuple[str, ...]
    bounds: tuple[tuple[int, int], ...]
    depth: int = 0

    @classmethod
    def full(cls, policy: SecurityPolicy) -> Region:
        return cls(policy.low_names, tuple((d.lo, d.hi) for d in policy.low_inputs))

    def widths(self) -> list[int]:
        return [hi - lo + 1 for lo, hi in self.bounds]

    @property
    def size(self) -> int:
        n = 1
        for w in self.widths():
            n *= w
        return n

    def decls(self) -> tuple[InputDecl, ...]:
        return tuple(InputDecl(n, "low", lo, hi) for n, (lo, hi) in zip(self.names, self.bounds))


def split_region(r: Region) -> tuple[Region, Region]:
    widths = r.widths()
    widest = max(widths, default=1)
    if widest < 2:
        raise Unsplittable(f"region {dict(zip(r.names, r.bounds))} is a single point")
    axis = widths.index(widest)
    lo, hi = r.bounds[axis]
    mid = (lo + hi) // 2
    left = r.bounds[:axis] + ((lo, mid),) + r.bounds[axis + 1:]
    right = r.bounds[:axis] + ((mid + 1, hi),) + r.bounds[axis + 1:]
    return Region(r.names, left, r.depth + 1), Region(r.names, right, r.depth + 1)


@dataclass
class GenParams:
    samples_per_half: int = 8
    highs_per_test: Optional[int] = None  # None means min(8, |high domain|)
    max_depth: int = 12
    max_suite: int = 100
    step_budget: int = DEFAULT_STEP_BUDGET
    seed: int = 0

    def __post_init__(self):
        for name in ("samples_per_half", "max_depth", "max_suite", "step_budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.highs_per_test is not None and self.highs_per_test < 1:
            raise ValueError("highs_per_test must be positive")

    def highs_for(self, policy: SecurityPolicy) -> int:
        space = policy.high_space
        k = self.highs_per_test if self.highs_per_test is not None else 8
        return min(k, space)


def _draw_points(size: int, k: int, rng: random.Random) -> list[int]:
    if size >= k:
        return rng.sample(range(size), k)
    return [rng.randrange(size) for _ in range(k)]


def probe_half(
    p: Program, policy: SecurityPolicy, r: Region, params: GenParams, rng: random.Random
) -> tuple[list[Hypertest], float]:
    """Sample low points in ``r``; return the leaking hypertests and the mean entropy over all points."""
    n_high = params.highs_for(policy)
    if n_high < 2:
        return [], 0.0
    # all randomness is drawn before any execution
    lows = [decode_index(r.decls(), i) for i in _draw_points(r.size, params.samples_per_half, rng)]
    tests = [
        Hypertest(low, [decode_index(policy.high_inputs, j) for j in rng.sample(range(policy.high_space), n_high)])
        for low in lows
    ]
    total = 0.0
    leaking = []
    for t in tests:
        t.observed_entropy = leakage_of_hypertest(p, t, params.step_budget)
        total += t.observed_entropy
        if t.observed_entropy > 0:
            leaking.append(t)
    return leaking, total / len(tests)


def generate_hypertests(
    p: Program, policy: SecurityPolicy, params: GenParams
) -> tuple[HypertestSuite, LeakEstimate]:
    """Search for leaking hypertests; an empty suite with 0.0 bits means no leak was seen."""
    if not policy.high_inputs or not policy.low_inputs:
        raise ValueError("policy needs at least one high and one low input")
    rng = random.Random(params.seed)
    counter = itertools.count()
    queue: list = []

    def push(tests: list[Hypertest]) -> None:
        for t in tests:
            heapq.heappush(queue, (-t.observed_entropy, t.low_key(), next(counter), t))

    region = Region.full(policy)
    zero_rounds = 0
    while region.depth < params.max_depth:
        try:
            left, right = split_region(region)
        except Unsplittable:
            if region.depth == 0:
                push(probe_half(p, policy, region, params, rng)[0])
            break
        found_l, mean_l = probe_half(p, policy, left, params, rng)
        found_r, mean_r = probe_half(p, policy, right, params, rng)
        push(found_l)
        push(found_r)
        if mean_l == 0 and mean_r == 0:
            zero_rounds += 1
            if zero_rounds >= 2:
                break
        else:
            zero_rounds = 0
        region = left if mean_l >= mean_r else right

    suite: HypertestSuite = []
    seen: set[tuple[int, ...]] = set()
    while queue and len(suite) < params.max_suite:
        t = heapq.heappop(queue)[-1]
        if t.low_key() not in seen:
            seen.add(t.low_key())
            suite.append(t)
    if not suite:
        return [], LeakEstimate(0.0, 0, 0)
    return suite, suite_leakage(p, suite, params.step_budget)


def exhaustive_suite(policy: SecurityPolicy) -> HypertestSuite:
    """Every low point paired with every secret."""
    highs = [decode_index(policy.high_inputs, j) for j in range(policy.high_space)]
    return [
        Hypertest(decode_index(policy.low_inputs, i), [dict(h) for h in highs])
        for i in range(policy.low_space)
    ]


def suite_to_json(suite: HypertestSuite, subject: str, seed: int) -> dict:
    return {"subject": subject, "seed": seed, "tests": [t.to_json() for t in suite]}


def suite_from_json(data: dict) -> HypertestSuite:
    return [Hypertest.from_json(t) for t in data["tests"]]
