"""Functional regression tests with the original program as oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import DomainTooSmall, EmptySuite
from .lang import DEFAULT_STEP_BUDGET, Observation, Program, SecurityPolicy, decode_index, runner, wrap64


@dataclass(frozen=True)
class FunctionalTest:
    input: dict[str, int] = field(hash=False)
    expected: Observation


@dataclass
class FunctionalSuite:
    tests: list[FunctionalTest]
    seed: int
    subject: str

    def __len__(self) -> int:
        return len(self.tests)

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "seed": self.seed,
            "tests": [{"input": dict(t.input), "expected": t.expected.to_json()} for t in self.tests],
        }

    @classmethod
    def from_json(cls, data: dict) -> FunctionalSuite:
        tests = [FunctionalTest(dict(t["input"]), Observation.from_json(t["expected"])) for t in data["tests"]]
        return cls(tests, int(data["seed"]), data["subject"])


def generate_functional_tests(
    p: Program, policy: SecurityPolicy, n: int, seed: int, step_budget: int = DEFAULT_STEP_BUDGET
) -> FunctionalSuite:
    """``n`` distinct uniform low bindings with the canonical secret, expected outputs from ``p``."""
    if n < 1:
        raise ValueError("n must be positive")
    space = policy.low_space
    if space == 0:
        raise DomainTooSmall("low input space is empty")
    if n >= space:
        indices = list(range(space))
    else:
        indices = random.Random(seed).sample(range(space), n)
    run = runner(p)
    tests = []
    for i in indices:
        binding = {**decode_index(policy.low_inputs, i), **policy.canonical_secret}
        binding = {name: binding[name] for name in p.input_names}
        tests.append(FunctionalTest(binding, run(*map(wrap64, binding.values()), budget=step_budget)))
    return FunctionalSuite(tests, seed, p.name)


def fail_rate(variant: Program, suite: FunctionalSuite, step_budget: int = DEFAULT_STEP_BUDGET) -> float:
    if not suite.tests:
        raise EmptySuite("functional suite is empty")
    run = runner(variant)
    names = variant.input_names
    failed = 0
    for t in suite.tests:
        if run(*(wrap64(t.input[n]) for n in names), budget=step_budget) != t.expected:
            failed += 1
    return failed / len(suite.tests)
