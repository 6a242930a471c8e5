"""Genetic-programming repair over patch chromosomes.

A patch is an ordered edit list applied to the original program. Fitness
weighs normalized leakage and functional fail rate equally; 0 is optimal.
Mutants whose edits do not resolve get a sentinel fitness of 2.0.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from .errors import EditError, NoLeak
from .hypergen import HypertestSuite
from .lang import (
    DEFAULT_STEP_BUDGET,
    CopyOf,
    Delete,
    Edit,
    Insert,
    NewFor,
    NewIf,
    Program,
    Replace,
    SecurityPolicy,
    SynthAssign,
    apply_patch,
    render,
)
from .lang.ast import RELATIONS
from .localize import LocalizationMap
from .qif import suite_leakage
from .seeding import derive_seed
from .testgen import FunctionalSuite, fail_rate

INVALID_FITNESS = 2.0

Patch = tuple[Edit, ...]


@dataclass(frozen=True)
class FitnessRecord:
    l_o: float
    l_k: Optional[float]
    fr_k: Optional[float]
    f_k: float
    valid: bool

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class EvolveParams:
    epochs: int = 25
    generations: int = 50
    population: int = 32
    target_fitness: float = 0.0
    tournament_size: int = 2
    elitism: int = 1
    crossover_rate: float = 0.5
    seed: int = 0
    step_budget: int = DEFAULT_STEP_BUDGET
    max_patch_len: int = 16

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        for name in ("epochs", "generations", "tournament_size", "step_budget", "max_patch_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must be in [0, population)")


@dataclass
class EpochResult:
    epoch: int
    trajectory: list[tuple[float, Optional[float], Optional[float]]]
    termination: str
    best_patch: Patch
    best_record: FitnessRecord


@dataclass
class RepairResult:
    best_patch: Patch
    best_record: FitnessRecord
    patched_source: str
    epoch: int
    termination: str
    epochs: list[EpochResult] = field(default_factory=list)

    @property
    def trajectory(self):
        return self.epochs[self.epoch].trajectory


# --- operators -------------------------------------------------------------


def _writable(p: Program, scope: tuple[str, ...]) -> tuple[str, ...]:
    locals_ = tuple(v for v in scope if v not in p.input_names)
    # with no local in scope, any pick is rejected when the edit is applied
    return locals_ or scope


def _body(p: Program, scope: tuple[str, ...], rng: random.Random):
    if rng.random() < 0.5:
        return CopyOf(rng.randrange(len(p.statements)))
    source = rng.choice(scope + (0, 1))
    return SynthAssign(rng.choice(_writable(p, scope)), source)


def random_edit(p: Program, loc: LocalizationMap, rng: random.Random) -> Edit:
    n = len(p.statements)
    if n == 0:
        raise ValueError("cannot mutate an empty program")
    if len(loc.scores) != n:
        raise ValueError("localization map does not match the program")
    kind = rng.randrange(5)
    target = rng.choices(range(n), weights=loc.probabilities)[0]
    if kind == 0:
        return Delete(target)
    if kind == 1:
        return Replace(target, rng.randrange(n))
    if kind == 2:
        return Insert(rng.randrange(n), target)
    scope = p.scope_at(target)
    if kind == 3:
        return NewIf(rng.choice(scope), rng.choice(RELATIONS), rng.choice(scope), _body(p, scope, rng), target)
    return NewFor(rng.choice(_writable(p, scope)), rng.randint(1, 4), _body(p, scope, rng), target)


def crossover(a: Patch, b: Patch, rng: random.Random) -> Patch:
    """One-point crossover: a prefix of ``a`` followed by a suffix of ``b``."""
    return a[: rng.randint(0, len(a))] + b[rng.randint(0, len(b)):]


def mutate(patch: Patch, base: Program, loc: LocalizationMap, rng: random.Random, max_len: int) -> Patch:
    grow = not patch or rng.random() < 0.5
    if grow and len(patch) < max_len:
        return patch + (random_edit(base, loc, rng),)
    i = rng.randrange(len(patch))
    return patch[:i] + patch[i + 1:]


# --- fitness ---------------------------------------------------------------


def combine(l_o: float, l_k: float, fr_k: float) -> FitnessRecord:
    return FitnessRecord(l_o, l_k, fr_k, 0.5 * l_k / l_o + 0.5 * fr_k, True)


def fitness(
    variant_patch: Patch,
    base: Program,
    hsuite: HypertestSuite,
    fsuite: FunctionalSuite,
    l_o: float,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> FitnessRecord:
    if l_o <= 0:
        raise NoLeak("original leakage must be positive")
    try:
        variant = apply_patch(base, variant_patch)
    except EditError:
        return FitnessRecord(l_o, None, None, INVALID_FITNESS, False)
    return _measure(variant, hsuite, fsuite, l_o, step_budget)


def _measure(variant, hsuite, fsuite, l_o, step_budget) -> FitnessRecord:
    l_k = suite_leakage(variant, hsuite, step_budget).bits
    return combine(l_o, l_k, fail_rate(variant, fsuite, step_budget))


_worker_ctx: dict = {}


def _worker_init(hsuite, fsuite, l_o, step_budget) -> None:
    _worker_ctx.update(hsuite=hsuite, fsuite=fsuite, l_o=l_o, step_budget=step_budget)


def _worker_measure(variant: Program) -> FitnessRecord:
    c = _worker_ctx
    return _measure(variant, c["hsuite"], c["fsuite"], c["l_o"], c["step_budget"])


class _Evaluator:
    """Caches fitness by patch and by resulting program; merges results in population order."""

    def __init__(self, base, hsuite, fsuite, l_o, step_budget, jobs):
        self.base = base
        self.args = (hsuite, fsuite, l_o, step_budget)
        self.by_patch: dict[Patch, FitnessRecord] = {}
        self.by_program: dict[Program, FitnessRecord] = {}
        self.pool = None
        if jobs > 1:
            self.pool = ProcessPoolExecutor(jobs, initializer=_worker_init, initargs=self.args)

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown()

    def __call__(self, population: list[Patch]) -> list[FitnessRecord]:
        l_o = self.args[2]
        pending: dict[Program, list[Patch]] = {}
        for patch in population:
            if patch in self.by_patch:
                continue
            try:
                variant = apply_patch(self.base, patch)
            except EditError:
                self.by_patch[patch] = FitnessRecord(l_o, None, None, INVALID_FITNESS, False)
                continue
            if variant in self.by_program:
                self.by_patch[patch] = self.by_program[variant]
            else:
                pending.setdefault(variant, []).append(patch)
        programs = list(pending)
        if self.pool is not None and len(programs) > 1:
            records = list(self.pool.map(_worker_measure, programs, chunksize=max(1, len(programs) // 16)))
        else:
            records = [_measure(v, *self.args) for v in programs]
        for variant, rec in zip(programs, records):
            self.by_program[variant] = rec
            for patch in pending[variant]:
                self.by_patch[patch] = rec
        return [self.by_patch[p] for p in population]


# --- search loop -----------------------------------------------------------


def _rank_key(records, population):
    return lambda i: (records[i].f_k, len(population[i]), i)


def _tournament(population, records, size, rng) -> Patch:
    picks = rng.sample(range(len(population)), min(size, len(population)))
    return population[min(picks, key=_rank_key(records, population))]


def evolve(
    base: Program,
    policy: SecurityPolicy,
    hsuite: HypertestSuite,
    fsuite: FunctionalSuite,
    loc: LocalizationMap,
    params: EvolveParams,
    jobs: int = 1,
    observer: Callable[[Patch, FitnessRecord], None] | None = None,
) -> RepairResult:
    """Run ``params.epochs`` independent GP runs and return the overall best patch.

    ``observer`` sees every (patch, record) pair evaluated, generation by generation.
    """
    l_o = suite_leakage(base, hsuite, params.step_budget).bits if hsuite else 0.0
    if l_o <= 0:
        raise NoLeak(f"{base.name}: no leakage to repair")
    evaluate = _Evaluator(base, hsuite, fsuite, l_o, params.step_budget, jobs)
    epochs: list[EpochResult] = []
    try:
        for epoch in range(params.epochs):
            epochs.append(_run_epoch(base, loc, params, epoch, evaluate, observer))
    finally:
        evaluate.close()

    best = min(epochs, key=lambda e: (e.best_record.f_k, len(e.best_patch), e.epoch))
    return RepairResult(
        best.best_patch,
        best.best_record,
        render(apply_patch(base, best.best_patch)),
        best.epoch,
        "target_reached" if best.best_record.f_k <= params.target_fitness else "budget_exhausted",
        epochs,
    )


def _run_epoch(base, loc, params: EvolveParams, epoch: int, evaluate, observer) -> EpochResult:
    rng = random.Random(derive_seed(params.seed, f"epoch-{epoch}"))
    size = params.population
    population: list[Patch] = [()] + [(random_edit(base, loc, rng),) for _ in range(size - 1)]
    trajectory = []
    termination = "budget_exhausted"
    best_patch, best_record = (), None
    for gen in range(params.generations):
        records = evaluate(population)
        if observer is not None:
            for patch, rec in zip(population, records):
                observer(patch, rec)
        ranked = sorted(range(size), key=_rank_key(records, population))
        top = records[ranked[0]]
        if best_record is None or (top.f_k, len(population[ranked[0]])) < (best_record.f_k, len(best_patch)):
            best_patch, best_record = population[ranked[0]], top
        trajectory.append((top.f_k, top.l_k, top.fr_k))
        if top.f_k <= params.target_fitness:
            termination = "target_reached"
            break
        if gen == params.generations - 1:
            break
        children = [population[i] for i in ranked[: params.elitism]]
        while len(children) < size:
            a = _tournament(population, records, params.tournament_size, rng)
            b = _tournament(population, records, params.tournament_size, rng)
            child = crossover(a, b, rng) if rng.random() < params.crossover_rate else a
            child = mutate(child, base, loc, rng, params.max_patch_len)
            children.append(child[: params.max_patch_len])
        population = children
    return EpochResult(epoch, trajectory, termination, best_patch, best_record)
