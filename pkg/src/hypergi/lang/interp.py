"""Deterministic execution of mini-language programs.

``execute`` is the reference tree-walking interpreter. ``runner`` compiles a
program to a Python function with identical semantics; the leakage and
fail-rate loops call it hundreds of thousands of times per repair run.

Semantics: 64-bit wrapping arithmetic, C-style truncating ``/`` and ``%``,
comparisons and logical operators yield 0/1 with short-circuit ``&&``/``||``,
unassigned variables read as 0. Each executed statement and each loop
iteration costs one step; exceeding the budget yields ``Timeout``.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .ast import (
    ERR,
    NORET,
    TIMEOUT,
    Assign,
    Binary,
    Expr,
    For,
    If,
    Int,
    Observation,
    Program,
    Return,
    Stmt,
    Unary,
    Var,
    wrap64,
)

DEFAULT_STEP_BUDGET = 100_000

_MIN = -(2**63)
_MASK = 0xFFFFFFFFFFFFFFFF


class _DivZero(Exception):
    pass


class _OutOfSteps(Exception):
    pass


def _div(x: int, y: int) -> int:
    if y == 0:
        raise _DivZero
    q = abs(x) // abs(y)
    if (x < 0) != (y < 0):
        q = -q
    return ((q - _MIN) & _MASK) + _MIN


def _mod(x: int, y: int) -> int:
    if y == 0:
        raise _DivZero
    q = abs(x) // abs(y)
    if (x < 0) != (y < 0):
        q = -q
    return ((x - q * y - _MIN) & _MASK) + _MIN


# --- tree walker -----------------------------------------------------------


class _Return(Exception):
    def __init__(self, values: tuple[int, ...]):
        self.values = values


class _Walker:
    def __init__(self, env: dict[str, int], budget: int):
        self.env = env
        self.budget = budget
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise _OutOfSteps

    def eval(self, e: Expr) -> int:
        if isinstance(e, Int):
            return e.value
        if isinstance(e, Var):
            return self.env.get(e.name, 0)
        if isinstance(e, Unary):
            v = self.eval(e.operand)
            return wrap64(-v) if e.op == "-" else int(v == 0)
        op = e.op
        if op == "&&":
            return int(self.eval(e.left) != 0 and self.eval(e.right) != 0)
        if op == "||":
            return int(self.eval(e.left) != 0 or self.eval(e.right) != 0)
        x, y = self.eval(e.left), self.eval(e.right)
        if op == "+":
            return wrap64(x + y)
        if op == "-":
            return wrap64(x - y)
        if op == "*":
            return wrap64(x * y)
        if op == "/":
            return _div(x, y)
        if op == "%":
            return _mod(x, y)
        if op == "==":
            return int(x == y)
        if op == "!=":
            return int(x != y)
        if op == "<":
            return int(x < y)
        if op == "<=":
            return int(x <= y)
        if op == ">":
            return int(x > y)
        if op == ">=":
            return int(x >= y)
        raise ValueError(f"unknown operator {op!r}")

    def block(self, body: tuple[Stmt, ...]) -> None:
        for stmt in body:
            self.stmt(stmt)

    def stmt(self, s: Stmt) -> None:
        self.tick()
        if isinstance(s, Assign):
            self.env[s.target] = self.eval(s.expr)
        elif isinstance(s, If):
            self.block(s.then if self.eval(s.cond) != 0 else s.orelse)
        elif isinstance(s, For):
            lo, hi = self.eval(s.lo), self.eval(s.hi)
            i = lo
            while i <= hi:
                self.tick()
                self.env[s.var] = i
                self.block(s.body)
                i += 1
        elif isinstance(s, Return):
            raise _Return(tuple(self.eval(v) for v in s.values))


def execute(p: Program, inputs: Mapping[str, int], step_budget: int = DEFAULT_STEP_BUDGET) -> Observation:
    """Run ``p`` on a full input binding and return its observation."""
    missing = [n for n in p.input_names if n not in inputs]
    if missing:
        raise ValueError(f"missing inputs: {', '.join(missing)}")
    env = {n: wrap64(inputs[n]) for n in p.input_names}
    walker = _Walker(env, step_budget)
    try:
        walker.block(p.body)
    except _Return as r:
        return Observation.of(*r.values)
    except _DivZero:
        return Observation(ERR)
    except _OutOfSteps:
        return Observation(TIMEOUT)
    return Observation(NORET)


# --- compiled fast path ----------------------------------------------------

Runner = Callable[..., Observation]

_ARITH = {"+", "-", "*"}
_CMP = {"==", "!=", "<", "<=", ">", ">="}


class _Gen:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.tmp = 0

    def expr(self, e: Expr) -> str:
        if isinstance(e, Int):
            return repr(e.value)
        if isinstance(e, Var):
            return "v_" + e.name
        if isinstance(e, Unary):
            inner = self.expr(e.operand)
            if e.op == "-":
                return f"((({inner}) * -1 - _MIN) & _MASK) + _MIN"
            return f"(0 if ({inner}) else 1)"
        l, r = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op in _ARITH:
            return f"((({l}) {op} ({r}) - _MIN) & _MASK) + _MIN"
        if op in _CMP:
            return f"(1 if ({l}) {op} ({r}) else 0)"
        if op == "&&":
            return f"(1 if (({l}) and ({r})) else 0)"
        if op == "||":
            return f"(1 if (({l}) or ({r})) else 0)"
        if op == "/":
            return f"_div({l}, {r})"
        return f"_mod({l}, {r})"

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("    " * depth + text)

    def tick(self, depth: int) -> None:
        self.emit(depth, "_s += 1")
        self.emit(depth, "if _s > _budget: raise _OutOfSteps")

    def block(self, body: tuple[Stmt, ...], depth: int) -> None:
        if not body:
            self.emit(depth, "pass")
        for s in body:
            self.stmt(s, depth)

    def stmt(self, s: Stmt, depth: int) -> None:
        self.tick(depth)
        if isinstance(s, Assign):
            self.emit(depth, f"v_{s.target} = {self.expr(s.expr)}")
        elif isinstance(s, If):
            self.emit(depth, f"if {self.expr(s.cond)}:")
            self.block(s.then, depth + 1)
            if s.orelse:
                self.emit(depth, "else:")
                self.block(s.orelse, depth + 1)
        elif isinstance(s, For):
            self.tmp += 1
            lo, hi = f"_lo{self.tmp}", f"_hi{self.tmp}"
            self.emit(depth, f"{lo} = {self.expr(s.lo)}")
            self.emit(depth, f"{hi} = {self.expr(s.hi)}")
            self.emit(depth, f"while {lo} <= {hi}:")
            self.tick(depth + 1)
            self.emit(depth + 1, f"v_{s.var} = {lo}")
            self.block(s.body, depth + 1)
            self.emit(depth + 1, f"{lo} += 1")
        elif isinstance(s, Return):
            vals = ", ".join(self.expr(v) for v in s.values)
            self.emit(depth, f"return ({vals},)")


def _compile(p: Program) -> Runner:
    gen = _Gen()
    params = ", ".join("v_" + n for n in p.input_names)
    gen.emit(0, f"def _body({params}, _budget):")
    gen.emit(1, "_s = 0")
    for name in p.variables():
        if name not in p.input_names:
            gen.emit(1, f"v_{name} = 0")
    gen.block(p.body, 1)
    gen.emit(1, "return None")
    namespace = {"_MIN": _MIN, "_MASK": _MASK, "_div": _div, "_mod": _mod, "_OutOfSteps": _OutOfSteps}
    exec(compile("\n".join(gen.lines), f"<hg:{p.name}>", "exec"), namespace)
    body = namespace["_body"]

    def run(*args: int, budget: int = DEFAULT_STEP_BUDGET) -> Observation:
        try:
            out = body(*args, budget)
        except _DivZero:
            return Observation(ERR)
        except _OutOfSteps:
            return Observation(TIMEOUT)
        if out is None:
            return Observation(NORET)
        return Observation(0, out)

    return run


def _fallback(p: Program) -> Runner:
    names = p.input_names

    def run(*args: int, budget: int = DEFAULT_STEP_BUDGET) -> Observation:
        return execute(p, dict(zip(names, args)), budget)

    return run


def runner(p: Program) -> Runner:
    """Return a positional runner ``run(*inputs, budget=...)`` for ``p``.

    Arguments follow ``p.input_names`` order and must already be 64-bit values.
    The compiled function is cached on the program.
    """
    cached = p.__dict__.get("_runner")
    if cached is not None:
        return cached
    try:
        fn = _compile(p)
    except (SyntaxError, RecursionError, MemoryError):
        # CPython caps static block nesting; deep GP mutants use the walker
        fn = _fallback(p)
    p.__dict__["_runner"] = fn
    return fn
