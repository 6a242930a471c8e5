"""AST, security policy and observation types for the mini-language.

All nodes are immutable; edits build new trees and share untouched subtrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Optional, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

Span = Optional[tuple[int, int]]


def wrap64(x: int) -> int:
    return ((x + 2**63) & 0xFFFFFFFFFFFFFFFF) - 2**63


# --- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: Expr


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr


Expr = Union[Int, Var, Unary, Binary]

BINARY_OPS = ("||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%")
RELATIONS = ("==", "!=", "<", "<=", ">", ">=")


# --- statements ------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...] = ()
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class For:
    var: str
    lo: Expr
    hi: Expr
    body: tuple[Stmt, ...]
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Return:
    values: tuple[Expr, ...]
    span: Span = field(default=None, compare=False, repr=False)


Stmt = Union[Assign, If, For, Return]


def children(stmt: Stmt) -> Iterator[Stmt]:
    if isinstance(stmt, If):
        yield from stmt.then
        yield from stmt.orelse
    elif isinstance(stmt, For):
        yield from stmt.body


def walk(body: tuple[Stmt, ...]) -> Iterator[Stmt]:
    """Yield statements in pre-order; the position is the StatementId."""
    for stmt in body:
        yield stmt
        yield from walk(tuple(children(stmt)))


def expr_vars(expr: Expr) -> Iterator[str]:
    if isinstance(expr, Var):
        yield expr.name
    elif isinstance(expr, Unary):
        yield from expr_vars(expr.operand)
    elif isinstance(expr, Binary):
        yield from expr_vars(expr.left)
        yield from expr_vars(expr.right)


def assigned_name(stmt: Stmt) -> Optional[str]:
    if isinstance(stmt, Assign):
        return stmt.target
    if isinstance(stmt, For):
        return stmt.var
    return None


# --- policy ----------------------------------------------------------------


@dataclass(frozen=True)
class InputDecl:
    name: str
    role: str  # "high" | "low"
    lo: int
    hi: int

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class SecurityPolicy:
    high_inputs: tuple[InputDecl, ...]
    low_inputs: tuple[InputDecl, ...]
    canonical_secret: dict = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_inputs(cls, inputs: tuple[InputDecl, ...]) -> SecurityPolicy:
        highs = tuple(d for d in inputs if d.role == "high")
        lows = tuple(d for d in inputs if d.role == "low")
        return cls(highs, lows, {d.name: d.lo for d in highs})

    @property
    def high_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.high_inputs)

    @property
    def low_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.low_inputs)

    @property
    def high_space(self) -> int:
        n = 1
        for d in self.high_inputs:
            n *= d.size
        return n

    @property
    def low_space(self) -> int:
        n = 1
        for d in self.low_inputs:
            n *= d.size
        return n


def decode_index(decls: tuple[InputDecl, ...], index: int) -> dict[str, int]:
    """Mixed-radix decoding of ``index`` into a binding (last input varies fastest)."""
    out = {}
    for d in reversed(decls):
        index, r = divmod(index, d.size)
        out[d.name] = d.lo + r
    return {d.name: out[d.name] for d in decls}


# --- program ---------------------------------------------------------------


@dataclass(frozen=True)
class Program:
    name: str
    inputs: tuple[InputDecl, ...]
    body: tuple[Stmt, ...]

    @cached_property
    def statements(self) -> tuple[Stmt, ...]:
        return tuple(walk(self.body))

    @cached_property
    def policy(self) -> SecurityPolicy:
        return SecurityPolicy.from_inputs(self.inputs)

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.inputs)

    def __len__(self) -> int:
        return len(self.statements)

    def __getstate__(self):
        # cached properties and the compiled runner are rebuilt on demand
        return {"name": self.name, "inputs": self.inputs, "body": self.body}

    def variables(self) -> tuple[str, ...]:
        """Inputs first, then every other name in order of first appearance."""
        seen = dict.fromkeys(self.input_names)
        for stmt in self.statements:
            name = assigned_name(stmt)
            if name is not None:
                seen.setdefault(name)
            for e in _stmt_exprs(stmt):
                for v in expr_vars(e):
                    seen.setdefault(v)
        return tuple(seen)

    def scope_at(self, sid: int) -> tuple[str, ...]:
        """Inputs plus names assigned by statements preceding ``sid`` in pre-order."""
        seen = dict.fromkeys(self.input_names)
        for stmt in self.statements[:sid]:
            name = assigned_name(stmt)
            if name is not None:
                seen.setdefault(name)
        return tuple(seen)


def _stmt_exprs(stmt: Stmt) -> tuple[Expr, ...]:
    if isinstance(stmt, Assign):
        return (stmt.expr,)
    if isinstance(stmt, If):
        return (stmt.cond,)
    if isinstance(stmt, For):
        return (stmt.lo, stmt.hi)
    return stmt.values


# --- observations ----------------------------------------------------------

VALUES, ERR, NORET, TIMEOUT = 0, 1, 2, 3
KIND_NAMES = ("values", "err", "noret", "timeout")


class Observation(NamedTuple):
    """Low-observable outcome of one run. Ordered by kind, then values."""

    kind: int
    values: tuple = ()

    @classmethod
    def of(cls, *values: int) -> Observation:
        return cls(VALUES, tuple(values))

    def to_json(self) -> dict:
        return {"kind": KIND_NAMES[self.kind], "values": list(self.values)}

    @classmethod
    def from_json(cls, data: dict) -> Observation:
        return cls(KIND_NAMES.index(data["kind"]), tuple(data.get("values", ())))

    def __str__(self) -> str:
        if self.kind == VALUES:
            return "Values(" + ", ".join(map(str, self.values)) + ")"
        return KIND_NAMES[self.kind].capitalize() if self.kind != NORET else "NoRet"


Observation.ERR = Observation(ERR)
Observation.NORET = Observation(NORET)
Observation.TIMEOUT = Observation(TIMEOUT)
