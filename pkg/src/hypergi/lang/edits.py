"""Non-destructive statement-level edits.

StatementIds are pre-order positions, so every successful edit implicitly
re-densifies them. Statements synthesised by ``NewIf``/``NewFor``/``SynthAssign``
may only write non-input variables: overwriting an input with a constant would
launder the secret and is not a repair this toolkit considers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Union

from ..errors import EditError
from .ast import RELATIONS, Assign, Binary, For, If, Int, Program, Stmt, Var, children


@dataclass(frozen=True)
class CopyOf:
    sid: int


@dataclass(frozen=True)
class SynthAssign:
    var: str
    source: Union[str, int]  # variable name, or constant 0/1


BodyDesc = Union[CopyOf, SynthAssign]


@dataclass(frozen=True)
class Delete:
    target: int


@dataclass(frozen=True)
class Replace:
    target: int
    donor: int


@dataclass(frozen=True)
class Insert:
    donor: int
    target: int


@dataclass(frozen=True)
class NewIf:
    var1: str
    relation: str
    var2: str
    body: BodyDesc
    target: int


@dataclass(frozen=True)
class NewFor:
    var: str
    bound: int
    body: BodyDesc
    target: int


Edit = Union[Delete, Replace, Insert, NewIf, NewFor]
EDIT_KINDS = (Delete, Replace, Insert, NewIf, NewFor)


def list_statements(p: Program) -> list[int]:
    return list(range(len(p.statements)))


def _size(s: Stmt) -> int:
    return 1 + sum(_size(c) for c in children(s))


def _rewrite(body: tuple[Stmt, ...], first: int, target: int, fn: Callable[[Stmt], list[Stmt]]) -> tuple[Stmt, ...]:
    out: list[Stmt] = []
    sid = first
    for s in body:
        n = _size(s)
        if sid == target:
            out.extend(fn(s))
        elif sid < target < sid + n:
            out.append(_rewrite_inside(s, sid, target, fn))
        else:
            out.append(s)
        sid += n
    return tuple(out)


def _rewrite_inside(s: Stmt, sid: int, target: int, fn) -> Stmt:
    if isinstance(s, If):
        split = sid + 1 + sum(_size(c) for c in s.then)
        if target < split:
            return replace(s, then=_rewrite(s.then, sid + 1, target, fn))
        return replace(s, orelse=_rewrite(s.orelse, split, target, fn))
    assert isinstance(s, For)
    return replace(s, body=_rewrite(s.body, sid + 1, target, fn))


def _stmt(p: Program, sid: int, what: str) -> Stmt:
    if not 0 <= sid < len(p.statements):
        raise EditError(f"{what} statement {sid} does not exist ({len(p.statements)} statements)")
    return p.statements[sid]


def _check_scope(p: Program, target: int, *names: str) -> None:
    scope = p.scope_at(target)
    for name in names:
        if name not in scope:
            raise EditError(f"variable {name!r} is not in scope at statement {target}")


def _check_writable(p: Program, target: int, name: str) -> None:
    if name in p.input_names:
        raise EditError(f"synthesised statements may not write input {name!r}")
    _check_scope(p, target, name)


def _resolve_body(p: Program, desc: BodyDesc, target: int) -> Stmt:
    if isinstance(desc, CopyOf):
        return _stmt(p, desc.sid, "donor")
    _check_writable(p, target, desc.var)
    if isinstance(desc.source, str):
        _check_scope(p, target, desc.source)
        return Assign(desc.var, Var(desc.source))
    if desc.source not in (0, 1):
        raise EditError(f"synthesised constant must be 0 or 1, got {desc.source}")
    return Assign(desc.var, Int(desc.source))


def apply_edit(p: Program, e: Edit) -> Program:
    """Return a new program with ``e`` applied; ``p`` is left untouched."""
    target = e.target
    _stmt(p, target, "target")
    if isinstance(e, Delete):
        fn = lambda s: []
    elif isinstance(e, Replace):
        donor = _stmt(p, e.donor, "donor")
        fn = lambda s: [donor]
    elif isinstance(e, Insert):
        donor = _stmt(p, e.donor, "donor")
        fn = lambda s: [donor, s]
    elif isinstance(e, NewIf):
        if e.relation not in RELATIONS:
            raise EditError(f"unknown relation {e.relation!r}")
        _check_scope(p, target, e.var1, e.var2)
        body = _resolve_body(p, e.body, target)
        node = If(Binary(e.relation, Var(e.var1), Var(e.var2)), (body,))
        fn = lambda s: [node, s]
    elif isinstance(e, NewFor):
        if not 1 <= e.bound <= 4:
            raise EditError(f"loop bound {e.bound} outside 1..4")
        _check_writable(p, target, e.var)
        body = _resolve_body(p, e.body, target)
        node = For(e.var, Int(1), Int(e.bound), (body,))
        fn = lambda s: [node, s]
    else:
        raise TypeError(f"not an edit: {e!r}")
    return Program(p.name, p.inputs, _rewrite(p.body, 0, target, fn))


def apply_patch(p: Program, patch) -> Program:
    for e in patch:
        p = apply_edit(p, e)
    return p


# --- JSON ------------------------------------------------------------------


def _body_to_json(d: BodyDesc) -> dict:
    if isinstance(d, CopyOf):
        return {"copy_of": d.sid}
    return {"assign": d.var, "source": d.source}


def _body_from_json(data: dict) -> BodyDesc:
    if "copy_of" in data:
        return CopyOf(data["copy_of"])
    return SynthAssign(data["assign"], data["source"])


def edit_to_json(e: Edit) -> dict:
    if isinstance(e, Delete):
        return {"op": "delete", "target": e.target}
    if isinstance(e, Replace):
        return {"op": "replace", "target": e.target, "donor": e.donor}
    if isinstance(e, Insert):
        return {"op": "insert", "donor": e.donor, "target": e.target}
    if isinstance(e, NewIf):
        return {"op": "new_if", "var1": e.var1, "relation": e.relation, "var2": e.var2,
                "body": _body_to_json(e.body), "target": e.target}
    return {"op": "new_for", "var": e.var, "bound": e.bound, "body": _body_to_json(e.body), "target": e.target}


def edit_from_json(data: dict) -> Edit:
    op = data["op"]
    if op == "delete":
        return Delete(data["target"])
    if op == "replace":
        return Replace(data["target"], data["donor"])
    if op == "insert":
        return Insert(data["donor"], data["target"])
    if op == "new_if":
        return NewIf(data["var1"], data["relation"], data["var2"], _body_from_json(data["body"]), data["target"])
    if op == "new_for":
        return NewFor(data["var"], data["bound"], _body_from_json(data["body"]), data["target"])
    raise ValueError(f"unknown edit op {op!r}")
