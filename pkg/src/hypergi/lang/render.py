from __future__ import annotations

from .ast import Assign, Binary, Expr, For, If, Int, Program, Return, Stmt, Unary, Var
from .parser import PRECEDENCE

INDENT = "  "


def render_expr(e: Expr, min_prec: int = 0) -> str:
    """Render with the fewest parentheses that reparse to the same tree."""
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = render_expr(e.operand)
        if not isinstance(e.operand, Var):
            inner = f"({inner})"
        return e.op + inner
    prec = PRECEDENCE[e.op]
    text = f"{render_expr(e.left, prec)} {e.op} {render_expr(e.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text


def _render_block(body: tuple[Stmt, ...], depth: int, out: list[str]) -> None:
    for stmt in body:
        _render_stmt(stmt, depth, out)


def _render_stmt(stmt: Stmt, depth: int, out: list[str]) -> None:
    pad = INDENT * depth
    if isinstance(stmt, Assign):
        out.append(f"{pad}{stmt.target} = {render_expr(stmt.expr)};")
    elif isinstance(stmt, Return):
        out.append(f"{pad}return {', '.join(render_expr(v) for v in stmt.values)};")
    elif isinstance(stmt, If):
        out.append(f"{pad}if ({render_expr(stmt.cond)}) {{")
        _render_block(stmt.then, depth + 1, out)
        if stmt.orelse:
            out.append(f"{pad}}} else {{")
            _render_block(stmt.orelse, depth + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, For):
        out.append(f"{pad}for {stmt.var} in {render_expr(stmt.lo)} .. {render_expr(stmt.hi)} {{")
        _render_block(stmt.body, depth + 1, out)
        out.append(f"{pad}}}")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


def render(p: Program) -> str:
    out = [f"#policy {d.role} {d.name} : {d.lo}..{d.hi}" for d in p.inputs]
    out.append("")
    _render_block(p.body, 0, out)
    return "\n".join(out) + "\n"
