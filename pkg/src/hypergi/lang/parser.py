"""Recursive-descent parser for ``.hg`` subject files."""

from __future__ import annotations

import re
from typing import NamedTuple

from ..errors import ParseError, PolicyError
from .ast import (
    INT_MAX,
    INT_MIN,
    Assign,
    Binary,
    Expr,
    For,
    If,
    InputDecl,
    Int,
    Program,
    Return,
    Stmt,
    Unary,
    Var,
)

KEYWORDS = {"if", "else", "for", "in", "return"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){};,])
    """,
    re.VERBOSE,
)

_POLICY = re.compile(
    r"#policy\s+(?P<role>\S+)\s+(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*:\s*"
    r"(?P<lo>-?[0-9]+)\s*\.\.\s*(?P<hi>-?[0-9]+)\s*$"
)

# binding power per binary operator; all left-associative
PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, first_line: int = 1) -> list[Token]:
    tokens = []
    line, line_start, pos = first_line, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            if kind == "ident" and m.group() in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _parse_policy(lines: list[str]) -> tuple[InputDecl, ...]:
    decls: list[InputDecl] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped.startswith("#policy"):
            continue
        m = _POLICY.match(stripped)
        if m is None:
            raise PolicyError("malformed #policy line", lineno, 1)
        role, name = m["role"], m["name"]
        lo, hi = int(m["lo"]), int(m["hi"])
        if role not in ("high", "low"):
            raise PolicyError(f"unknown role {role!r}", lineno, 1)
        if name in KEYWORDS:
            raise PolicyError(f"keyword {name!r} used as input name", lineno, 1)
        if name in seen:
            raise PolicyError(f"duplicate declaration of {name!r}", lineno, 1)
        if lo > hi:
            raise PolicyError(f"empty domain {lo}..{hi} for {name!r}", lineno, 1)
        if lo < INT_MIN or hi > INT_MAX:
            raise PolicyError(f"domain of {name!r} exceeds 64-bit range", lineno, 1)
        seen.add(name)
        decls.append(InputDecl(name, role, lo, hi))
    for role in ("high", "low"):
        if not any(d.role == role for d in decls):
            raise PolicyError(f"missing {role} input declaration", 1, 1)
    return tuple(decls)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        name = self.tok.text
        self.i += 1
        return name

    # statements

    def program(self) -> tuple[Stmt, ...]:
        body = []
        while self.tok.kind != "eof":
            body.append(self.statement())
        return tuple(body)

    def block(self) -> tuple[Stmt, ...]:
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            body.append(self.statement())
        self.expect("}")
        return tuple(body)

    def statement(self) -> Stmt:
        tok = self.tok
        span = (tok.line, tok.col)
        if self.at("if"):
            self.i += 1
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            orelse: tuple[Stmt, ...] = ()
            if self.at("else"):
                self.i += 1
                orelse = self.block()
            return If(cond, then, orelse, span=span)
        if self.at("for"):
            self.i += 1
            var = self.ident()
            self.expect("in")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            return For(var, lo, hi, self.block(), span=span)
        if self.at("return"):
            self.i += 1
            values = [self.expr()]
            while self.at(","):
                self.i += 1
                values.append(self.expr())
            self.expect(";")
            return Return(tuple(values), span=span)
        if tok.kind == "ident":
            target = self.ident()
            self.expect("=")
            expr = self.expr()
            self.expect(";")
            return Assign(target, expr, span=span)
        self.error("expected statement")

    # expressions (precedence climbing)

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and PRECEDENCE.get(self.tok.text, 0) >= min_prec:
            op = self.tok.text
            self.i += 1
            right = self.expr(PRECEDENCE[op] + 1)
            left = Binary(op, left, right)
        return left

    def unary(self) -> Expr:
        if self.at("-") and self.tokens[self.i + 1].kind == "int":
            # `-5` is a negative literal; `-(5)` stays a negation node
            tok = self.tokens[self.i + 1]
            value = -int(tok.text)
            if value < INT_MIN:
                self.error("integer literal out of 64-bit range", tok)
            self.i += 2
            return Int(value)
        if self.at("-") or self.at("!"):
            op = self.tok.text
            self.i += 1
            return Unary(op, self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            value = int(tok.text)
            if value > INT_MAX:
                self.error("integer literal out of 64-bit range")
            self.i += 1
            return Int(value)
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text)
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected expression")


def parse(source: str, name: str = "subject") -> Program:
    """Parse a subject file: ``#policy`` pragma lines plus the program body."""
    lines = source.split("\n")
    inputs = _parse_policy(lines)
    # blank pragma lines out so token positions keep their original line numbers
    body_text = "\n".join("" if ln.strip().startswith("#policy") else ln for ln in lines)
    body = _Parser(tokenize(body_text)).program()
    return Program(name, inputs, body)
