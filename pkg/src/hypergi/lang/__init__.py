from .ast import (
    ERR,
    NORET,
    TIMEOUT,
    VALUES,
    Assign,
    Binary,
    For,
    If,
    InputDecl,
    Int,
    Observation,
    Program,
    Return,
    SecurityPolicy,
    Unary,
    Var,
    decode_index,
    wrap64,
)
from .edits import (
    CopyOf,
    Delete,
    Edit,
    Insert,
    NewFor,
    NewIf,
    Replace,
    SynthAssign,
    apply_edit,
    apply_patch,
    edit_from_json,
    edit_to_json,
    list_statements,
)
from .interp import DEFAULT_STEP_BUDGET, execute, runner
from .parser import parse
from .render import render

__all__ = [
    "ERR", "NORET", "TIMEOUT", "VALUES",
    "Assign", "Binary", "For", "If", "InputDecl", "Int", "Observation", "Program",
    "Return", "SecurityPolicy", "Unary", "Var", "decode_index", "wrap64",
    "CopyOf", "Delete", "Edit", "Insert", "NewFor", "NewIf", "Replace", "SynthAssign",
    "apply_edit", "apply_patch", "edit_from_json", "edit_to_json", "list_statements",
    "DEFAULT_STEP_BUDGET", "execute", "runner", "parse", "render",
]
