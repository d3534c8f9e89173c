"""AST node definitions.

Equality on nodes is structural: source spans are excluded from comparison so
that a pretty-printed and reparsed tree compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Union

from .diagnostics import Span

ModuleKind = Literal["signature", "concept", "implementation", "program", "satisfaction"]
OpKind = Literal["function", "procedure", "predicate"]
Mode = Literal["obs", "upd", "out"]

# The predicate result type is built in and cannot be declared by users.
PREDICATE = "Predicate"

KEYWORDS = frozenset(
    [
        "signature", "concept", "implementation", "program", "satisfaction",
        "external", "use", "require", "type", "function", "procedure",
        "predicate", "axiom", "guard", "obs", "upd", "out", "var", "call",
        "value", "assert", "if", "then", "else", "models",
    ]
)


# ── Expressions ──────────────────────────────────────────────────────────────


@dataclass
class VarRef:
    name: str
    loc: Span = field(compare=False)


@dataclass
class CallExpr:
    """`name(args)`, optionally with a return-type annotation `name(args): T`."""

    name: str
    args: list["Expr"]
    annotation: str | None
    loc: Span = field(compare=False)


@dataclass
class EqExpr:
    lhs: "Expr"
    rhs: "Expr"
    loc: Span = field(compare=False)


@dataclass
class NotExpr:
    operand: "Expr"
    loc: Span = field(compare=False)


@dataclass
class AndExpr:
    lhs: "Expr"
    rhs: "Expr"
    loc: Span = field(compare=False)


@dataclass
class AnnotExpr:
    """`e : T` on a non-call expression (call annotations live on CallExpr)."""

    operand: "Expr"
    type_name: str
    loc: Span = field(compare=False)


Expr = Union[VarRef, CallExpr, EqExpr, NotExpr, AndExpr, AnnotExpr]


# ── Statements ───────────────────────────────────────────────────────────────


@dataclass
class VarDeclStmt:
    """`var x = e;`, `var x: T;` or `var x: T = e;`."""

    name: str
    type_name: str | None
    init: Expr | None
    loc: Span = field(compare=False)


@dataclass
class AssignStmt:
    name: str
    expr: Expr
    loc: Span = field(compare=False)


@dataclass
class CallStmt:
    name: str
    args: list[Expr]
    loc: Span = field(compare=False)


@dataclass
class IfStmt:
    """`if c then { ... } else { ... }`; an `else if` chain nests in else_block."""

    cond: Expr
    then_block: list["Stmt"]
    else_block: list["Stmt"] | None
    loc: Span = field(compare=False)


@dataclass
class AssertStmt:
    expr: Expr
    loc: Span = field(compare=False)


@dataclass
class ValueStmt:
    expr: Expr
    loc: Span = field(compare=False)


Stmt = Union[VarDeclStmt, AssignStmt, CallStmt, IfStmt, AssertStmt, ValueStmt]


# ── Declarations ─────────────────────────────────────────────────────────────


@dataclass
class Param:
    """Op parameter.  `mode` is None for function/predicate params (implicitly obs)."""

    name: str
    mode: Mode | None
    type_name: str
    loc: Span = field(compare=False)


@dataclass
class TypeDecl:
    name: str
    required: bool
    loc: Span = field(compare=False)


@dataclass
class OpDecl:
    """Function, procedure or predicate declaration, possibly with a body."""

    kind: OpKind
    name: str
    params: list[Param]
    return_type: str | None  # None for procedures; PREDICATE for predicates
    guard: Expr | None
    body: list[Stmt] | None
    required: bool
    loc: Span = field(compare=False)


@dataclass
class AxiomDecl:
    name: str
    params: list[Param]
    body: list[Stmt]
    loc: Span = field(compare=False)


@dataclass
class ModuleExpr:
    """`Name` or `Name [ a => b, ... ]` as used by `use` and satisfactions."""

    name: str
    renaming: list[tuple[str, str]]
    loc: Span = field(compare=False)


@dataclass
class UseDecl:
    target: ModuleExpr
    loc: Span = field(compare=False)


Decl = Union[TypeDecl, OpDecl, AxiomDecl, UseDecl]


# ── Modules ──────────────────────────────────────────────────────────────────


@dataclass
class Module:
    """One top-level module.

    For satisfaction modules `decls` is empty and sat_lhs/sat_rhs are set.
    `external` carries (backend name, dotted host path) for external blocks.
    """

    kind: ModuleKind
    name: str
    external: tuple[str, str] | None
    decls: list[Decl]
    sat_lhs: ModuleExpr | None
    sat_rhs: ModuleExpr | None
    loc: Span = field(compare=False)


@dataclass
class SourceUnit:
    """All modules parsed from one file, in source order."""

    path: str
    modules: list[Module]
