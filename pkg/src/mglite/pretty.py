"""Canonical pretty-printer for the AST.

print/parse round-trips preserve structure: parse(print(m)) == m under the
span-insensitive node equality.  The printer is also the single source of the
canonical expression text used in flatten dumps and guard comparisons.
"""

from __future__ import annotations

from .ast_nodes import (
    AndExpr,
    AnnotExpr,
    AssertStmt,
    AssignStmt,
    AxiomDecl,
    CallExpr,
    CallStmt,
    Decl,
    EqExpr,
    Expr,
    IfStmt,
    Module,
    ModuleExpr,
    NotExpr,
    OpDecl,
    Param,
    SourceUnit,
    Stmt,
    TypeDecl,
    UseDecl,
    ValueStmt,
    VarDeclStmt,
    VarRef,
    PREDICATE,
)

_INDENT = "    "

# precedence ladder: && (1) < == (2) < ! (3) < postfix/primary (4)


def expr_text(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, CallExpr):
        inner = f"{e.name}({', '.join(expr_text(a) for a in e.args)})"
        if e.annotation is not None:
            inner = f"{inner}: {e.annotation}"
            return _paren(inner, 4, parent_prec) if parent_prec > 4 else inner
        return inner
    if isinstance(e, AnnotExpr):
        return _paren(f"{expr_text(e.operand, 5)}: {e.type_name}", 4, parent_prec)
    if isinstance(e, NotExpr):
        return _paren(f"!{expr_text(e.operand, 3)}", 3, parent_prec)
    if isinstance(e, EqExpr):
        return _paren(f"{expr_text(e.lhs, 3)} == {expr_text(e.rhs, 3)}", 2, parent_prec)
    if isinstance(e, AndExpr):
        return _paren(f"{expr_text(e.lhs, 1)} && {expr_text(e.rhs, 2)}", 1, parent_prec)
    raise TypeError(f"not an expression node: {e!r}")


def _paren(text: str, prec: int, parent_prec: int) -> str:
    return f"({text})" if prec < parent_prec else text


def param_text(p: Param) -> str:
    if p.mode is not None:
        return f"{p.mode} {p.name}: {p.type_name}"
    return f"{p.name}: {p.type_name}"


def _stmt_lines(s: Stmt, depth: int) -> list[str]:
    pad = _INDENT * depth
    if isinstance(s, VarDeclStmt):
        text = f"var {s.name}"
        if s.type_name is not None:
            text += f": {s.type_name}"
        if s.init is not None:
            text += f" = {expr_text(s.init)}"
        return [f"{pad}{text};"]
    if isinstance(s, AssignStmt):
        return [f"{pad}{s.name} = {expr_text(s.expr)};"]
    if isinstance(s, CallStmt):
        return [f"{pad}call {s.name}({', '.join(expr_text(a) for a in s.args)});"]
    if isinstance(s, AssertStmt):
        return [f"{pad}assert {expr_text(s.expr)};"]
    if isinstance(s, ValueStmt):
        return [f"{pad}value {expr_text(s.expr)};"]
    if isinstance(s, IfStmt):
        return _if_lines(s, depth, terminate=True)
    raise TypeError(f"not a statement node: {s!r}")


def _if_lines(s: IfStmt, depth: int, terminate: bool) -> list[str]:
    pad = _INDENT * depth
    lines = [f"{pad}if {expr_text(s.cond)} then {{"]
    for inner in s.then_block:
        lines.extend(_stmt_lines(inner, depth + 1))
    lines.append(f"{pad}}}")
    if s.else_block is not None:
        if len(s.else_block) == 1 and isinstance(s.else_block[0], IfStmt):
            chained = _if_lines(s.else_block[0], depth, terminate=False)
            lines[-1] = f"{pad}}} else {chained[0].lstrip()}"
            lines.extend(chained[1:])
        else:
            lines[-1] = f"{pad}}} else {{"
            for inner in s.else_block:
                lines.extend(_stmt_lines(inner, depth + 1))
            lines.append(f"{pad}}}")
    if terminate:
        lines[-1] += ";"
    return lines


def _block_lines(body: list[Stmt], depth: int, header: str) -> list[str]:
    pad = _INDENT * depth
    if not body:
        return [f"{pad}{header} {{}}"]
    lines = [f"{pad}{header} {{"]
    for s in body:
        lines.extend(_stmt_lines(s, depth + 1))
    lines.append(f"{pad}}}")
    return lines


def decl_lines(d: Decl, depth: int = 1) -> list[str]:
    pad = _INDENT * depth
    if isinstance(d, TypeDecl):
        req = "require " if d.required else ""
        return [f"{pad}{req}type {d.name};"]
    if isinstance(d, UseDecl):
        return [f"{pad}use {module_expr_text(d.target)};"]
    if isinstance(d, AxiomDecl):
        header = f"axiom {d.name}({', '.join(param_text(p) for p in d.params)})"
        return _block_lines(d.body, depth, header)
    if isinstance(d, OpDecl):
        req = "require " if d.required else ""
        header = f"{req}{d.kind} {d.name}({', '.join(param_text(p) for p in d.params)})"
        if d.kind == "function":
            header += f": {d.return_type}"
        if d.guard is not None:
            header += f" guard {expr_text(d.guard)}"
        if d.body is None:
            return [f"{pad}{header};"]
        return _block_lines(d.body, depth, header)
    raise TypeError(f"not a declaration node: {d!r}")


def module_expr_text(m: ModuleExpr) -> str:
    if not m.renaming:
        return m.name
    inner = ", ".join(f"{a} => {b}" for a, b in m.renaming)
    return f"{m.name}[{inner}]"


def module_text(m: Module) -> str:
    if m.kind == "satisfaction":
        return (
            f"satisfaction {m.name} = {module_expr_text(m.sat_lhs)}"
            f" models {module_expr_text(m.sat_rhs)};\n"
        )
    header = f"{m.kind} {m.name} = "
    if m.external is not None:
        backend, path = m.external
        header += f"external {backend} {path} "
    lines = [header + "{"]
    for d in m.decls:
        lines.extend(decl_lines(d))
    lines.append("}")
    return "\n".join(lines) + "\n"


def unit_text(unit: SourceUnit) -> str:
    return "\n".join(module_text(m) for m in unit.modules)


def op_signature_text(kind: str, name: str, params: list[Param], return_type: str | None) -> str:
    """Signature rendering used by diagnostics and dumps; omits guard and body."""
    inner = ", ".join(param_text(p) for p in params)
    if kind == "function":
        return f"{name}({inner}): {return_type}"
    if kind == "predicate":
        return f"{name}({inner}): {PREDICATE}"
    return f"{name}({inner})"
