"""Type checking of flattened modules.

Checking is modular: a body is checked against the operation declarations in
its own flattened scope, never against other call sites.  Operations are
monomorphic, so call resolution is exact matching on argument types, with
return-type annotations disambiguating nullary-compatible overloads.

The checker lowers statement trees to a small typed IR (TypedBody) in which
every call carries its resolved signature and every variable its type; the
interpreter and the code generator both consume this IR.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast_nodes import (
    AndExpr,
    AnnotExpr,
    AssertStmt,
    AssignStmt,
    CallExpr,
    CallStmt,
    EqExpr,
    Expr,
    IfStmt,
    NotExpr,
    Param,
    Stmt,
    ValueStmt,
    VarDeclStmt,
    VarRef,
    PREDICATE,
)
from .diagnostics import Diagnostic, Span, error, warning
from .modsys import AxiomInfo, FlatModule, OpInfo


# ── typed IR ─────────────────────────────────────────────────────────────────


@dataclass
class LExpr:
    type: str


@dataclass
class LVar(LExpr):
    name: str


@dataclass
class LCall(LExpr):
    op: OpInfo
    args: list[LExpr]


@dataclass
class LEq(LExpr):
    lhs: LExpr
    rhs: LExpr
    operand_type: str


@dataclass
class LNot(LExpr):
    operand: LExpr


@dataclass
class LAnd(LExpr):
    lhs: LExpr
    rhs: LExpr


@dataclass
class LStmt:
    pass


@dataclass
class LVarDecl(LStmt):
    name: str
    type: str
    init: LExpr | None


@dataclass
class LAssign(LStmt):
    name: str
    expr: LExpr


@dataclass
class LCallStmt(LStmt):
    op: OpInfo
    args: list[LExpr]


@dataclass
class LIf(LStmt):
    cond: LExpr
    then_block: list[LStmt]
    else_block: list[LStmt]


@dataclass
class LAssert(LStmt):
    expr: LExpr


@dataclass
class LValue(LStmt):
    expr: LExpr


@dataclass
class TypedBody:
    params: tuple[Param, ...]
    stmts: list[LStmt]
    var_types: dict[str, str] = field(default_factory=dict)


@dataclass
class CheckedModule:
    """A flattened scope plus the typed bodies, guards and axioms within it."""

    flat: FlatModule
    bodies: dict[tuple, TypedBody] = field(default_factory=dict)  # op sig_key -> body
    guards: dict[tuple, LExpr] = field(default_factory=dict)
    axioms: list[tuple[AxiomInfo, TypedBody]] = field(default_factory=list)


class _Abort(Exception):
    """Stop checking the current body after an unrecoverable diagnostic."""


# ── call resolution ──────────────────────────────────────────────────────────


def resolve_call(
    name: str,
    arg_types: list[str],
    expected_return: str | None,
    scope: FlatModule,
    span: Span | None = None,
    statement: bool = False,
) -> OpInfo | Diagnostic:
    """Find the single operation matching the call; procedures only match in
    statement position and functions/predicates only in expression position."""
    named = sorted(scope.ops_named(name), key=lambda o: o.signature_text())
    if not named:
        return error("NoSuchOperation", f"no operation named {name!r} in scope", span)
    candidates = [o for o in named if (o.kind == "procedure") == statement]
    if not candidates:
        usage = "called as a statement" if statement else "used as an expression"
        return error("NoSuchOperation", f"{name!r} is a {named[0].kind} and cannot be {usage}", span)
    arity = [o for o in candidates if len(o.params) == len(arg_types)]
    if not arity:
        counts = sorted({len(o.params) for o in candidates})
        return error(
            "ArityMismatch",
            f"{name!r} takes {' or '.join(str(c) for c in counts)} argument(s), got {len(arg_types)}",
            span,
        )
    matches = [o for o in arity if list(o.param_types) == arg_types]
    if not matches:
        shown = ", ".join(arg_types)
        return error("NoSuchOperation", f"no overload of {name!r} accepts ({shown})", span)
    if len(matches) == 1:
        return matches[0]
    if expected_return is not None:
        narrowed = [o for o in matches if o.return_type == expected_return]
        if len(narrowed) == 1:
            return narrowed[0]
        if not narrowed:
            return error(
                "NoSuchOperation",
                f"no overload of {name!r} returns {expected_return!r}",
                span,
            )
    rets = ", ".join(str(o.return_type) for o in matches)
    return error(
        "AmbiguousReturnOverload",
        f"{name!r} is overloaded on return type ({rets}); a type annotation must be provided",
        span,
    )


# ── body checking ────────────────────────────────────────────────────────────


@dataclass
class _Ctx:
    scope: FlatModule
    diags: list[Diagnostic]
    kind: str  # "function" | "procedure" | "predicate" | "axiom"
    return_type: str | None
    params: dict[str, Param]
    var_types: dict[str, str] = field(default_factory=dict)
    locals: set[str] = field(default_factory=set)
    reads: set[str] = field(default_factory=set)

    def err(self, code: str, message: str, span: Span | None) -> None:
        self.diags.append(error(code, message, span))

    def type_of(self, name: str) -> str | None:
        return self.var_types.get(name)


def _check_type_name(ctx: _Ctx, name: str, span: Span | None) -> None:
    if name == PREDICATE:
        ctx.err("InvalidUseOfPredicate", "Predicate is not a declarable value type", span)
    elif name not in ctx.scope.types:
        ctx.err("NoSuchType", f"no type named {name!r} in scope", span)


def _check_expr(ctx: _Ctx, e: Expr, expected: str | None) -> LExpr:
    if isinstance(e, VarRef):
        t = ctx.type_of(e.name)
        if t is None:
            ctx.err("NoSuchVariable", f"{e.name!r} is not a variable in scope", e.loc)
            raise _Abort()
        ctx.reads.add(e.name)
        if expected is not None and t != expected:
            ctx.err("TypeMismatch", f"expected {expected!r}, got {e.name!r} of type {t!r}", e.loc)
        return LVar(t, e.name)
    if isinstance(e, AnnotExpr):
        inner = _check_expr(ctx, e.operand, e.type_name)
        if expected is not None and e.type_name != expected:
            ctx.err("TypeMismatch", f"expected {expected!r}, got annotation {e.type_name!r}", e.loc)
        return inner
    if isinstance(e, CallExpr):
        want = e.annotation or expected
        args = [_check_expr(ctx, a, None) for a in e.args]
        resolved = resolve_call(e.name, [a.type for a in args], want, ctx.scope, e.loc)
        if isinstance(resolved, Diagnostic):
            ctx.diags.append(resolved)
            raise _Abort()
        result = resolved.return_type or PREDICATE
        if e.annotation is not None and result != e.annotation:
            ctx.err("TypeMismatch", f"annotation {e.annotation!r} does not match {result!r}", e.loc)
        if expected is not None and result != expected:
            ctx.err("TypeMismatch", f"expected {expected!r}, got call of type {result!r}", e.loc)
        return LCall(result, resolved, args)
    if isinstance(e, NotExpr):
        operand = _check_expr(ctx, e.operand, PREDICATE)
        return LNot(PREDICATE, operand)
    if isinstance(e, AndExpr):
        lhs = _check_expr(ctx, e.lhs, PREDICATE)
        rhs = _check_expr(ctx, e.rhs, PREDICATE)
        return LAnd(PREDICATE, lhs, rhs)
    if isinstance(e, EqExpr):
        lhs = _check_expr(ctx, e.lhs, None)
        rhs = _check_expr(ctx, e.rhs, None)
        if lhs.type != rhs.type:
            ctx.err(
                "EqualityTypeMismatch",
                f"'==' operands must share a type, got {lhs.type!r} and {rhs.type!r}",
                e.loc,
            )
        elif lhs.type == PREDICATE:
            ctx.err("EqualityTypeMismatch", "'==' cannot compare predicate values", e.loc)
        if expected is not None and expected != PREDICATE:
            ctx.err("TypeMismatch", f"expected {expected!r}, got a predicate ('==')", e.loc)
        return LEq(PREDICATE, lhs, rhs, lhs.type)
    raise TypeError(f"not an expression: {e!r}")


def _check_stmt(ctx: _Ctx, s: Stmt, out: list[LStmt]) -> None:
    if isinstance(s, VarDeclStmt):
        if s.name in ctx.var_types:
            ctx.err("DuplicateVariable", f"{s.name!r} is already declared", s.loc)
            raise _Abort()
        if s.type_name is None and s.init is None:
            ctx.err("UntypedVariable", f"var {s.name!r} needs a type annotation or an initializer", s.loc)
            raise _Abort()
        if s.type_name is not None:
            _check_type_name(ctx, s.type_name, s.loc)
        init = None
        if s.init is not None:
            init = _check_expr(ctx, s.init, s.type_name)
            if init.type == PREDICATE:
                ctx.err("InvalidUseOfPredicate", "a variable cannot hold a predicate value", s.loc)
        declared = s.type_name or (init.type if init is not None else None)
        assert declared is not None
        ctx.var_types[s.name] = declared
        ctx.locals.add(s.name)
        out.append(LVarDecl(s.name, declared, init))
        return
    if isinstance(s, AssignStmt):
        t = ctx.type_of(s.name)
        if t is None:
            ctx.err("NoSuchVariable", f"{s.name!r} is not a variable in scope", s.loc)
            raise _Abort()
        expr = _check_expr(ctx, s.expr, t)
        out.append(LAssign(s.name, expr))
        return
    if isinstance(s, CallStmt):
        args = [_check_expr(ctx, a, None) for a in s.args]
        resolved = resolve_call(s.name, [a.type for a in args], None, ctx.scope, s.loc, statement=True)
        if isinstance(resolved, Diagnostic):
            ctx.diags.append(resolved)
            raise _Abort()
        for param, arg, ast_arg in zip(resolved.params, args, s.args):
            if param.mode in ("upd", "out") and not isinstance(arg, LVar):
                ctx.err(
                    "ArgNotAssignable",
                    f"argument for {param.mode} parameter {param.name!r} of {s.name!r} must be a variable",
                    getattr(ast_arg, "loc", s.loc),
                )
        # Function, predicate and axiom parameters flow in as obs, so passing
        # one in an upd/out slot is caught by the mode analysis; bodies must
        # copy into a local first (value semantics).
        out.append(LCallStmt(resolved, args))
        return
    if isinstance(s, IfStmt):
        cond = _check_expr(ctx, s.cond, PREDICATE)
        then_block: list[LStmt] = []
        else_block: list[LStmt] = []
        inner_vars = dict(ctx.var_types)
        for x in s.then_block:
            _check_stmt(ctx, x, then_block)
        ctx.var_types = dict(inner_vars)
        for x in s.else_block or []:
            _check_stmt(ctx, x, else_block)
        # branch-local declarations do not escape the branch
        ctx.var_types = inner_vars
        out.append(LIf(cond, then_block, else_block))
        return
    if isinstance(s, AssertStmt):
        if ctx.kind != "axiom":
            ctx.err("AssertOutsideAxiom", "assert is only allowed in axiom bodies", s.loc)
        expr = _check_expr(ctx, s.expr, PREDICATE)
        out.append(LAssert(expr))
        return
    if isinstance(s, ValueStmt):
        if ctx.kind not in ("function", "predicate"):
            ctx.err("ValueInProcedure", "value statements belong in function bodies only", s.loc)
            expr = _check_expr(ctx, s.expr, None)
        else:
            expr = _check_expr(ctx, s.expr, ctx.return_type)
        out.append(LValue(expr))
        return
    raise TypeError(f"not a statement: {s!r}")


def _terminates(block: list[LStmt]) -> bool:
    for s in block:
        if isinstance(s, LValue):
            return True
        if isinstance(s, LIf) and _terminates(s.then_block) and _terminates(s.else_block):
            return True
    return False


def check_body(
    op_kind: str,
    params: tuple[Param, ...],
    return_type: str | None,
    body: list[Stmt],
    scope: FlatModule,
    diags: list[Diagnostic],
    span: Span | None = None,
) -> TypedBody | None:
    """Check one body; reports into `diags` and returns the typed IR, or None
    when checking had to stop early."""
    ctx = _Ctx(
        scope,
        diags,
        op_kind,
        return_type if op_kind != "predicate" else PREDICATE,
        {p.name: p for p in params},
    )
    for p in params:
        if p.name in ctx.var_types:
            diags.append(error("DuplicateVariable", f"duplicate parameter {p.name!r}", p.loc))
        ctx.var_types[p.name] = p.type_name
        _check_type_name(ctx, p.type_name, p.loc)
    if return_type is not None and op_kind == "function":
        _check_type_name(ctx, return_type, span)
    stmts: list[LStmt] = []
    try:
        for s in body:
            _check_stmt(ctx, s, stmts)
    except _Abort:
        return None
    if ctx.kind in ("function", "predicate") and not _terminates(stmts):
        diags.append(
            error("MissingValueOnPath", "not every path through this function body ends in a value statement", span)
        )
    for name in sorted(ctx.locals - ctx.reads):
        diags.append(warning("UnusedVariable", f"local variable {name!r} is never read", span))
    return TypedBody(params, stmts, ctx.var_types)


# ── mode discipline (definite assignment, write permissions) ─────────────────


def _expr_reads(e: LExpr, ctx_reads: list[str]) -> None:
    if isinstance(e, LVar):
        ctx_reads.append(e.name)
    elif isinstance(e, LCall):
        for a in e.args:
            _expr_reads(a, ctx_reads)
    elif isinstance(e, LEq):
        _expr_reads(e.lhs, ctx_reads)
        _expr_reads(e.rhs, ctx_reads)
    elif isinstance(e, LNot):
        _expr_reads(e.operand, ctx_reads)
    elif isinstance(e, LAnd):
        _expr_reads(e.lhs, ctx_reads)
        _expr_reads(e.rhs, ctx_reads)


class _Flow:
    def __init__(self, params: tuple[Param, ...], diags: list[Diagnostic], span: Span | None):
        self.modes = {p.name: (p.mode or "obs") for p in params}
        self.assigned = {p.name: (p.mode or "obs") != "out" for p in params}
        self.diags = diags
        self.span = span

    def read(self, name: str) -> None:
        if not self.assigned.get(name, False):
            self.diags.append(
                error("ReadBeforeAssign", f"{name!r} may be read before it is assigned", self.span)
            )
            self.assigned[name] = True  # report once per variable per path

    def read_expr(self, e: LExpr) -> None:
        names: list[str] = []
        _expr_reads(e, names)
        for n in names:
            self.read(n)

    def write(self, name: str) -> None:
        if self.modes.get(name) == "obs":
            self.diags.append(error("WriteToObs", f"cannot write to obs parameter {name!r}", self.span))
        self.assigned[name] = True

    def run_block(self, block: list[LStmt]) -> None:
        for s in block:
            self.run_stmt(s)

    def run_stmt(self, s: LStmt) -> None:
        if isinstance(s, LVarDecl):
            if s.init is not None:
                self.read_expr(s.init)
            self.assigned[s.name] = s.init is not None
        elif isinstance(s, LAssign):
            self.read_expr(s.expr)
            self.write(s.name)
        elif isinstance(s, LCallStmt):
            for param, arg in zip(s.op.params, s.args):
                mode = param.mode or "obs"
                if mode == "obs":
                    self.read_expr(arg)
                elif isinstance(arg, LVar):
                    if mode == "upd":
                        self.read(arg.name)
                    self.write(arg.name)
        elif isinstance(s, LIf):
            self.read_expr(s.cond)
            before = dict(self.assigned)
            self.run_block(s.then_block)
            after_then = self.assigned
            self.assigned = dict(before)
            self.run_block(s.else_block)
            after_else = self.assigned
            merged = {}
            for name in set(after_then) | set(after_else):
                merged[name] = after_then.get(name, False) and after_else.get(name, False)
            self.assigned = merged
        elif isinstance(s, LAssert):
            self.read_expr(s.expr)
        elif isinstance(s, LValue):
            self.read_expr(s.expr)


def check_modes(params: tuple[Param, ...], body: TypedBody, diags: list[Diagnostic], span: Span | None = None) -> None:
    """Definite-assignment and write-permission analysis over the typed IR.

    The statement language has no loops, so a single forward pass with a meet
    at if-joins is exact.
    """
    flow = _Flow(params, diags, span)
    flow.run_block(body.stmts)
    for p in params:
        if p.mode == "out" and not flow.assigned.get(p.name, False):
            diags.append(
                error("OutNotAssigned", f"out parameter {p.name!r} is not assigned on every path", span)
            )


# ── guards ───────────────────────────────────────────────────────────────────


def _guard_var_names(e: Expr, names: list[tuple[str, Span]]) -> None:
    if isinstance(e, VarRef):
        names.append((e.name, e.loc))
    elif isinstance(e, CallExpr):
        for a in e.args:
            _guard_var_names(a, names)
    elif isinstance(e, AnnotExpr):
        _guard_var_names(e.operand, names)
    elif isinstance(e, NotExpr):
        _guard_var_names(e.operand, names)
    elif isinstance(e, (EqExpr, AndExpr)):
        _guard_var_names(e.lhs, names)
        _guard_var_names(e.rhs, names)


def check_guard(op: OpInfo, scope: FlatModule, diags: list[Diagnostic], span: Span | None = None) -> LExpr | None:
    """A guard references only the operation's parameters and has Predicate type."""
    assert op.guard is not None
    param_names = {p.name for p in op.params}
    refs: list[tuple[str, Span]] = []
    _guard_var_names(op.guard, refs)
    bad = False
    for name, loc in refs:
        if name not in param_names:
            diags.append(
                error(
                    "GuardReferencesNonParameter",
                    f"guard of {op.name!r} references {name!r}, which is not a parameter",
                    loc,
                )
            )
            bad = True
    if bad:
        return None
    ctx = _Ctx(scope, [], "guard", PREDICATE, {p.name: p for p in op.params})
    for p in op.params:
        ctx.var_types[p.name] = p.type_name
    try:
        typed = _check_expr(ctx, op.guard, None)
    except _Abort:
        diags.extend(ctx.diags)
        return None
    diags.extend(ctx.diags)
    if typed.type != PREDICATE:
        diags.append(
            error("GuardNotPredicate", f"guard of {op.name!r} has type {typed.type!r}, not Predicate", span)
        )
        return None
    return typed


# ── whole-module checking ────────────────────────────────────────────────────


def _check_signature_types(op: OpInfo, scope: FlatModule, diags: list[Diagnostic]) -> None:
    for p in op.params:
        if p.type_name == PREDICATE:
            diags.append(
                error("InvalidUseOfPredicate", f"parameter {p.name!r} of {op.name!r} cannot have type Predicate")
            )
    if op.kind == "function" and op.return_type == PREDICATE:
        diags.append(
            error("InvalidUseOfPredicate", f"{op.name!r} returns Predicate; declare it as a predicate instead")
        )


def check_module(flat: FlatModule) -> tuple[CheckedModule, list[Diagnostic]]:
    """Check every body, guard and axiom in the scope.  Diagnostics are
    reported, not thrown; the CheckedModule covers whatever checked cleanly."""
    diags: list[Diagnostic] = []
    checked = CheckedModule(flat)
    for key in sorted(flat.ops, key=repr):
        op = flat.ops[key]
        _check_signature_types(op, flat, diags)
        if op.guard is not None:
            typed_guard = check_guard(op, flat, diags)
            if typed_guard is not None:
                checked.guards[key] = typed_guard
        if op.body is None:
            continue
        body = check_body(op.kind, op.params, op.return_type, op.body, flat, diags)
        if body is None:
            continue
        check_modes(op.params, body, diags)
        checked.bodies[key] = body
    for ax in flat.axioms:
        body = check_body("axiom", ax.params, None, ax.body, flat, diags)
        if body is None:
            continue
        check_modes(ax.params, body, diags)
        checked.axioms.append((ax, body))
    return checked, diags
