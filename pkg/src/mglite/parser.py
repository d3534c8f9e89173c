"""Recursive-descent parser for .mg sources.

The grammar is deliberately small: five module kinds, declarations with
optional `require`, guarded operations, and a statement language without
loops.  Operator precedence: `!` binds tighter than `==`, which binds tighter
than `&&`.  Postfix `: T` annotates an expression with an expected type.
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
    Mode,
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
from .diagnostics import CompileError, Diagnostic, Span, error
from .lexer import Token, TokenKind, tokenize

MODULE_KINDS = ("signature", "concept", "implementation", "program", "satisfaction")
OP_KINDS = ("function", "procedure", "predicate")


class _ParseAbort(Exception):
    """Internal signal used to synchronize after a syntax error."""


class Parser:
    def __init__(self, tokens: list[Token], diags: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diags = diags

    # ── token plumbing ──────────────────────────────────────────────────────

    def _current(self) -> Token:
        return self.tokens[self.pos]

    def _at(self, kind: TokenKind, text: str | None = None) -> bool:
        tok = self._current()
        return tok.kind == kind and (text is None or tok.text == text)

    def _at_keyword(self, *words: str) -> bool:
        tok = self._current()
        return tok.kind == TokenKind.KEYWORD and tok.text in words

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def _expect(self, kind: TokenKind, what: str, text: str | None = None) -> Token:
        if self._at(kind, text):
            return self._advance()
        tok = self._current()
        found = tok.text if tok.kind is not TokenKind.EOF else "end of file"
        self.diags.append(error("SyntaxError", f"expected {what}, found {found!r}", tok.span))
        raise _ParseAbort()

    def _expect_ident(self, what: str) -> Token:
        if self._at(TokenKind.IDENT):
            tok = self._advance()
            if "+" in tok.text and what != "backend name":
                self.diags.append(
                    error("SyntaxError", f"invalid character '+' in {what} {tok.text!r}", tok.span)
                )
                raise _ParseAbort()
            return tok
        tok = self._current()
        if tok.kind is TokenKind.KEYWORD:
            self.diags.append(
                error("ReservedWord", f"{tok.text!r} is a reserved word and cannot name a {what}", tok.span)
            )
            raise _ParseAbort()
        found = tok.text if tok.kind is not TokenKind.EOF else "end of file"
        self.diags.append(error("SyntaxError", f"expected {what}, found {found!r}", tok.span))
        raise _ParseAbort()

    def _sync_to(self, kinds: set[TokenKind], keywords: set[str] = frozenset()) -> None:
        depth = 0
        while not self._at(TokenKind.EOF):
            tok = self._current()
            if depth == 0 and (tok.kind in kinds or (tok.kind is TokenKind.KEYWORD and tok.text in keywords)):
                return
            if tok.kind is TokenKind.LBRACE:
                depth += 1
            elif tok.kind is TokenKind.RBRACE:
                if depth == 0:
                    return
                depth -= 1
            self._advance()

    # ── modules ─────────────────────────────────────────────────────────────

    def parse_unit(self, path: str) -> SourceUnit:
        modules: list[Module] = []
        while not self._at(TokenKind.EOF):
            if self._at_keyword(*MODULE_KINDS):
                try:
                    modules.append(self._module())
                except _ParseAbort:
                    self._sync_to(set(), set(MODULE_KINDS))
            else:
                tok = self._current()
                self.diags.append(
                    error("SyntaxError", f"expected a module keyword, found {tok.text!r}", tok.span)
                )
                self._advance()
                self._sync_to(set(), set(MODULE_KINDS))
        return SourceUnit(path, modules)

    def _module(self) -> Module:
        kw = self._advance()
        kind = kw.text
        name = self._expect_ident("module name")
        self._expect(TokenKind.ASSIGN, "'='")
        if kind == "satisfaction":
            lhs = self._module_expr()
            if lhs.renaming:
                self.diags.append(
                    error("SatisfactionLhsRenaming", "renaming is not allowed on the left of 'models'", lhs.loc)
                )
            self._expect(TokenKind.KEYWORD, "'models'", "models")
            rhs = self._module_expr()
            self._expect(TokenKind.SEMI, "';'")
            return Module("satisfaction", name.text, None, [], lhs, rhs, kw.span.merge(name.span))

        external: tuple[str, str] | None = None
        if self._at_keyword("external"):
            self._advance()
            backend = self._expect_ident("backend name")
            external = (backend.text, self._dotted_path())
        self._expect(TokenKind.LBRACE, "'{'")
        decls: list[Decl] = []
        while not self._at(TokenKind.RBRACE) and not self._at(TokenKind.EOF):
            try:
                decls.append(self._decl(in_external=external is not None))
            except _ParseAbort:
                self._sync_to({TokenKind.SEMI, TokenKind.RBRACE})
                if self._at(TokenKind.SEMI):
                    self._advance()
        self._expect(TokenKind.RBRACE, "'}'")
        if self._at(TokenKind.SEMI):
            self._advance()
        if kind == "signature":
            for d in decls:
                if isinstance(d, AxiomDecl):
                    self.diags.append(
                        error("AxiomInSignature", "a signature cannot contain axioms; use a concept", d.loc)
                    )
                elif isinstance(d, OpDecl) and d.body is not None:
                    self.diags.append(
                        error("BodyInSignature", f"operation {d.name!r} cannot have a body in a signature", d.loc)
                    )
        return Module(kind, name.text, external, decls, None, None, kw.span.merge(name.span))  # type: ignore[arg-type]

    def _dotted_path(self) -> str:
        parts = [self._expect_ident("host path segment").text]
        while self._at(TokenKind.DOT):
            self._advance()
            parts.append(self._expect_ident("host path segment").text)
        return ".".join(parts)

    def _module_expr(self) -> ModuleExpr:
        name = self._expect_ident("module name")
        renaming: list[tuple[str, str]] = []
        loc = name.span
        if self._at(TokenKind.LBRACKET):
            self._advance()
            while True:
                src = self._expect_ident("renaming source")
                self._expect(TokenKind.ARROW, "'=>'")
                tgt = self._expect_ident("renaming target")
                renaming.append((src.text, tgt.text))
                if self._at(TokenKind.COMMA):
                    self._advance()
                    continue
                break
            close = self._expect(TokenKind.RBRACKET, "']'")
            loc = name.span.merge(close.span)
        return ModuleExpr(name.text, renaming, loc)

    # ── declarations ────────────────────────────────────────────────────────

    def _decl(self, in_external: bool) -> Decl:
        if self._at_keyword("use"):
            kw = self._advance()
            target = self._module_expr()
            self._expect(TokenKind.SEMI, "';'")
            return UseDecl(target, kw.span.merge(target.loc))

        required = False
        if self._at_keyword("require"):
            self._advance()
            required = True

        if self._at_keyword("type"):
            kw = self._advance()
            name = self._expect_ident("type name")
            self._expect(TokenKind.SEMI, "';'")
            return TypeDecl(name.text, required, kw.span.merge(name.span))

        if self._at_keyword(*OP_KINDS):
            return self._op_decl(required, in_external)

        if self._at_keyword("axiom"):
            if required:
                self.diags.append(error("SyntaxError", "'require' cannot precede an axiom", self._current().span))
            kw = self._advance()
            name = self._expect_ident("axiom name")
            params = self._params(allow_modes=False)
            body = self._block()
            if self._at(TokenKind.SEMI):
                self._advance()
            return AxiomDecl(name.text, params, body, kw.span.merge(name.span))

        tok = self._current()
        self.diags.append(error("SyntaxError", f"expected a declaration, found {tok.text!r}", tok.span))
        raise _ParseAbort()

    def _op_decl(self, required: bool, in_external: bool) -> OpDecl:
        kw = self._advance()
        op_kind = kw.text
        name = self._expect_ident(f"{op_kind} name")
        params = self._params(allow_modes=op_kind == "procedure")
        return_type: str | None = None
        if op_kind == "function":
            self._expect(TokenKind.COLON, "':' and a return type")
            return_type = self._expect_ident("return type").text
        elif op_kind == "predicate":
            return_type = PREDICATE
        guard: Expr | None = None
        if self._at_keyword("guard"):
            self._advance()
            guard = self._expr()
        body: list[Stmt] | None = None
        if self._at(TokenKind.SEMI):
            self._advance()
        else:
            if self._at(TokenKind.ASSIGN):  # `function f(...): T = { ... }` form
                self._advance()
            body = self._block()
            if self._at(TokenKind.SEMI):
                self._advance()
            if in_external:
                self.diags.append(
                    error(
                        "ExternalBodyNotAllowed",
                        f"operation {name.text!r} may not carry a body inside an external block",
                        name.span,
                    )
                )
        return OpDecl(op_kind, name.text, params, return_type, guard, body, required, kw.span.merge(name.span))  # type: ignore[arg-type]

    def _params(self, allow_modes: bool) -> list[Param]:
        self._expect(TokenKind.LPAREN, "'('")
        params: list[Param] = []
        if not self._at(TokenKind.RPAREN):
            while True:
                mode: Mode | None = None
                if self._at_keyword("obs", "upd", "out"):
                    tok = self._advance()
                    mode = tok.text  # type: ignore[assignment]
                    if not allow_modes:
                        self.diags.append(
                            error(
                                "ModeNotAllowed",
                                f"parameter mode {tok.text!r} is only valid on procedure parameters",
                                tok.span,
                            )
                        )
                elif allow_modes:
                    self.diags.append(
                        error("MissingMode", "procedure parameters must state a mode (obs, upd or out)", self._current().span)
                    )
                pname = self._expect_ident("parameter name")
                self._expect(TokenKind.COLON, "':'")
                ptype = self._expect_ident("parameter type")
                params.append(Param(pname.text, mode, ptype.text, pname.span.merge(ptype.span)))
                if self._at(TokenKind.COMMA):
                    self._advance()
                    continue
                break
        self._expect(TokenKind.RPAREN, "')'")
        return params

    # ── statements ──────────────────────────────────────────────────────────

    def _block(self) -> list[Stmt]:
        self._expect(TokenKind.LBRACE, "'{'")
        stmts: list[Stmt] = []
        while not self._at(TokenKind.RBRACE) and not self._at(TokenKind.EOF):
            try:
                stmts.append(self._stmt())
            except _ParseAbort:
                self._sync_to({TokenKind.SEMI, TokenKind.RBRACE})
                if self._at(TokenKind.SEMI):
                    self._advance()
        self._expect(TokenKind.RBRACE, "'}'")
        return stmts

    def _stmt(self) -> Stmt:
        if self._at_keyword("var"):
            kw = self._advance()
            name = self._expect_ident("variable name")
            type_name: str | None = None
            init: Expr | None = None
            if self._at(TokenKind.COLON):
                self._advance()
                type_name = self._expect_ident("type name").text
            if self._at(TokenKind.ASSIGN):
                self._advance()
                init = self._expr()
            self._expect(TokenKind.SEMI, "';'")
            return VarDeclStmt(name.text, type_name, init, kw.span.merge(name.span))
        if self._at_keyword("call"):
            kw = self._advance()
            name = self._expect_ident("procedure name")
            args = self._call_args()
            self._expect(TokenKind.SEMI, "';'")
            return CallStmt(name.text, args, kw.span.merge(name.span))
        if self._at_keyword("assert"):
            kw = self._advance()
            e = self._expr()
            self._expect(TokenKind.SEMI, "';'")
            return AssertStmt(e, kw.span.merge(e.loc))
        if self._at_keyword("value"):
            kw = self._advance()
            e = self._expr()
            self._expect(TokenKind.SEMI, "';'")
            return ValueStmt(e, kw.span.merge(e.loc))
        if self._at_keyword("if"):
            return self._if_stmt()
        if self._at(TokenKind.IDENT):
            name = self._advance()
            self._expect(TokenKind.ASSIGN, "'=' (assignment)")
            e = self._expr()
            self._expect(TokenKind.SEMI, "';'")
            return AssignStmt(name.text, e, name.span.merge(e.loc))
        tok = self._current()
        self.diags.append(error("SyntaxError", f"expected a statement, found {tok.text!r}", tok.span))
        raise _ParseAbort()

    def _if_stmt(self) -> IfStmt:
        kw = self._expect(TokenKind.KEYWORD, "'if'", "if")
        cond = self._expr()
        self._expect(TokenKind.KEYWORD, "'then'", "then")
        then_block = self._block()
        else_block: list[Stmt] | None = None
        if self._at_keyword("else"):
            self._advance()
            if self._at_keyword("if"):
                else_block = [self._if_stmt()]
            else:
                else_block = self._block()
        if self._at(TokenKind.SEMI):
            self._advance()
        return IfStmt(cond, then_block, else_block, kw.span.merge(cond.loc))

    # ── expressions ─────────────────────────────────────────────────────────

    def _expr(self) -> Expr:
        return self._and_expr()

    def _and_expr(self) -> Expr:
        left = self._eq_expr()
        while self._at(TokenKind.ANDAND):
            self._advance()
            right = self._eq_expr()
            left = AndExpr(left, right, left.loc.merge(right.loc))
        return left

    def _eq_expr(self) -> Expr:
        left = self._unary()
        if self._at(TokenKind.EQEQ):
            self._advance()
            right = self._unary()
            left = EqExpr(left, right, left.loc.merge(right.loc))
            if self._at(TokenKind.EQEQ):
                self.diags.append(error("SyntaxError", "'==' does not chain; parenthesize", self._current().span))
                raise _ParseAbort()
        return left

    def _unary(self) -> Expr:
        if self._at(TokenKind.BANG):
            tok = self._advance()
            operand = self._unary()
            return NotExpr(operand, tok.span.merge(operand.loc))
        return self._postfix()

    def _postfix(self) -> Expr:
        e = self._primary()
        if self._at(TokenKind.COLON):
            self._advance()
            ty = self._expect_ident("type annotation")
            if isinstance(e, CallExpr) and e.annotation is None:
                e.annotation = ty.text
                e.loc = e.loc.merge(ty.span)
            else:
                e = AnnotExpr(e, ty.text, e.loc.merge(ty.span))
        return e

    def _primary(self) -> Expr:
        if self._at(TokenKind.LPAREN):
            self._advance()
            e = self._expr()
            self._expect(TokenKind.RPAREN, "')'")
            return e
        name = self._expect_ident("expression")
        if self._at(TokenKind.LPAREN):
            args = self._call_args()
            return CallExpr(name.text, args, None, name.span)
        return VarRef(name.text, name.span)

    def _call_args(self) -> list[Expr]:
        self._expect(TokenKind.LPAREN, "'('")
        args: list[Expr] = []
        if not self._at(TokenKind.RPAREN):
            while True:
                args.append(self._expr())
                if self._at(TokenKind.COMMA):
                    self._advance()
                    continue
                break
        self._expect(TokenKind.RPAREN, "')'")
        return args


# ── public entry points ──────────────────────────────────────────────────────


def parse(text: str, path: str = "<input>") -> tuple[SourceUnit, list[Diagnostic]]:
    """Parse one source file into a SourceUnit plus diagnostics."""
    tokens, diags = tokenize(text, path)
    parser = Parser(tokens, diags)
    unit = parser.parse_unit(path)
    return unit, diags


def parse_expr(text: str, path: str = "<expr>") -> Expr:
    """Parse a standalone expression (annotations preserved); raises on error."""
    tokens, diags = tokenize(text, path)
    parser = Parser(tokens, diags)
    e: Expr | None = None
    try:
        e = parser._expr()
    except _ParseAbort:
        pass
    if e is not None and not parser._at(TokenKind.EOF):
        tok = parser._current()
        diags.append(error("SyntaxError", f"trailing input after expression: {tok.text!r}", tok.span))
    if diags or e is None:
        raise CompileError(diags or [error("SyntaxError", "empty expression")])
    return e
