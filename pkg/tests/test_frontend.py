"""Lexer, parser and pretty-printer behavior on the language surface."""

import pytest
from hypothesis import given, settings, strategies as st

from mglite import pretty
from mglite.ast_nodes import CallExpr, EqExpr, OpDecl, TypeDecl, VarRef
from mglite.lexer import TokenKind, tokenize
from mglite.parser import parse, parse_expr

SEMIGROUP_SRC = """\
signature Magma = {
    type T;
    function bop(t1: T, t2: T): T;
}

concept Semigroup = {
    use Magma;
    axiom bopIsAssociative(t1: T, t2: T, t3: T) {
        assert bop(t1, bop(t2, t3)) == bop(bop(t1, t2), t3);
    }
}

implementation PyConcreteSemigroup =
    external Python lib.int_impl {
        use Magma[ T => int, bop => add ];
        use Magma[ T => int, bop => mul ];
    }

program ExampleProgram = {
    use PyConcreteSemigroup;
    procedure timesThreeUpdateRef(upd i: int) {
        i = add(add(i, i), i);
    }

    function timesThree(i: int): int {
        var mutable_i = i;
        call timesThreeUpdateRef(mutable_i);
        value mutable_i;
    }
}

satisfaction ExampleProgramHasAddSemigroup =
    ExampleProgram models Semigroup[ T => int, bop => add ];

satisfaction ExampleProgramHasMulSemigroup =
    ExampleProgram models Semigroup[ T => int, bop => mul ];
"""

QUEUE_SRC = """\
concept Queue = {
    require type A;
    type Queue;

    predicate isEmpty(q: Queue);
    procedure push(obs a: A, upd q: Queue);
    procedure pop(upd q: Queue) guard !isEmpty(q);
    function front(q: Queue): A guard !isEmpty(q);
}
"""

LOOP_SRC = """\
implementation WhileLoop = external C++ while_ops {
    require type State;
    require type Context;
    require predicate cond(state: State, ctx: Context);
    require procedure body(upd state: State, obs ctx: Context);
    procedure repeat(upd state: State, obs ctx: Context);
}
"""

SEARCH_SRC = """\
implementation GraphSearch = {
    procedure search(obs g: Graph, obs start: Vertex, out result: VertexList) = {
        var q = empty(): Queue;
        var visited = emptyList();
        call enqueue(start, q);
        if isEmpty(q) then {
            result = visited;
        } else if contains(visited, front(q)) then {
            call dequeue(q);
        } else {
            call visit(front(q), g, visited, q);
        };
    }
}
"""


def parse_ok(src, path="test.mg"):
    unit, diags = parse(src, path)
    assert not diags, [d.render() for d in diags]
    return unit


def test_semigroup_source_yields_six_modules():
    unit = parse_ok(SEMIGROUP_SRC)
    assert [(m.kind, m.name) for m in unit.modules] == [
        ("signature", "Magma"),
        ("concept", "Semigroup"),
        ("implementation", "PyConcreteSemigroup"),
        ("program", "ExampleProgram"),
        ("satisfaction", "ExampleProgramHasAddSemigroup"),
        ("satisfaction", "ExampleProgramHasMulSemigroup"),
    ]
    assert unit.modules[2].external == ("Python", "lib.int_impl")
    uses = [d for d in unit.modules[2].decls]
    assert [u.target.renaming for u in uses] == [
        [("T", "int"), ("bop", "add")],
        [("T", "int"), ("bop", "mul")],
    ]
    sat = unit.modules[4]
    assert sat.sat_lhs.name == "ExampleProgram" and sat.sat_lhs.renaming == []
    assert sat.sat_rhs.name == "Semigroup"
    assert sat.sat_rhs.renaming == [("T", "int"), ("bop", "add")]


def test_empty_file_parses_to_no_modules():
    unit, diags = parse("", "empty.mg")
    assert unit.modules == [] and diags == []


def test_queue_concept_shape():
    unit = parse_ok(QUEUE_SRC)
    (queue,) = unit.modules
    types = [d for d in queue.decls if isinstance(d, TypeDecl)]
    ops = [d for d in queue.decls if isinstance(d, OpDecl)]
    assert [(t.name, t.required) for t in types] == [("A", True), ("Queue", False)]
    assert [o.name for o in ops] == ["isEmpty", "push", "pop", "front"]
    guards = {o.name: pretty.expr_text(o.guard) for o in ops if o.guard is not None}
    assert guards == {"pop": "!isEmpty(q)", "front": "!isEmpty(q)"}
    push = ops[1]
    assert [(p.mode, p.name, p.type_name) for p in push.params] == [
        ("obs", "a", "A"),
        ("upd", "q", "Queue"),
    ]


def test_require_ops_and_external_header():
    unit = parse_ok(LOOP_SRC)
    (loop,) = unit.modules
    assert loop.external == ("C++", "while_ops")
    ops = [d for d in loop.decls if isinstance(d, OpDecl)]
    assert [(o.name, o.required) for o in ops] == [("cond", True), ("body", True), ("repeat", False)]


def test_else_if_chain_and_annotated_init():
    unit = parse_ok(SEARCH_SRC)
    (m,) = unit.modules
    (op,) = [d for d in m.decls if isinstance(d, OpDecl)]
    var_q = op.body[0]
    assert isinstance(var_q.init, CallExpr) and var_q.init.annotation == "Queue"
    chain = op.body[3]
    assert chain.else_block is not None and len(chain.else_block) == 1
    inner = chain.else_block[0]
    assert inner.else_block is not None  # else-if nests as a one-statement else block


# ── annotated expression parsing ─────────────────────────────────────────────


def test_expr_call_annotation_preserved():
    e = parse_expr("empty(): Queue")
    assert isinstance(e, CallExpr) and e.name == "empty" and e.args == [] and e.annotation == "Queue"


def test_expr_plain_call_has_no_annotation():
    e = parse_expr("front(q)")
    assert isinstance(e, CallExpr) and e.annotation is None
    assert isinstance(e.args[0], VarRef) and e.args[0].name == "q"


def test_expr_equality_of_nested_calls():
    e = parse_expr("bop(t1, bop(t2, t3)) == bop(bop(t1, t2), t3)")
    assert isinstance(e, EqExpr)
    assert isinstance(e.lhs, CallExpr) and isinstance(e.rhs, CallExpr)
    assert pretty.expr_text(e) == "bop(t1, bop(t2, t3)) == bop(bop(t1, t2), t3)"


def test_expr_precedence_not_binds_tighter_than_eq_than_and():
    e = parse_expr("!isEmpty(q) && front(q) == a")
    assert pretty.expr_text(e) == "!isEmpty(q) && front(q) == a"
    e2 = parse_expr("!(isEmpty(q) && b == a)")
    assert pretty.expr_text(e2) == "!(isEmpty(q) && b == a)"


def test_equality_does_not_chain():
    from mglite.diagnostics import CompileError

    with pytest.raises(CompileError):
        parse_expr("a == b == c")


# ── diagnostics ──────────────────────────────────────────────────────────────


def err_codes(src):
    _, diags = parse(src, "bad.mg")
    return sorted(d.code for d in diags)


def test_procedure_params_need_modes():
    assert "MissingMode" in err_codes("implementation I = { procedure p(x: T); }")


def test_function_params_reject_modes():
    assert "ModeNotAllowed" in err_codes("implementation I = { function f(obs x: T): T; }")


def test_external_ops_cannot_carry_bodies():
    src = "implementation I = external Python lib.x { function f(): T { value g(); } }"
    assert "ExternalBodyNotAllowed" in err_codes(src)


def test_satisfaction_lhs_rejects_renaming():
    assert "SatisfactionLhsRenaming" in err_codes("satisfaction S = A[x => y] models B;")


def test_signatures_reject_axioms_and_bodies():
    src = "signature S = { axiom a() { assert p(); } function f(): T { value g(); } }"
    codes = err_codes(src)
    assert "AxiomInSignature" in codes and "BodyInSignature" in codes


def test_keywords_are_reserved():
    assert "ReservedWord" in err_codes("concept value = { type T; }")


def test_unterminated_block_comment():
    _, diags = tokenize("concept C /* open", "bad.mg")
    assert [d.code for d in diags] == ["UnterminatedComment"]


def test_diagnostics_carry_positions():
    _, diags = parse("concept C = {\n  type 5;\n}", "pos.mg")
    assert diags and diags[0].span.line == 2
    assert "pos.mg:2:" in diags[0].render()


def test_error_recovery_continues_to_next_module():
    src = "concept Bad = { type ; }\nconcept Good = { type T; }"
    unit, diags = parse(src, "two.mg")
    assert diags
    assert any(m.name == "Good" for m in unit.modules)


# ── spans, determinism, round-trip ───────────────────────────────────────────


def test_token_spans_are_one_based_and_ordered():
    toks, diags = tokenize("concept C = {\n  type T;\n}", "t.mg")
    assert not diags
    assert toks[0].span.line == 1 and toks[0].span.col == 1
    kinds = [t.kind for t in toks]
    assert kinds[-1] is TokenKind.EOF
    positions = [(t.span.line, t.span.col) for t in toks[:-1]]
    assert positions == sorted(positions)


def test_parse_is_deterministic():
    a = parse_ok(SEMIGROUP_SRC)
    b = parse_ok(SEMIGROUP_SRC)
    assert a.modules == b.modules


@pytest.mark.parametrize("src", [SEMIGROUP_SRC, QUEUE_SRC, LOOP_SRC, SEARCH_SRC])
def test_pretty_print_round_trips(src):
    unit = parse_ok(src)
    printed = pretty.unit_text(unit)
    reparsed = parse_ok(printed, "printed.mg")
    assert reparsed.modules == unit.modules
    # and printing is a fixed point of its own output
    assert pretty.unit_text(reparsed) == printed


IDENT = st.from_regex(r"[a-z][a-zA-Z0-9]{0,6}", fullmatch=True).filter(
    lambda s: s not in {"if", "var", "call", "value", "assert", "obs", "upd", "out", "then", "else", "type", "use", "guard", "models", "axiom"}
)


@st.composite
def expr_texts(draw, depth=0):
    if depth >= 3 or draw(st.booleans()):
        choice = draw(st.integers(0, 2))
        if choice == 0:
            return draw(IDENT)
        args = draw(st.lists(expr_texts(depth + 1), max_size=2))
        return f"{draw(IDENT)}({', '.join(args)})"
    a = draw(expr_texts(depth + 1))
    b = draw(expr_texts(depth + 1))
    form = draw(st.integers(0, 3))
    if form == 0:
        return f"({a}) == ({b})"
    if form == 1:
        return f"({a}) && ({b})"
    if form == 2:
        return f"!({a})"
    return f"({a})"


@given(expr_texts())
@settings(max_examples=200)
def test_expression_print_parse_fixed_point(text):
    e = parse_expr(text)
    printed = pretty.expr_text(e)
    assert parse_expr(printed) == e
    assert pretty.expr_text(parse_expr(printed)) == printed
