"""Shipping criteria for the whole toolchain, one test per criterion.

Each test emits a single ``criterion N (label): PASS/FAIL`` line carrying
the measured quantities and then asserts.  The lines are echoed in the
terminal summary (see ``pytest_terminal_summary`` in conftest), so plain
``pytest -v`` shows one verdict line per criterion.
"""

import random
import time
from collections import deque

import pytest
import textbook
from conftest import (
    CORPUS_DIR,
    GOLDEN_DIR,
    _errors,
    checked_module,
    corpus_env,
    fixture_text,
)
from test_oraclegen import EXECUTABLE_SATISFACTIONS, MUTANTS, report_for

from mglite.codegen import load_emitted, transpile
from mglite.corpus import load_corpus
from mglite.interp import Interpreter
from mglite.modsys import (
    ModuleEnv,
    Renaming,
    apply_renaming,
    check_satisfaction,
    dump_flat,
    flatten,
)
from mglite.parser import parse
from mglite.semantics import check_module

from lib import graph_impl


CRITERION_LINES: list[str] = []


def _criterion(number: int, label: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d} ({label}): {'PASS' if ok else 'FAIL'} — {detail}"
    CRITERION_LINES.append(line)
    print(line)
    assert ok, line


def _fresh_env() -> ModuleEnv:
    """Parse the corpus without any test-fixture caching (for timing)."""
    units = []
    for path in sorted(CORPUS_DIR.glob("*.mg")):
        unit, diags = parse(path.read_text(), str(path))
        assert not _errors(diags), [d.render() for d in diags]
        units.append(unit)
    env, diags = ModuleEnv.from_units(units)
    assert not _errors(diags), [d.render() for d in diags]
    return env


def _edited_env(fname: str, old: str, new: str) -> ModuleEnv:
    """Corpus environment with one textual edit applied to one file."""
    units = []
    for path in sorted(CORPUS_DIR.glob("*.mg")):
        text = path.read_text()
        if path.name == fname:
            assert text.count(old) == 1, f"edit anchor not unique in {fname}: {old!r}"
            text = text.replace(old, new)
        unit, diags = parse(text, str(path))
        assert not _errors(diags), [d.render() for d in diags]
        units.append(unit)
    env, diags = ModuleEnv.from_units(units)
    assert not _errors(diags), [d.render() for d in diags]
    return env


def _emitted_entries(name, tmp_path, guard_checks=True, binding_overrides=None):
    out = tmp_path / f"emit_{name}_{len(list(tmp_path.iterdir()))}"
    transpile(
        checked_module(name),
        out_dir=str(out),
        guard_checks=guard_checks,
        binding_overrides=binding_overrides,
    )
    return load_emitted(str(out), name).ENTRY_POINTS


# ── 1. corpus health ────────────────────────────────────────────────────


def test_c01_corpus_health():
    t0 = time.perf_counter()
    entries = load_corpus()
    units, problems = [], []
    for entry in entries:
        unit, diags = parse(entry.path.read_text(), str(entry.path))
        problems += [d.render() for d in diags]
        units.append(unit)
    env, env_diags = ModuleEnv.from_units(units)
    problems += [d.render() for d in env_diags]

    dumps = {}
    checked = 0
    for entry in entries:
        text = ""
        for name in entry.module_names:
            flat = flatten(env, name)
            _, diags = check_module(flat)
            problems += [d.render() for d in diags]
            text += dump_flat(flat)
            checked += 1
        dumps[entry.path.stem] = text
    for sat in env.satisfactions():
        problems += [d.render() for d in check_satisfaction(sat, env)]
    elapsed = time.perf_counter() - t0

    stale = [
        stem
        for stem, text in sorted(dumps.items())
        if (GOLDEN_DIR / "flatten" / f"{stem}.txt").read_text() != text
    ]
    problems += [f"flatten dump differs from golden/{s}.txt" for s in stale]
    if elapsed >= 5.0:
        problems.append(f"corpus pipeline took {elapsed:.2f}s (budget 5s)")
    _criterion(
        1,
        "corpus health",
        not problems,
        "; ".join(problems)
        or f"{len(entries)} files, {checked} modules, "
        f"{len(env.satisfactions())} satisfactions clean in {elapsed:.2f}s, "
        f"{len(dumps)} golden dumps byte-identical",
    )


# ── 2. flattening facts ─────────────────────────────────────────────────


def test_c02_flattening_facts():
    env = corpus_env()
    ex = flatten(env, "ExampleProgram")
    st = flatten(env, "Stack")
    problems = []
    if sorted(ex.types) != ["int"]:
        problems.append(f"ExampleProgram types {sorted(ex.types)}")
    if sorted(ex.op_names()) != ["add", "mul", "timesThree", "timesThreeUpdateRef"]:
        problems.append(f"ExampleProgram ops {sorted(ex.op_names())}")
    unbodied = sorted(
        op.name for op in ex.ops.values() if op.body is None and op.binding is None
    )
    if unbodied:
        problems.append(f"ops without body or binding: {unbodied}")
    if sorted(op.name for op in st.ops.values()) != ["empty", "isEmpty", "pop", "push", "top"]:
        problems.append(f"Stack ops {sorted(op.name for op in st.ops.values())}")
    if sorted(a.name for a in st.axioms) != ["emptyIsEmpty", "pushPopTopBehavior"]:
        problems.append(f"Stack axioms {sorted(a.name for a in st.axioms)}")
    _criterion(
        2,
        "flattening facts",
        not problems,
        "; ".join(problems)
        or "ExampleProgram = {int; add, mul, timesThree, timesThreeUpdateRef}; "
        "Stack = 5 ops, 2 axioms",
    )


# ── 3. satisfaction checking ────────────────────────────────────────────

CHECKED_SATISFACTIONS = [
    # the two program-models-concept declarations over the semigroup pair
    "ExampleProgramHasAddSemigroup",
    "ExampleProgramHasMulSemigroup",
    # the two concept-models-concept declarations (each absorption concept
    # models the other), plus the container/search pair for good measure
    "CommutativeZeroLR",
    "CommutativeZeroRL",
    "BFSDiscoveryHasFIFOQueue",
    "DFSDiscoveryHasStack",
]


def test_c03_satisfaction_checking():
    env = corpus_env()
    problems = []
    for name in CHECKED_SATISFACTIONS:
        diags = check_satisfaction(env.modules[name], env)
        if diags:
            problems.append(f"{name}: {[d.render() for d in diags]}")

    # Dropping the semigroup model from the program must break the
    # satisfaction by exactly the missing provisions: the operation the
    # concept maps onto ('add') and the type it maps onto ('int').
    mutated = _edited_env("semigroup.mg", "use PyConcreteSemigroup;\n\n    ", "")
    diags = check_satisfaction(mutated.modules["ExampleProgramHasAddSemigroup"], mutated)
    codes = sorted(d.code for d in diags)
    if codes != ["MissingOperation", "MissingType"]:
        problems.append(f"mutated satisfaction codes {codes}")
    if not any(d.code == "MissingOperation" and "'add'" in d.message for d in diags):
        problems.append("MissingOperation does not name 'add'")
    _criterion(
        3,
        "satisfaction checking",
        not problems,
        "; ".join(problems)
        or f"{len(CHECKED_SATISFACTIONS)} satisfactions pass; removing the model "
        "yields exactly MissingOperation('add') + MissingType('int')",
    )


# ── 4. renaming laws ────────────────────────────────────────────────────


def test_c04_renaming_laws():
    env = corpus_env()
    modules = sorted(n for n, m in env.modules.items() if m.kind != "satisfaction")
    rng = random.Random(2026)
    cases = 0
    failures = []

    for name in modules:
        flat = flatten(env, name)
        key = flat.structural_key()
        pool = sorted(flat.all_names())
        if len(pool) < 2:
            continue
        for _ in range(10):
            # identity: self-renaming changes nothing
            picked = rng.sample(pool, min(3, len(pool)))
            ident = Renaming(pairs=tuple((n, n) for n in picked))
            cases += 1
            if apply_renaming(flat, ident).structural_key() != key:
                failures.append(f"{name}: identity {picked}")

            # composition: renaming twice equals renaming once by the
            # composite map (targets kept fresh so no capture occurs)
            src1 = rng.sample(pool, rng.randint(1, min(4, len(pool))))
            r1 = Renaming(pairs=tuple((s, f"zz{i}_a") for i, s in enumerate(src1)))
            mid_pool = sorted((set(pool) - set(src1)) | {t for _, t in r1.pairs})
            src2 = rng.sample(mid_pool, rng.randint(1, min(4, len(mid_pool))))
            r2 = Renaming(pairs=tuple((s, f"zz{i}_b") for i, s in enumerate(src2)))
            two_step = apply_renaming(apply_renaming(flat, r1), r2)
            m2 = dict(r2.pairs)
            composed = {x: m2.get(y, y) for x, y in r1.pairs}
            r1_targets = {y for _, y in r1.pairs}
            for x, y in r2.pairs:
                if x not in composed and x not in r1_targets:
                    composed[x] = y
            one_step = apply_renaming(flat, Renaming(pairs=tuple(sorted(composed.items()))))
            cases += 1
            if one_step.structural_key() != two_step.structural_key():
                failures.append(f"{name}: composition {r1.pairs} then {r2.pairs}")

            # swap involution: exchanging two names twice is the identity
            a, b = rng.sample(pool, 2)
            swap = Renaming(pairs=((a, b), (b, a)))
            cases += 1
            if apply_renaming(apply_renaming(flat, swap), swap).structural_key() != key:
                failures.append(f"{name}: swap {a}<->{b}")

    problems = failures[:5]
    if cases < 1000:
        problems.append(f"only {cases} cases generated (need >= 1000)")
    _criterion(
        4,
        "renaming laws",
        not problems,
        "; ".join(problems)
        or f"{cases} identity/composition/swap cases over {len(modules)} modules, 0 failures",
    )


# ── 5. mode discipline ──────────────────────────────────────────────────

_AMBIGUOUS_OVERLOAD = """predicate positive(s: int, c: int) {
        value lt(c, s);
    }

    function flag(s: int, c: int): int {
        value s;
    }

    predicate flag(s: int, c: int) {
        value lt(c, s);
    }

    function probe(s: int, c: int): int {
        var x = flag(c, s);
        value s;
    }"""

# (file, anchor text, single-edit replacement, module to check, expected code)
MODE_MUTANTS = [
    ("countdown.mg", "s = sub(s, one());", "c = sub(s, one());",
     "Countdown", "WriteToObs"),
    ("bfs_utils.mg",
     "require procedure outEdges(obs u: VertexDescriptor, obs g: Graph, out itr: EdgeIterator);",
     "procedure outEdges(obs u: VertexDescriptor, obs g: Graph, out itr: EdgeIterator) {}",
     "GenericBFSUtils", "OutNotAssigned"),
    ("countdown.mg", "value state;",
     "if positive(state, floor) then {\n            value state;\n        }",
     "Countdown", "MissingValueOnPath"),
    ("countdown.mg", "predicate positive(s: int, c: int) {\n        value lt(c, s);\n    }",
     _AMBIGUOUS_OVERLOAD, "Countdown", "AmbiguousReturnOverload"),
    ("bfs_utils.mg", "call outEdges(u, g, edgeItr);",
     "call bfsInnerLoopRepeat(edgeItr, x, q, c, g, u);",
     "GenericBFSUtils", "ReadBeforeAssign"),
    ("dijkstra.mg", "call popHeap(pq);", "u = distances(pq);",
     "DijkstraUtils", "TypeMismatch"),
    ("bfs_utils.mg", "call bfsOuterLoopRepeat(a, q, c, g);", "value a;",
     "GenericBFSUtils", "ValueInProcedure"),
    ("semigroup.mg", "i = add(add(i, i), i);", "i = add(plus(i, i), i);",
     "ExampleProgram", "NoSuchOperation"),
    ("countdown.mg", "call countdownLoop(state, floor);", "call countdownLoop(state);",
     "Countdown", "ArityMismatch"),
    ("containers.mg", "assert front(mut_q) == front(q);", "assert front(mut_q) == q;",
     "FIFOQueue", "EqualityTypeMismatch"),
    ("dijkstra.mg",
     "require function frontHeap(pq: PriorityQueue): VertexDescriptor guard !isEmptyHeap(pq);",
     "require function frontHeap(pq: PriorityQueue): VertexDescriptor guard !isEmptyHeap(qq);",
     "DijkstraUtils", "GuardReferencesNonParameter"),
]


def test_c05_mode_discipline():
    problems = []
    for fname, old, new, module, expected in MODE_MUTANTS:
        env = _edited_env(fname, old, new)
        _, diags = check_module(flatten(env, module))
        codes = [d.code for d in _errors(diags)]
        if codes != [expected]:
            problems.append(f"{fname}/{module}: wanted [{expected}], got {codes}")
    _criterion(
        5,
        "mode discipline",
        not problems and len(MODE_MUTANTS) >= 10,
        "; ".join(problems)
        or f"{len(MODE_MUTANTS)} single-edit mutants each yield exactly the designated diagnostic",
    )


# ── 6. interpreter equivalence ──────────────────────────────────────────

GRAPH_PROGRAMS = [
    ("BFSDiscovery", "bfsDiscoveryOrder"),
    ("DFSDiscovery", "dfsVisitOrder"),
    ("Dijkstra", "dijkstra"),
]
FIXTURES = ["diamondless.txt", "weighted_triangle.txt"]


def test_c06_interpreter_equivalence(tmp_path):
    mismatches = []
    runs = 0

    for program, entry in GRAPH_PROGRAMS:
        emitted = _emitted_entries(program, tmp_path)[entry]
        interp = Interpreter(checked_module(program))
        for fixture in FIXTURES:
            g = graph_impl.makeGraph(fixture_text(fixture))
            for start in range(g.n):
                runs += 1
                got = emitted(g, start)
                want = interp.call_named(entry, [g, start])
                if got != want:
                    mismatches.append(f"{program} {fixture} start={start}")

    countdown = _emitted_entries("Countdown", tmp_path)["stepDownTo"]
    interp = Interpreter(checked_module("Countdown"))
    for s in range(-6, 7):
        for floor in range(-6, 7):
            runs += 1
            if countdown(s, floor) != interp.call_named("stepDownTo", [s, floor]):
                mismatches.append(f"Countdown stepDownTo({s}, {floor})")

    example = _emitted_entries("ExampleProgram", tmp_path)
    interp = Interpreter(checked_module("ExampleProgram"))
    for i in range(-8, 9):
        runs += 2
        if example["timesThree"](i) != interp.call_named("timesThree", [i]):
            mismatches.append(f"timesThree({i})")
        if example["timesThreeUpdateRef"](i) != interp.call_named("timesThreeUpdateRef", [i]):
            mismatches.append(f"timesThreeUpdateRef({i})")
    for a in range(-4, 5):
        for b in range(-4, 5):
            runs += 2
            if example["add"](a, b) != interp.call_named("add", [a, b]):
                mismatches.append(f"add({a}, {b})")
            if example["mul"](a, b) != interp.call_named("mul", [a, b]):
                mismatches.append(f"mul({a}, {b})")

    _criterion(
        6,
        "interpreter equivalence",
        not mismatches,
        "; ".join(mismatches[:5])
        or f"emitted code and reference interpreter agree on {runs} runs "
        "across all 5 programs",
    )


# ── 7. transpile speed ──────────────────────────────────────────────────


def test_c07_transpile_speed(tmp_path):
    t0 = time.perf_counter()
    env = _fresh_env()
    programs = sorted(n for n, m in env.modules.items() if m.kind == "program")
    for name in programs:
        checked, diags = check_module(flatten(env, name))
        assert not _errors(diags), [d.render() for d in diags]
        transpile(checked, out_dir=str(tmp_path / name))
    elapsed = time.perf_counter() - t0
    _criterion(
        7,
        "transpile speed",
        elapsed < 2.0,
        f"parse+check+emit of {len(programs)} programs took {elapsed:.3f}s "
        "(target 1s, tolerance 2s)",
    )


# ── 8. axiom oracle suites and the mutation suite ───────────────────────


def test_c08_axiom_oracle_suites(tmp_path):
    problems = []
    oracle_count = 0
    for name in EXECUTABLE_SATISFACTIONS:
        report = report_for(name, budget=5000, seed=0)
        for r in report.records:
            oracle_count += 1
            if r["failed"] or r["status"] != "pass":
                problems.append(f"{name}/{r['name']}: status {r['status']}, {r['failed']} fails")
            if r["attempted"] and r["discarded"] / r["attempted"] >= 0.9:
                problems.append(f"{name}/{r['name']}: discard ratio too high")

    # every wrong host in the mutation suite flips at least one oracle:
    # the five container/algebra/loop mutants flip a designated axiom
    # oracle, the three traversal mutants flip an algorithm oracle.
    for sat_name, overrides, expected_failures in MUTANTS:
        report = report_for(sat_name, binding_overrides=overrides)
        failed = {r["name"] for r in report.records if r["status"] == "fail"}
        if failed != expected_failures:
            problems.append(f"{sat_name} mutant flipped {sorted(failed)}")
        for r in report.records:
            if r["name"] in expected_failures and r["witness"] is None:
                problems.append(f"{sat_name}/{r['name']}: no witness recorded")

    diamondless = graph_impl.makeGraph(fixture_text("diamondless.txt"))
    bfs_mut = _emitted_entries(
        "BFSDiscovery",
        tmp_path,
        binding_overrides={("lib.graph_impl", "tgt"): ("lib.mutants", "tgt_returns_src")},
    )["bfsDiscoveryOrder"]
    if list(bfs_mut(diamondless, 0)) == textbook.bfs_discovery_order(
        4, [(0, 1), (0, 2), (1, 3)], 0
    ):
        problems.append("tgt_returns_src mutant not caught by the traversal oracle")

    triangle = graph_impl.makeGraph(fixture_text("weighted_triangle.txt"))
    dij_front = _emitted_entries(
        "Dijkstra",
        tmp_path,
        binding_overrides={("lib.pqueue_impl", "frontHeap"): ("lib.mutants", "pqueue_front_max")},
    )["dijkstra"]
    if dict(dij_front(triangle, 0)) == {0: 0, 1: 3, 2: 1}:
        problems.append("pqueue_front_max mutant not caught by the distance oracle")

    n, wedges, start = textbook.random_digraph(0, weighted=True)
    dij_pop = _emitted_entries(
        "Dijkstra",
        tmp_path,
        binding_overrides={("lib.pqueue_impl", "popHeap"): ("lib.mutants", "pqueue_pop_max")},
    )["dijkstra"]
    if dict(dij_pop(graph_impl.Graph(n, wedges), start)) == textbook.dijkstra_distances(
        n, wedges, start
    ):
        problems.append("pqueue_pop_max mutant not caught by the distance oracle")

    _criterion(
        8,
        "axiom oracle suites",
        not problems,
        "; ".join(problems[:6])
        or f"{oracle_count} oracles green over {len(EXECUTABLE_SATISFACTIONS)} suites "
        f"(budget 5000); all 8 wrong-host mutants flip an oracle",
    )


# ── 9. algorithm oracles ────────────────────────────────────────────────


def test_c09_algorithm_oracles(tmp_path):
    bfs = _emitted_entries("BFSDiscovery", tmp_path)["bfsDiscoveryOrder"]
    dfs = _emitted_entries("DFSDiscovery", tmp_path)["dfsVisitOrder"]
    dij = _emitted_entries("Dijkstra", tmp_path)["dijkstra"]

    mismatches = []
    for seed in range(100):
        n, edges, start = textbook.random_digraph(seed)
        g = graph_impl.Graph(n, [(u, v, 1) for u, v in edges])
        if list(bfs(g, start)) != textbook.bfs_discovery_order(n, edges, start):
            mismatches.append(f"bfs seed {seed}")
        if list(dfs(g, start)) != textbook.dfs_visit_order(n, edges, start):
            mismatches.append(f"dfs seed {seed}")

        wn, wedges, wstart = textbook.random_digraph(seed, weighted=True)
        wg = graph_impl.Graph(wn, wedges)
        if dict(dij(wg, wstart)) != textbook.dijkstra_distances(wn, wedges, wstart):
            mismatches.append(f"dijkstra seed {seed}")

    _criterion(
        9,
        "algorithm oracles",
        not mismatches,
        "; ".join(mismatches[:5])
        or "BFS order, DFS order and Dijkstra distances match the textbook "
        "oracles on 100 seeded digraphs (300 comparisons)",
    )


# ── 10. cost of abstraction ─────────────────────────────────────────────

BENCH_VERTICES = 10_000
BENCH_EDGES = 50_000
BENCH_SEED = 0
BENCH_THRESHOLD = 3.0


def _bench_graph():
    rng = random.Random(BENCH_SEED)
    edges = set()
    order = list(range(BENCH_VERTICES))
    rng.shuffle(order)
    for a, b in zip(order, order[1:]):  # spanning chain, so BFS touches everything
        edges.add((a, b))
    while len(edges) < BENCH_EDGES:
        u = rng.randrange(BENCH_VERTICES)
        v = rng.randrange(BENCH_VERTICES)
        if u != v:
            edges.add((u, v))
    edge_list = sorted(edges)
    return graph_impl.Graph(BENCH_VERTICES, [(u, v, 1) for u, v in edge_list]), edge_list[0][0]


def _hand_hostlib_bfs(g, s):
    """Hand-written glue over the same host operations the program binds."""
    from lib import colormap_impl, queue_impl, visit_impl

    (vit,) = graph_impl.vertices(g)
    c = colormap_impl.initMap(vit, colormap_impl.white())
    a = visit_impl.emptyVertexList()
    q = queue_impl.empty()
    (a,) = visit_impl.appendVertex(s, a)
    (q,) = queue_impl.push(s, q)
    (c,) = colormap_impl.put(c, s, colormap_impl.gray())
    white = colormap_impl.white()
    while not queue_impl.isEmpty(q):
        u = queue_impl.front(q)
        (q,) = queue_impl.pop(q)
        (it,) = graph_impl.outEdges(u, g)
        while not graph_impl.edgeIterEnd(it):
            e = graph_impl.edgeIterUnpack(it)
            v = graph_impl.tgt(e, g)
            if colormap_impl.eq_Color(colormap_impl.get(c, v), white):
                (a,) = visit_impl.appendVertex(v, a)
                (q,) = queue_impl.push(v, q)
                (c,) = colormap_impl.put(c, v, colormap_impl.gray())
            (it,) = graph_impl.edgeIterNext(it)
        (c,) = colormap_impl.put(c, u, colormap_impl.black())
    return a


def _hand_raw_bfs(g, start):
    """Idiomatic host BFS reading the graph's fields directly."""
    edges = g.edges
    seen = [False] * g.n
    seen[start] = True
    out = [start]
    q = deque([start])
    while q:
        u = q.popleft()
        for e in g.out[u]:
            v = edges[e][1]
            if not seen[v]:
                seen[v] = True
                out.append(v)
                q.append(v)
    return out


def _best_of(fn, g, start, reps=5):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(g, start)
        best = min(best, time.perf_counter() - t0)
    return best


def test_c10_cost_of_abstraction(tmp_path):
    g, start = _bench_graph()
    emitted = _emitted_entries("BFSDiscovery", tmp_path, guard_checks=False)[
        "bfsDiscoveryOrder"
    ]
    assert list(emitted(g, start)) == list(_hand_hostlib_bfs(g, start)) == _hand_raw_bfs(
        g, start
    ), "benchmark functions disagree on the traversal"

    t_emit = _best_of(emitted, g, start)
    t_lib = _best_of(_hand_hostlib_bfs, g, start)
    t_raw = _best_of(_hand_raw_bfs, g, start)
    ratio = t_emit / t_lib
    _criterion(
        10,
        "cost of abstraction",
        ratio <= BENCH_THRESHOLD,
        f"emitted {t_emit * 1000:.1f}ms vs hand-written host-op BFS "
        f"{t_lib * 1000:.1f}ms -> {ratio:.2f}x (threshold {BENCH_THRESHOLD}x) on "
        f"{BENCH_VERTICES} vertices / {BENCH_EDGES} edges, guards off; "
        f"raw idiomatic BFS {t_raw * 1000:.1f}ms -> {t_emit / t_raw:.2f}x, reported "
        "for scale: that gap is the per-call host boundary, present identically "
        "in the hand-written host-op version",
    )
