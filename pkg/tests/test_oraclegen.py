"""Axiom-to-oracle compilation: generation, the runner's accounting,
mutation detection, and agreement between the reference runner and the
emitted standalone harness."""

import json

import pytest
from conftest import _errors, corpus_env

from mglite.codegen import emit_oracle_harness, load_emitted, transpile
from mglite.diagnostics import CompileError
from mglite.modsys import ModuleEnv
from mglite.oraclegen import (
    default_generators,
    generate_oracles,
    list_axioms,
    run_oracles,
)
from mglite.parser import parse

EXECUTABLE_SATISFACTIONS = [
    "BFSDiscoveryHasFIFOQueue",
    "CountdownModelsWhileLoop",
    "DFSDiscoveryHasStack",
    "ExampleProgramHasAddSemigroup",
    "ExampleProgramHasMulSemigroup",
]


def oracles_for(name, env=None):
    env = env or corpus_env()
    sat = env.modules[name]
    oracles, checked, diags = generate_oracles(sat, env)
    assert not _errors(diags), [d.render() for d in diags]
    return oracles, checked


def report_for(name, budget=5000, seed=0, binding_overrides=None, env=None):
    oracles, checked = oracles_for(name, env)
    return run_oracles(
        oracles,
        default_generators(checked.flat),
        budget=budget,
        seed=seed,
        checked=checked,
        binding_overrides=binding_overrides,
    )


# ---------------------------------------------------------------------------
# generation


def test_list_axioms_facts():
    env = corpus_env()
    assert list_axioms("Semigroup", env) == [("bopIsAssociative", ("T", "T", "T"))]
    assert list_axioms("Magma", env) == []
    stack = dict(list_axioms("Stack", env))
    assert stack == {"pushPopTopBehavior": ("Stack", "A"), "emptyIsEmpty": ()}
    queue = dict(list_axioms("FIFOQueue", env))
    assert set(queue) == {
        "emptyIsEmpty",
        "pushedIsNotEmpty",
        "frontOfSingleton",
        "pushKeepsFront",
        "pushPopCommute",
    }


def test_semigroup_oracle_is_lowered_against_the_program():
    oracles, checked = oracles_for("ExampleProgramHasAddSemigroup")
    assert [o.name for o in oracles] == ["bopIsAssociative"]
    oracle = oracles[0]
    assert oracle.param_types == ("int", "int", "int")
    assert oracle.concept == "Semigroup"
    assert oracle.source_satisfaction == "ExampleProgramHasAddSemigroup"
    assert checked.flat.name == "ExampleProgram"


def test_non_program_target_is_not_executable():
    env = corpus_env()
    for name in ("CommutativeZeroLR", "CommutativeZeroRL"):
        oracles, checked, diags = generate_oracles(env.modules[name], env)
        assert oracles == []
        assert "TargetNotExecutable" in [d.code for d in diags]


# ---------------------------------------------------------------------------
# the runner


def test_add_semigroup_runs_exhaustively():
    report = report_for("ExampleProgramHasAddSemigroup")
    (record,) = report.records
    # 17^3 int triples fit the budget, so the domain is swept exactly once
    assert record["name"] == "bopIsAssociative"
    assert record["status"] == "pass"
    assert record["attempted"] == 17**3 == 4913
    assert record["passed"] == 4913
    assert record["failed"] == record["discarded"] == 0
    assert report.ok


def test_fifo_queue_oracle_accounting():
    report = report_for("BFSDiscoveryHasFIFOQueue")
    by_name = {r["name"]: r for r in report.records}
    # queues of vertices: 15 containers x 17 vertex values, exhaustively
    assert by_name["emptyIsEmpty"]["attempted"] == 1
    assert by_name["frontOfSingleton"]["attempted"] == 17
    for two_param in ("pushedIsNotEmpty", "pushKeepsFront", "pushPopCommute"):
        assert by_name[two_param]["attempted"] == 15 * 17 == 255
    for record in report.records:
        assert record["status"] == "pass"
        assert record["attempted"] == (
            record["passed"] + record["failed"] + record["discarded"]
        )
    assert report.ok


@pytest.mark.parametrize("name", EXECUTABLE_SATISFACTIONS)
def test_every_executable_satisfaction_is_green(name):
    report = report_for(name)
    assert report.ok, report.render_text()
    assert all(r["status"] == "pass" for r in report.records)


def test_runner_is_deterministic():
    first = report_for("DFSDiscoveryHasStack", seed=7)
    second = report_for("DFSDiscoveryHasStack", seed=7)
    assert first.records == second.records


def test_missing_generator_is_a_compile_error():
    oracles, checked = oracles_for("ExampleProgramHasAddSemigroup")
    with pytest.raises(CompileError, match="MissingGenerator"):
        run_oracles(oracles, {}, checked=checked)


def test_report_text_and_json_roundtrip():
    report = report_for("ExampleProgramHasMulSemigroup")
    text = report.render_text()
    assert "oracle bopIsAssociative: PASS" in text
    assert text.strip().endswith("OK")
    payload = json.loads(report.to_json())
    assert payload["ok"] is True
    assert payload["program"] == "ExampleProgram"
    assert payload["oracles"][0]["name"] == "bopIsAssociative"


# ---------------------------------------------------------------------------
# guard-aware discarding

FUSSY_SOURCE = """
implementation Ints = external Python lib.int_impl {
    type int;
    function zero(): int;
    function one(): int;
    function add(a: int, b: int): int;
    predicate isZero(a: int);
}

concept Fussy = {
    type T;
    function pick(a: T): T;
    axiom pickIsIdentity(a: T) {
        assert pick(a) == a;
    }
}

program FussyProgram = {
    use Ints;
    function pick(a: int): int guard isZero(add(a, one())) {
        value a;
    }
}

satisfaction FussyHolds = FussyProgram models Fussy[ T => int ];
"""


def test_heavy_discarding_turns_inconclusive():
    unit, diags = parse(FUSSY_SOURCE, "<fussy>")
    assert not _errors(diags)
    env, diags = ModuleEnv.from_units([unit])
    assert not _errors(diags)
    report = report_for("FussyHolds", env=env)
    (record,) = report.records
    # pick's guard admits only a == -1, so 16 of the 17 ints are discarded
    assert record["attempted"] == 17
    assert record["discarded"] == 16
    assert record["passed"] == 1
    assert record["status"] == "inconclusive"
    assert not report.ok


# ---------------------------------------------------------------------------
# mutation detection

MUTANTS = [
    (
        "ExampleProgramHasAddSemigroup",
        {("lib.int_impl", "add"): ("lib.mutants", "add_subtracts")},
        {"bopIsAssociative"},
    ),
    (
        "BFSDiscoveryHasFIFOQueue",
        {("lib.queue_impl", "front"): ("lib.mutants", "queue_front_newest")},
        {"pushKeepsFront"},
    ),
    (
        "BFSDiscoveryHasFIFOQueue",
        {("lib.queue_impl", "pop"): ("lib.mutants", "queue_pop_newest")},
        {"pushPopCommute"},
    ),
    (
        "DFSDiscoveryHasStack",
        {("lib.stack_impl", "pop"): ("lib.mutants", "stack_pop_bottom")},
        {"pushPopTopBehavior"},
    ),
    (
        "CountdownModelsWhileLoop",
        {("lib.loop_impl", "repeat"): ("lib.mutants", "while_extra_step")},
        {"whileLoopBehavior"},
    ),
]


@pytest.mark.parametrize("sat_name,overrides,expected_failures", MUTANTS)
def test_mutant_flips_exactly_the_guilty_oracle(sat_name, overrides, expected_failures):
    report = report_for(sat_name, binding_overrides=overrides)
    failed = {r["name"] for r in report.records if r["status"] == "fail"}
    assert failed == expected_failures, report.render_text()
    for record in report.records:
        if record["name"] in expected_failures:
            assert record["witness"] is not None, "failure must carry a witness"


def test_subtraction_mutant_witness_is_a_non_associative_triple():
    report = report_for(
        "ExampleProgramHasAddSemigroup",
        binding_overrides={("lib.int_impl", "add"): ("lib.mutants", "add_subtracts")},
    )
    (record,) = report.records
    assert record["status"] == "fail"
    a, b, c = record["witness"]
    assert (a - b) - c != a - (b - c)
    # subtraction is associative exactly when c == 0: 17^2 of 17^3 triples
    assert record["passed"] == 17**2 == 289
    assert record["failed"] == 17**3 - 17**2


# ---------------------------------------------------------------------------
# the emitted harness is the same oracle suite


@pytest.mark.parametrize("name", EXECUTABLE_SATISFACTIONS)
def test_emitted_harness_matches_reference_runner(name, tmp_path):
    oracles, checked = oracles_for(name)
    generators = default_generators(checked.flat)
    reference = run_oracles(oracles, generators, checked=checked)

    transpile(checked, out_dir=tmp_path)
    emit_oracle_harness(oracles, checked, out_dir=tmp_path)
    harness = load_emitted(tmp_path, f"{checked.flat.name}_oracles")
    records = harness.run_all(budget=5000, seed=0)

    assert records == reference.records
