import functools
import pathlib
import sys

from hypothesis import HealthCheck, settings

settings.register_profile(
    "mglite",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("mglite")

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS_DIR = ROOT / "corpus"
FIXTURE_DIR = CORPUS_DIR / "fixtures"
GOLDEN_DIR = ROOT / "golden"


def _errors(diags):
    return [d for d in diags if d.severity == "error"]


@functools.lru_cache(maxsize=None)
def corpus_env():
    """Parse every corpus source into one shared module environment."""
    from mglite.modsys import ModuleEnv
    from mglite.parser import parse

    units = []
    for path in sorted(CORPUS_DIR.glob("*.mg")):
        unit, diags = parse(path.read_text(), str(path))
        assert not _errors(diags), [d.render() for d in diags]
        units.append(unit)
    env, diags = ModuleEnv.from_units(units)
    assert not _errors(diags), [d.render() for d in diags]
    return env


@functools.lru_cache(maxsize=None)
def checked_module(name: str):
    """Flatten and type-check one corpus module; asserts it is clean."""
    from mglite.modsys import flatten
    from mglite.semantics import check_module

    flat = flatten(corpus_env(), name)
    cm, diags = check_module(flat)
    assert not _errors(diags), [d.render() for d in diags]
    return cm


def fixture_text(name: str) -> str:
    return (FIXTURE_DIR / name).read_text()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines where output capture cannot hide them."""
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "CRITERION_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.line(line)
