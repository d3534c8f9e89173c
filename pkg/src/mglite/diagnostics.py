"""Source spans and diagnostics shared by every compiler stage."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Half-open region of one source file; lines and columns are 1-based."""

    path: str
    line: int
    col: int
    end_line: int
    end_col: int

    def merge(self, other: "Span") -> "Span":
        a, b = (self, other) if (self.line, self.col) <= (other.line, other.col) else (other, self)
        return Span(self.path, a.line, a.col, b.end_line, b.end_col)

    def __str__(self) -> str:
        return f"{self.path}:{self.line}:{self.col}"


@dataclass
class Diagnostic:
    """One reported problem.  `code` is a stable machine-readable name."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    span: Span | None = None

    def render(self) -> str:
        where = str(self.span) if self.span is not None else "<unknown>"
        return f"{where}: {self.severity}: {self.code}: {self.message}"


class CompileError(Exception):
    """Raised by stages that cannot return a diagnostics list directly.

    Accepts either a diagnostics list or a bare message; a message of the
    form "SomeCode: detail" keeps SomeCode as the machine-readable code."""

    def __init__(self, problem: "str | list[Diagnostic]"):
        if isinstance(problem, str):
            code, _, rest = problem.partition(": ")
            if rest and code.isidentifier():
                problem = [error(code, rest)]
            else:
                problem = [error("CompileError", problem)]
        self.diagnostics = problem
        super().__init__("; ".join(d.render() for d in problem))


def error(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic("error", code, message, span)


def warning(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic("warning", code, message, span)


def sort_key(d: Diagnostic):
    s = d.span
    return (s.path if s else "", s.line if s else 0, s.col if s else 0, d.code, d.message)


@dataclass
class DiagnosticSink:
    """Accumulates diagnostics; stages share one sink per run."""

    items: list[Diagnostic] = field(default_factory=list)

    def add(self, diag: Diagnostic) -> None:
        self.items.append(diag)

    def extend(self, diags: list[Diagnostic]) -> None:
        self.items.extend(diags)

    @property
    def has_errors(self) -> bool:
        return any(d.severity == "error" for d in self.items)

    def sorted(self) -> list[Diagnostic]:
        return sorted(self.items, key=sort_key)
