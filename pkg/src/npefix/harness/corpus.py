"""Corpus manifest loading and integrity checking.

A corpus case is a MiniJ program with a pinned expected behavior: either a
normal run with exact stdout, or a crash with a named exception type. A
case path is a single ``.mj`` file (fully instrumented when repairing) or a
directory with an ``app/`` subdirectory (instrumented) and a ``main/`` or
``tests/`` subdirectory (left uninstrumented, like test code).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CorpusError
from ..minij import combine, parse
from ..minij.ast import ProgramAst
from ..runtime import prepare, run_prepared
from ..runtime.interpreter import ExecutionResult


@dataclass
class CorpusCase:
    name: str
    path: Path
    entry: str | None = None
    expect_kind: str = "crash"  # "crash" | "output"
    expect_exception: str | None = "NullPointerException"
    expect_stdout: str = ""
    tags: list[str] = field(default_factory=list)

    def load_units(self) -> tuple[list[ProgramAst], list[ProgramAst]]:
        """(application units, driver units); drivers stay uninstrumented."""
        if self.path.is_file():
            return [parse_file(self.path)], []
        app_files = sorted((self.path / "app").glob("*.mj"))
        driver_files: list[Path] = []
        for sub in ("main", "tests"):
            if (self.path / sub).is_dir():
                driver_files += sorted((self.path / sub).glob("*.mj"))
        if not app_files:
            raise CorpusError(f"case '{self.name}': no app/*.mj under {self.path}")
        return ([parse_file(p) for p in app_files],
                [parse_file(p) for p in driver_files])


def parse_file(path: Path) -> ProgramAst:
    return parse(path.read_text(encoding="utf-8"), str(path))


@dataclass
class Corpus:
    name: str
    root: Path
    cases: list[CorpusCase]

    def case(self, name: str) -> CorpusCase:
        for c in self.cases:
            if c.name == name:
                return c
        raise CorpusError(f"no case named '{name}'")


def load_manifest(manifest_path: str | Path) -> Corpus:
    manifest_path = Path(manifest_path)
    data = json.loads(manifest_path.read_text(encoding="utf-8"))
    root = manifest_path.parent
    cases = []
    for entry in data["cases"]:
        expect = entry.get("expect", {})
        kind = expect.get("kind", "crash")
        cases.append(CorpusCase(
            name=entry["name"],
            path=root / entry["path"],
            entry=entry.get("entry"),
            expect_kind=kind,
            expect_exception=expect.get("exception", "NullPointerException")
            if kind == "crash" else None,
            expect_stdout=expect.get("stdout", ""),
            tags=entry.get("tags", []),
        ))
    return Corpus(name=data.get("corpus", manifest_path.stem), root=root,
                  cases=cases)


def run_uninstrumented(case: CorpusCase) -> ExecutionResult:
    app, drivers = case.load_units()
    prepared = prepare([combine(*app, *drivers)], entry=case.entry)
    return run_prepared(prepared)


def check_case_integrity(case: CorpusCase) -> ExecutionResult:
    """Every case must reproduce its expected behavior uninstrumented."""
    result = run_uninstrumented(case)
    if case.expect_kind == "crash":
        if result.status != case.expect_exception:
            raise CorpusError(
                f"case '{case.name}' expected to crash with "
                f"{case.expect_exception}, got {result.status}")
    else:
        if result.status != "normal":
            raise CorpusError(
                f"case '{case.name}' expected to run normally, crashed with "
                f"{result.status}")
        if result.stdout != case.expect_stdout:
            raise CorpusError(
                f"case '{case.name}' stdout mismatch:\n"
                f"expected: {case.expect_stdout!r}\n"
                f"actual:   {result.stdout!r}")
    return result
