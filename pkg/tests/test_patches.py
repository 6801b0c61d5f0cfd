"""Patch suggestion rendering and applicability."""

from __future__ import annotations

from pathlib import Path

import pytest

from npefix.minij import parse, parse_stmt, typecheck
from npefix.minij.ast import SourceUnit
from npefix.runtime import (
    Strategy, apply_patch, make_controller, prepare, prepare_split,
    run_prepared, suggest_patch,
)

from conftest import CORPUS


def first_crash_point(text: str, path: str) -> str:
    prepared = prepare_split([parse(text, path)], [])
    controller = make_controller("fixed", strategy=Strategy("S4d"),
                                 site_types=prepared.site_types)
    result = run_prepared(prepared, controller)
    return next(ev.crash_point for ev in result.events if ev.event == "crash")


def suggestion_for(case_file: str, strategy: Strategy):
    path = CORPUS / "crashing" / case_file
    text = path.read_text()
    key = first_crash_point(text, str(path))
    program = parse(text, str(path))
    table = typecheck(program)
    return SourceUnit(str(path), text), suggest_patch(program, key, strategy, table)


def patched_passes(unit: SourceUnit, suggestion) -> bool:
    patched = apply_patch(unit, suggestion)
    program = parse(patched)
    prepared = prepare([program])
    result = run_prepared(prepared)
    return result.succeeded


def test_s1b_patch_shape_and_effect():
    unit, suggestion = suggestion_for("c07_global_needed.mj",
                                      Strategy("S1b", "backup"))
    assert suggestion.placement == "before_stmt"
    assert "if (t == null)" in suggestion.snippet
    assert "t = backup;" in suggestion.snippet
    assert patched_passes(unit, suggestion)


def test_s1a_patch_uses_if_else_with_substituted_receiver():
    unit, suggestion = suggestion_for("c01_reuse_param.mj",
                                      Strategy("S1a", "fallback"))
    assert suggestion.placement == "replace_stmt"
    assert "else" in suggestion.snippet
    assert "fallback.tag()" in suggestion.snippet
    assert patched_passes(unit, suggestion)


def test_s2b_patch_renders_constructor_recipe():
    unit, suggestion = suggestion_for("c13_deep_manufacture.mj",
                                      Strategy("S2b", "Gear"))
    assert "new Gear(new Bolt())" in suggestion.snippet
    assert patched_passes(unit, suggestion)


def test_s3_patch_guards_statement():
    unit, suggestion = suggestion_for("c17_line_essential.mj", Strategy("S3"))
    assert suggestion.placement == "replace_stmt"
    assert suggestion.snippet.startswith("if (c != null)")
    assert patched_passes(unit, suggestion)


def test_s4d_patch_on_parameter_goes_to_method_entry():
    unit, suggestion = suggestion_for("c03_no_instance.mj", Strategy("S4d"))
    assert suggestion.placement == "method_entry"
    assert "return;" in suggestion.snippet
    assert patched_passes(unit, suggestion)


def test_s4d_patch_on_local_goes_before_statement():
    unit, suggestion = suggestion_for("c02_no_value.mj", Strategy("S4d"))
    assert suggestion.placement == "before_stmt"
    assert patched_passes(unit, suggestion)


def test_s4a_patch_returns_null_and_repairs_driver_case(corpus):
    from npefix.minij import combine
    case = corpus.case("c05_null_return")
    app, drivers = case.load_units()
    prepared = prepare_split(app, drivers)
    controller = make_controller("fixed", strategy=Strategy("S4b"),
                                 site_types=prepared.site_types)
    result = run_prepared(prepared, controller)
    key = next(ev.crash_point for ev in result.events if ev.event == "crash")

    combined = combine(*case.load_units()[0], *case.load_units()[1])
    table = typecheck(combined)
    suggestion = suggest_patch(combined, key, Strategy("S4b", "fallback"), table)
    # The null receiver is a local, so the guard sits just before the
    # crashing statement.
    assert suggestion.placement == "before_stmt"
    assert "return fallback;" in suggestion.snippet

    app_path = CORPUS / "crashing" / "c05_null_return" / "app" / "store.mj"
    unit = SourceUnit(str(app_path), app_path.read_text())
    patched = apply_patch(unit, suggestion)
    app2 = [parse(patched)]
    _, drivers2 = case.load_units()
    result2 = run_prepared(prepare([combine(*app2, *drivers2)]))
    assert result2.succeeded


@pytest.mark.parametrize("case_file,strategy", [
    ("c07_global_needed.mj", Strategy("S1b", "backup")),
    ("c17_line_essential.mj", Strategy("S3")),
    ("c02_no_value.mj", Strategy("S4d")),
    ("c01_reuse_param.mj", Strategy("S2a", "Helper")),
    ("c13_deep_manufacture.mj", Strategy("S2b", "Gear")),
])
def test_snippets_reparse_as_statements(case_file, strategy):
    _, suggestion = suggestion_for(case_file, strategy)
    parse_stmt(suggestion.snippet)


def test_patched_source_reparses_and_typechecks():
    unit, suggestion = suggestion_for("c07_global_needed.mj",
                                      Strategy("S1b", "backup"))
    patched = apply_patch(unit, suggestion)
    typecheck(parse(patched))
