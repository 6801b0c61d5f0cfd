"""Null-check interception, injection semantics and force-return dispatch."""

from __future__ import annotations

import pytest

from npefix.runtime import Strategy, run


REUSE_PROBE = """
class B { void poke() { } }
class A {
    void main() {
        B a = null;
        B b = new B();
        a.poke();
        print(a == null);
    }
}
"""

NEW_PROBE = """
class B { void poke() { } }
class A {
    void main() {
        B a = null;
        a.poke();
        print(a == null);
    }
}
"""


def test_non_null_value_passes_through(output_cases):
    # Preservation spot check: an instrumented non-crashing program with a
    # strategy armed behaves identically because checkForNull is identity
    # on non-null receivers.
    src = ("class B { int g() { return 5; } } "
           "class A { void main() { B b = new B(); print(b.g()); } }")
    assert run(src, repair=Strategy("S1a")).stdout_lines == ["5"]


def test_anticipated_dereference_left_to_the_program():
    src = ("class B { int g() { return 5; } } "
           "class A { void main() { B b = null; "
           "try { print(b.g()); } catch (NullPointerException e) { print(\"np\"); } "
           "print(\"end\"); } }")
    result = run(src, repair=Strategy("S2a"))
    assert result.stdout_lines == ["np", "end"]
    assert not [ev for ev in result.events if ev.event == "try"]


@pytest.mark.parametrize("sid,still_null", [
    ("S1a", True), ("S1b", False), ("S2a", True), ("S2b", False),
])
def test_local_vs_global_injection(sid, still_null):
    src = REUSE_PROBE if sid in ("S1a", "S1b") else NEW_PROBE
    result = run(src, repair=Strategy(sid))
    assert result.status == "normal"
    assert result.stdout_lines == ["true" if still_null else "false"]


def test_global_injection_rebinds_for_subsequent_reads():
    # Spec probe: after global injection, a later dereference sees the
    # replacement without a second repair.
    src = """
class B { int g() { return 3; } }
class A {
    void main() {
        B a = null;
        B b = new B();
        print(a.g());
        print(a.g());
    }
}
"""
    result = run(src, repair=Strategy("S1b"))
    assert result.stdout_lines == ["3", "3"]
    assert len([ev for ev in result.events if ev.event == "try"]) == 1


def test_local_injection_repairs_again_on_reuse():
    src = """
class B { int g() { return 3; } }
class A {
    void main() {
        B a = null;
        B b = new B();
        print(a.g());
        print(a.g());
    }
}
"""
    result = run(src, repair=Strategy("S1a"))
    assert result.stdout_lines == ["3", "3"]
    crashes = [ev for ev in result.events if ev.event == "crash"]
    assert len(crashes) == 2  # the variable stayed null: intercepted twice


def test_no_value_available_crashes_with_npe():
    src = ("class B { void f() { } } "
           "class A { void main() { B b = null; b.f(); } }")
    result = run(src, repair=Strategy("S1a"))
    assert result.status == "NullPointerException"
    reasons = [ev.reason for ev in result.events if ev.event == "exhausted"]
    assert reasons == ["NoV"]


def test_global_injection_on_call_receiver_degrades_to_local():
    # A call result cannot be rebound: S2b applies the value locally.
    src = ("class I { int v() { return 2; } } "
           "class O { I inner() { return null; } } "
           "class A { void main() { O o = new O(); print(o.inner().v()); } }")
    result = run(src, repair=Strategy("S2b"))
    assert result.status == "normal"
    assert result.stdout_lines == ["2"]


def test_static_field_rebinding():
    src = ("class L { int v() { return 8; } } "
           "class R { static L active; } "
           "class A { void main() { print(R.active.v()); "
           "print(R.active == null); } }")
    result = run(src, repair=Strategy("S2b"))
    assert result.stdout_lines == ["8", "false"]
    result = run(src, repair=Strategy("S2a"))
    assert result.stdout_lines == ["8", "true"]


# -- force return -------------------------------------------------------------


TWO_METHODS = """
class B { int size() { return 2; } }
class Maker {
    B supply(B given) {
        B missing = null;
        missing.size();
        return new B();
    }
}
class A {
    void main() {
        Maker m = new Maker();
        B got = m.supply(new B());
        %s
    }
}
"""


def test_s4a_returns_null_to_caller():
    src = TWO_METHODS % ("if (got == null) { print(\"null-handled\"); } "
                         "else { print(\"value\"); }")
    result = run(src, repair=Strategy("S4a"))
    assert result.stdout_lines == ["null-handled"]


def test_s4b_returns_pooled_value():
    src = TWO_METHODS % "print(got.size());"
    result = run(src, repair=Strategy("S4b"))
    assert result.status == "normal"
    assert result.stdout_lines == ["2"]
    applied = [ev for ev in result.events if ev.event == "try"][0]
    assert applied.strategy == "S4b" and applied.parameter == "given"


def test_s4c_returns_manufactured_value():
    src = TWO_METHODS % "print(got.size());"
    result = run(src, repair=Strategy("S4c"))
    assert result.status == "normal"
    applied = [ev for ev in result.events if ev.event == "try"][0]
    assert applied.strategy == "S4c" and applied.parameter == "B"


def test_s4d_in_value_method_is_return_incompatible():
    src = TWO_METHODS % "print(1);"
    result = run(src, repair=Strategy("S4d"))
    assert result.status == "NullPointerException"
    reasons = [ev.reason for ev in result.events if ev.event == "exhausted"]
    assert reasons == ["RI"]


def test_s4b_s4c_in_void_method_are_return_incompatible():
    src = ("class B { void f() { } } "
           "class A { void hit() { B b = null; b.f(); } "
           "void main() { hit(); print(\"end\"); } }")
    for sid in ("S4b", "S4c"):
        result = run(src, repair=Strategy(sid))
        assert result.status == "NullPointerException", sid
        reasons = [ev.reason for ev in result.events if ev.event == "exhausted"]
        assert reasons == ["RI"], sid


def test_s4a_in_void_method_plainly_returns():
    src = ("class B { void f() { } } "
           "class A { void hit() { B b = null; b.f(); print(\"inside\"); } "
           "void main() { hit(); print(\"end\"); } }")
    result = run(src, repair=Strategy("S4a"))
    assert result.status == "normal"
    assert result.stdout_lines == ["end"]


def test_s4a_with_primitive_return_is_incompatible():
    src = ("class B { int g() { return 1; } } "
           "class A { int calc() { B b = null; return b.g(); } "
           "void main() { print(calc()); } }")
    result = run(src, repair=Strategy("S4a"))
    assert result.status == "NullPointerException"
    reasons = [ev.reason for ev in result.events if ev.event == "exhausted"]
    assert reasons == ["RI"]


def test_force_return_skips_rest_of_method_only():
    src = ("class B { void f() { } } "
           "class A { "
           "void inner() { B b = null; b.f(); print(\"after-crash\"); } "
           "void main() { inner(); print(\"caller-continues\"); } }")
    result = run(src, repair=Strategy("S4d"))
    assert result.stdout_lines == ["caller-continues"]


# -- line skip ----------------------------------------------------------------


def test_skip_line_pre_test_avoids_partial_execution():
    src = ("class B { void f() { } } "
           "class A { int trace() { print(\"evaluated\"); return 1; } "
           "void main() { B b = null; int x = 0; x = trace() + b.hashCodeish(); } }")
    # hashCodeish does not exist; use a real method
    src = ("class B { int g() { return 1; } } "
           "class A { int trace() { print(\"evaluated\"); return 1; } "
           "void main() { B b = null; int x = 0; x = trace() + b.g(); print(x); } }")
    result = run(src, repair=Strategy("S3"))
    assert result.status == "normal"
    # The pre-test skips the whole statement: trace() never runs.
    assert result.stdout_lines == ["0"]


def test_skip_line_signal_path_for_mid_statement_null():
    # The null only appears once the statement is already executing; the
    # skip signal abandons the rest of it.
    src = ("class I { int v() { return 1; } } "
           "class O { I inner() { print(\"ran\"); return null; } } "
           "class A { void main() { O o = new O(); int x = 0; "
           "x = o.inner().v(); print(x); } }")
    result = run(src, repair=Strategy("S3"))
    assert result.status == "normal"
    assert result.stdout_lines == ["ran", "0"]


def test_unskippable_statement_yields_us():
    src = ("class B { int g() { return 1; } } "
           "class A { int m(B b) { return b.g(); } "
           "void main() { print(m(null)); } }")
    result = run(src, repair=Strategy("S3"))
    assert result.status == "NullPointerException"
    reasons = [ev.reason for ev in result.events if ev.event == "exhausted"]
    assert reasons == ["US"]
