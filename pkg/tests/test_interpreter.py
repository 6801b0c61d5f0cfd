from __future__ import annotations

import pytest

from npefix.errors import MiniJTypeError
from npefix.runtime import run


def out_of(src: str, **kw):
    result = run(src, **kw)
    assert result.status == "normal", result.status
    return result.stdout_lines


def test_arithmetic_semantics():
    lines = out_of(
        "class A { void main() { "
        "print(7 / 2); print(-7 / 2); print(7 % 3); print(-7 % 3); "
        "print(7 % -3); print(2 * -3); } }")
    # Truncating division, remainder takes the dividend's sign.
    assert lines == ["3", "-3", "1", "-1", "1", "-6"]


def test_division_by_zero_is_catchable():
    lines = out_of(
        "class A { void main() { "
        "try { print(1 / 0); } catch (ArithmeticException e) { print(\"div\"); } "
        "try { print(1 % 0); } catch (ArithmeticException e) { print(\"mod\"); } } }")
    assert lines == ["div", "mod"]


def test_string_concatenation_renders_all_values():
    lines = out_of(
        "class B { } class A { void main() { "
        "string s = null; "
        "print(\"v=\" + 1 + \"\" + true + s); "
        "print(\"obj=\" + new B()); } }")
    assert lines[0] == "v=1truenull"
    assert lines[1].startswith("obj=B#")


def test_short_circuit_evaluation():
    lines = out_of(
        "class A { "
        "bool trace(string m, bool v) { print(m); return v; } "
        "void main() { "
        "print(trace(\"l\", false) && trace(\"r\", true)); "
        "print(trace(\"l2\", true) || trace(\"r2\", true)); } }")
    assert lines == ["l", "false", "l2", "true"]


def test_uncaught_exception_statuses():
    assert run("class A { void main() { throw new Exception(); } }").status \
        == "Exception"
    assert run("class B { void f() { } } "
               "class A { void main() { B b = null; b.f(); } }").status \
        == "NullPointerException"


def test_throw_null_raises_npe():
    result = run("class E extends Exception { } "
                 "class A { void main() { E e = null; throw e; } }")
    assert result.status == "NullPointerException"


def test_finally_runs_on_return():
    lines = out_of(
        "class A { int m() { try { return 1; } finally { print(\"fin\"); } } "
        "void main() { print(m()); } }")
    assert lines == ["fin", "1"]


def test_exception_in_finally_replaces_in_flight():
    result = run(
        "class E extends Exception { } class F extends Exception { } "
        "class A { void main() { "
        "try { throw new E(); } finally { throw new F(); } } }")
    assert result.status == "F"


def test_catch_selected_in_order_by_subtype():
    lines = out_of(
        "class E1 extends Exception { } class E2 extends E1 { } "
        "class A { void main() { "
        "try { throw new E2(); } "
        "catch (E1 e) { print(\"e1\"); } "
        "catch (Exception e) { print(\"exc\"); } } }")
    assert lines == ["e1"]


def test_dynamic_dispatch_through_base_call():
    lines = out_of(
        "class Base { string name() { return \"base\"; } "
        "void announce() { print(name()); } } "
        "class Sub extends Base { string name() { return \"sub\"; } } "
        "class A { void main() { new Sub().announce(); } }")
    assert lines == ["sub"]


def test_constructor_overload_by_arity():
    lines = out_of(
        "class V { int n; V() { this.n = 1; } V(int a) { this.n = a; } "
        "V(int a, int b) { this.n = a + b; } } "
        "class A { void main() { "
        "print(new V().n); print(new V(5).n); print(new V(2, 3).n); } }")
    assert lines == ["1", "5", "5"]


def test_field_initializers_run_root_first():
    lines = out_of(
        "class Base { int a = 1; } "
        "class Sub extends Base { int b = this.a + 1; } "
        "class A { void main() { Sub s = new Sub(); print(s.b); } }")
    assert lines == ["2"]


def test_statics_shared_across_instances():
    lines = out_of(
        "class C { static int n; C() { C.n = C.n + 1; } } "
        "class A { void main() { C a = new C(); C b = new C(); print(C.n); } }")
    assert lines == ["2"]


def test_assertion_failure_is_uncaught_assertion_error():
    result = run("class A { void main() { assertTrue(false); } }")
    assert result.status == "AssertionError"
    assert result.assertion_failed


def test_caught_assertion_still_fails_the_task():
    result = run(
        "class A { void main() { "
        "try { assertEquals(1, 2); } catch (AssertionError e) { print(\"x\"); } } }")
    assert result.status == "normal"
    assert result.assertion_failed
    assert not result.succeeded


def test_object_equality_is_identity():
    lines = out_of(
        "class B { } class A { void main() { "
        "B x = new B(); B y = new B(); B z = x; "
        "print(x == y); print(x == z); print(x != y); } }")
    assert lines == ["false", "true", "true"]


def test_entry_class_needs_zero_arg_constructor():
    with pytest.raises(MiniJTypeError, match="zero-argument"):
        run("class A { A(int n) { } void main() { } }")


def test_corpus_expected_outputs(output_cases):
    from npefix.harness import check_case_integrity
    for case in output_cases:
        check_case_integrity(case)
