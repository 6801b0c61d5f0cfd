from __future__ import annotations

import pytest

from npefix.minij import parse, typecheck
from npefix.runtime import ObjectRef, ValuePool, constructible_types, recipe_for
from npefix.runtime.pool import Recipe, _recipe_for_class


def table_for(src: str):
    program = parse(src, "p.mj")
    return typecheck(program)


BASE = ("class Animal { } class Dog extends Animal { } "
        "class Cat extends Animal { } "
        "class Main { void main() { } }")


def fresh_pool(table, this_ref=None, statics=None):
    return ValuePool(1, table, this_ref, statics if statics is not None else {})


def test_candidates_ordering_locals_params_fields_statics():
    table = table_for(
        "class T { } "
        "class Holder { T field1; static T shared; void m() { } } "
        "class Main { void main() { } }")
    t1, t2, t3, t4 = (ObjectRef("T", {}, i) for i in range(1, 5))
    this_ref = ObjectRef("Holder", {"field1": t3}, 9)
    statics = {("Holder", "shared"): t4}
    pool = ValuePool(1, table, this_ref, statics)
    pool.register_param("p", "T", t2)
    pool.init_var("loc", "T", t1)
    names = [e.name for e, _ in pool.candidates("T")]
    assert names == ["loc", "p", "field1", "shared"]


def test_candidates_filters_null_and_incompatible():
    table = table_for(BASE)
    dog = ObjectRef("Dog", {}, 1)
    pool = fresh_pool(table)
    pool.init_var("d", "Animal", dog)       # dynamic Dog
    pool.init_var("gone", "Dog", None)      # null: filtered
    pool.init_var("n", "int", 5)            # wrong category
    assert [e.name for e, _ in pool.candidates("Dog")] == ["d"]
    assert [e.name for e, _ in pool.candidates("Animal")] == ["d"]
    assert [e.name for e, _ in pool.candidates("int")] == ["n"]


def test_candidates_use_dynamic_type_not_declared():
    table = table_for(BASE)
    pool = fresh_pool(table)
    pool.init_var("a", "Animal", ObjectRef("Cat", {}, 1))
    assert [e.name for e, _ in pool.candidates("Cat")] == ["a"]
    assert pool.candidates("Dog") == []


def test_empty_candidates_signals_no_value():
    table = table_for(BASE)
    pool = fresh_pool(table)
    pool.init_var("x", "Dog", None)
    assert pool.candidates("Dog") == []


def test_modif_var_updates_latest_value():
    table = table_for(BASE)
    pool = fresh_pool(table)
    pool.init_var("a", "Animal", None)
    assert pool.candidates("Animal") == []
    dog = ObjectRef("Dog", {}, 1)
    pool.modif_var("a", "Animal", dog)
    assert [v for _, v in pool.candidates("Animal")] == [dog]


def test_lookup_precedence_local_over_field():
    table = table_for(
        "class T { } class H { T x; void m() { } } "
        "class Main { void main() { } }")
    field_val = ObjectRef("T", {}, 1)
    local_val = ObjectRef("T", {}, 2)
    pool = ValuePool(1, table, ObjectRef("H", {"x": field_val}, 3), {})
    found, value = pool.lookup("x")
    assert found and value is field_val
    pool.init_var("x", "T", local_val)
    found, value = pool.lookup("x")
    assert found and value is local_val


# -- construction search ------------------------------------------------------


def test_constructible_zero_arg():
    table = table_for(BASE)
    assert constructible_types(table, "Dog") == ["Dog"]


def test_constructible_enumerates_concrete_subtypes_in_decl_order():
    table = table_for(BASE)
    assert constructible_types(table, "Animal") == ["Animal", "Dog", "Cat"]


def test_abstract_without_concrete_subtype_is_empty():
    table = table_for("abstract class S { } class Main { void main() { } }")
    assert constructible_types(table, "S") == []


def test_abstract_with_concrete_subtype():
    table = table_for(
        "abstract class S { } class Impl extends S { } "
        "class Main { void main() { } }")
    assert constructible_types(table, "S") == ["Impl"]


def test_recursive_recipe():
    table = table_for(
        "class D { } class C { D d; C(D d) { this.d = d; } } "
        "class Main { void main() { } }")
    recipe = recipe_for(table, "C", 3)
    assert isinstance(recipe, Recipe) and recipe.type_name == "C"
    inner = recipe.args[0]
    assert isinstance(inner, Recipe) and inner.type_name == "D"


def test_self_referential_constructor_terminates():
    table = table_for(
        "class C { C inner; C(C c) { this.inner = c; } } "
        "class Main { void main() { } }")
    # C's only constructor needs a C: no budget can bottom out.
    assert constructible_types(table, "C", 3) == []
    assert _recipe_for_class(table, "C", 50) is None


def test_cycle_broken_by_alternative_constructor():
    table = table_for(
        "class C { C inner; C(C c) { this.inner = c; } C() { } } "
        "class Main { void main() { } }")
    assert constructible_types(table, "C", 3) == ["C"]


def test_depth_budget_limits_nesting():
    table = table_for(
        "class Leaf { } "
        "class Mid { Mid(Leaf l) { } } "
        "class Top { Top(Mid m) { } } "
        "class Main { void main() { } }")
    assert constructible_types(table, "Top", 3) == ["Top"]
    assert constructible_types(table, "Top", 2) == []


def test_primitive_recipes_are_defaults():
    table = table_for("class Main { void main() { } }")
    assert recipe_for(table, "int", 3) == 0
    assert recipe_for(table, "bool", 3) is False
    assert recipe_for(table, "string", 3) == ""


def test_unbuildable_raises_lookup_error():
    table = table_for("abstract class S { } class Main { void main() { } }")
    with pytest.raises(LookupError):
        recipe_for(table, "S", 3)
