"""Per-activation value pool and on-the-fly object construction search.

The pool tracks the values reachable from a method activation: locals and
parameters (registered by the injected hooks), instance fields of ``this``
and all static fields (read live at lookup time). Candidate filtering keeps
only non-null values whose dynamic type is a subtype of the required type.

Construction search enumerates concrete subtypes of a required type whose
constructors can be satisfied recursively within a depth budget; primitives
bottom out at fixed defaults (0, false, "").
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..minij.ast import is_primitive
from ..minij.typecheck import TypeTable
from .values import ObjectRef, Value, default_for, dynamic_type

DEFAULT_DEPTH_BUDGET = 3

# Sentinel distinguishing "could not build anything" from a legitimate null.
MANUFACTURE_FAILED = object()


@dataclass
class PoolEntry:
    kind: str  # "local" | "param" | "field" | "static"
    name: str
    declared_type: str


class ValuePool:
    def __init__(self, method_id: int, table: TypeTable,
                 this_ref: ObjectRef | None, statics: dict[tuple[str, str], Value]):
        self.method_id = method_id
        self.table = table
        self.this_ref = this_ref
        self.statics = statics
        self.closed = False
        # Registration order is declaration order.
        self._locals: dict[str, tuple[str, Value]] = {}
        self._params: dict[str, tuple[str, Value]] = {}

    def register_param(self, name: str, declared_type: str, value: Value):
        self._params[name] = (declared_type, value)

    def init_var(self, name: str, declared_type: str, value: Value):
        self._locals[name] = (declared_type, value)

    def modif_var(self, name: str, declared_type: str, value: Value):
        if name in self._params:
            self._params[name] = (self._params[name][0], value)
        else:
            declared = self._locals.get(name, (declared_type, None))[0] or declared_type
            self._locals[name] = (declared, value)

    def entries(self) -> list[tuple[PoolEntry, Value]]:
        """All pool entries in lookup order: locals, parameters, fields of
        this, statics."""
        out: list[tuple[PoolEntry, Value]] = []
        for name, (ty, value) in self._locals.items():
            out.append((PoolEntry("local", name, ty), value))
        for name, (ty, value) in self._params.items():
            out.append((PoolEntry("param", name, ty), value))
        if self.this_ref is not None:
            for owner, fdecl in self.table.instance_fields(self.this_ref.class_name):
                out.append((PoolEntry("field", fdecl.name, fdecl.type_name),
                            self.this_ref.fields.get(fdecl.name)))
        for owner, fdecl in self.table.static_fields():
            out.append((PoolEntry("static", fdecl.name, fdecl.type_name),
                        self.statics.get((owner, fdecl.name))))
        return out

    def candidates(self, required_type: str) -> list[tuple[PoolEntry, Value]]:
        """Non-null entries whose dynamic type is a subtype of the required
        type, deterministic order, shadowed names dropped."""
        out: list[tuple[PoolEntry, Value]] = []
        seen: set[str] = set()
        for entry, value in self.entries():
            if entry.name in seen:
                continue
            seen.add(entry.name)
            if value is None:
                continue
            dyn = dynamic_type(value)
            if dyn is None:
                continue
            if is_primitive(required_type):
                if dyn == required_type:
                    out.append((entry, value))
            elif self.table.is_subtype(dyn, required_type):
                out.append((entry, value))
        return out

    def lookup(self, name: str) -> tuple[bool, Value]:
        """Resolve a pool entry by name with shadowing precedence."""
        for entry, value in self.entries():
            if entry.name == name:
                return True, value
        return False, None


# -- construction search ------------------------------------------------------


@dataclass
class Recipe:
    """A constructible instantiation plan: type plus argument plans.
    Primitive arguments are represented by their default values."""
    type_name: str
    args: list["Recipe | Value"] = field(default_factory=list)


def _constructor_signatures(table: TypeTable, cls: str) -> list[list[str]]:
    ctors = table.constructors_of(cls)
    if not ctors:
        return [[]]  # implicit zero-argument constructor
    return [[p.type_name for p in c.params] for c in ctors]


def recipe_for(table: TypeTable, required_type: str, depth: int) -> Recipe | Value:
    """First construction plan for the required type, or raise LookupError."""
    if is_primitive(required_type):
        return default_for(required_type)
    for cls in table.concrete_subtypes(required_type):
        plan = _recipe_for_class(table, cls, depth)
        if plan is not None:
            return plan
    raise LookupError(required_type)


def _recipe_for_class(table: TypeTable, cls: str, depth: int) -> Recipe | None:
    if depth < 1:
        return None
    for sig in _constructor_signatures(table, cls):
        args: list[Recipe | Value] = []
        ok = True
        for ptype in sig:
            if is_primitive(ptype):
                args.append(default_for(ptype))
                continue
            sub = None
            for c in table.concrete_subtypes(ptype):
                sub = _recipe_for_class(table, c, depth - 1)
                if sub is not None:
                    break
            if sub is None:
                ok = False
                break
            args.append(sub)
        if ok:
            return Recipe(cls, args)
    return None


def constructible_types(table: TypeTable, required_type: str,
                        depth: int = DEFAULT_DEPTH_BUDGET) -> list[str]:
    """Concrete subtypes of the required type that can be instantiated
    within the depth budget, declaration order. Empty means no instance can
    be manufactured (the NoI situation)."""
    if is_primitive(required_type):
        return [required_type]
    if not table.has_class(required_type):
        return []
    return [cls for cls in table.concrete_subtypes(required_type)
            if _recipe_for_class(table, cls, depth) is not None]
