"""Runtime value representation for the MiniJ interpreter."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ObjectRef:
    class_name: str
    fields: dict[str, "Value"] = field(default_factory=dict)
    oid: int = 0

    def __repr__(self):
        return f"{self.class_name}#{self.oid}"


# null | bool | int | string | object
Value = None | bool | int | str | ObjectRef


def dynamic_type(v: Value) -> str | None:
    """Runtime type name of a value; None for null."""
    if v is None:
        return None
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, str):
        return "string"
    return v.class_name


def render(v: Value) -> str:
    """Deterministic display form used by print and string concatenation."""
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return v
    return f"{v.class_name}#{v.oid}"


def values_equal(a: Value, b: Value) -> bool:
    """`==` semantics: value equality for primitives, identity for objects."""
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, ObjectRef) or isinstance(b, ObjectRef):
        return a is b
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def default_for(type_name: str) -> Value:
    if type_name == "int":
        return 0
    if type_name == "bool":
        return False
    if type_name == "string":
        return ""
    return None
