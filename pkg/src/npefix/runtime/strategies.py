"""The nine alternative execution strategies.

==== =========================================================
S1a  local injection of an existing compatible value
S1b  global injection of an existing compatible value
S2a  local injection of a newly manufactured value
S2b  global injection of a newly manufactured value
S3   skip the statement containing the dereference
S4a  skip the rest of the method, returning null
S4b  skip the rest of the method, returning a pooled value
S4c  skip the rest of the method, returning a manufactured value
S4d  skip the rest of the method (void return)
==== =========================================================

Local injection replaces one dereference without touching the source
variable; global injection also rebinds it, affecting every later use.
"""

from __future__ import annotations

from dataclasses import dataclass

STRATEGY_IDS = ("S1a", "S1b", "S2a", "S2b", "S3", "S4a", "S4b", "S4c", "S4d")

REUSE = ("S1a", "S1b")
MANUFACTURE = ("S2a", "S2b")
REPLACEMENT = REUSE + MANUFACTURE
GLOBAL_INJECTION = ("S1b", "S2b")
METHOD_SKIP = ("S4a", "S4b", "S4c", "S4d")
SKIPPING = ("S3",) + METHOD_SKIP

# Which ids take a parameter, and of what kind.
POOL_PARAM = ("S1a", "S1b", "S4b")      # parameter names a pool entry
TYPE_PARAM = ("S2a", "S2b", "S4c")      # parameter names a constructible type
PARAMETERLESS = ("S3", "S4a", "S4d")


@dataclass(frozen=True)
class Strategy:
    id: str
    parameter: str | None = None

    def __post_init__(self):
        if self.id not in STRATEGY_IDS:
            raise ValueError(f"unknown strategy id {self.id!r}")
        if self.id in PARAMETERLESS and self.parameter is not None:
            raise ValueError(f"strategy {self.id} takes no parameter")

    def __str__(self):
        if self.parameter is None:
            return self.id
        return f"{self.id}({self.parameter})"
