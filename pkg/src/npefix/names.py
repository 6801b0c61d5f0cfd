"""Reserved identifiers of the instrumented MiniJ dialect.

All injected identifiers share one reserved prefix so instrumented code is
recognizable (re-instrumentation is refused) and cannot collide with user
names.
"""

from __future__ import annotations

DEFAULT_PREFIX = "__npefix_"

# Intrinsic base names (callable hooks understood by the runtime).
CHECK_FOR_NULL = "checkForNull"
CATCH_ADD = "catchAdd"
CATCH_REMOVE = "catchRemove"
START_METHOD = "startMethod"
END_METHOD = "endMethod"
INIT_VAR = "initVar"
MODIF_VAR = "modifVar"
SKIP_LINE = "skipLine"
STRATEGY_IS = "strategyIs"
GET_VAR = "getVar"
NEW_VAR = "newVar"
WILL_CATCH = "willCatch"

INTRINSIC_BASES = (
    CHECK_FOR_NULL, CATCH_ADD, CATCH_REMOVE, START_METHOD, END_METHOD,
    INIT_VAR, MODIF_VAR, SKIP_LINE, STRATEGY_IS, GET_VAR, NEW_VAR, WILL_CATCH,
)

# Base name of the framework signal type caught by injected method-skip
# handlers. It is deliberately not part of the Exception hierarchy so user
# catch clauses can never intercept it.
FORCE_RETURN_ERROR = "ForceReturnError"


def intrinsic(base: str, prefix: str = DEFAULT_PREFIX) -> str:
    return prefix + base


def force_return_type(prefix: str = DEFAULT_PREFIX) -> str:
    return prefix + FORCE_RETURN_ERROR


def intrinsic_base(name: str, prefix: str = DEFAULT_PREFIX) -> str | None:
    """Return the intrinsic base name if ``name`` is a prefixed intrinsic."""
    if name.startswith(prefix):
        base = name[len(prefix):]
        if base in INTRINSIC_BASES:
            return base
    return None
