"""Runtime repair framework: interpreter, catch stack, pool, strategies."""

from .catchstack import CatchStack
from .controller import (
    CrashPointState, Decision, RepairController, RepairEvent,
)
from .interpreter import (
    ExecutionResult, ForceReturnSignal, Interpreter, LineSkipSignal,
    MiniJException,
)
from .patches import PatchSuggestion, apply_patch, suggest_patch
from .pool import (
    DEFAULT_DEPTH_BUDGET, ValuePool, constructible_types, recipe_for,
)
from .runner import (
    Prepared, collect_site_types, load_unit, make_controller, prepare,
    prepare_split, run, run_prepared,
)
from .strategies import STRATEGY_IDS, Strategy
from .values import ObjectRef, Value, dynamic_type, render, values_equal

__all__ = [
    "STRATEGY_IDS", "CatchStack", "CrashPointState", "Decision",
    "DEFAULT_DEPTH_BUDGET", "ExecutionResult", "ForceReturnSignal",
    "Interpreter", "LineSkipSignal", "MiniJException", "ObjectRef",
    "PatchSuggestion", "Prepared", "RepairController", "RepairEvent",
    "Strategy", "Value", "ValuePool", "apply_patch", "collect_site_types",
    "constructible_types", "dynamic_type", "load_unit", "make_controller",
    "prepare", "prepare_split", "recipe_for", "render", "run",
    "run_prepared", "suggest_patch", "values_equal",
]
