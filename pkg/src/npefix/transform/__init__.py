"""Instrumentation and fault-seeding rewrites."""

from .instrument import (
    TransformConfig, inject_catch_stack, inject_deref_checks,
    inject_line_skip, inject_method_skip, inject_value_pool,
    is_instrumented, transform_all,
)
from .seeding import SeedRemoval, SeedReport, seed_remove_null_checks

__all__ = [
    "SeedRemoval", "SeedReport", "TransformConfig", "inject_catch_stack",
    "inject_deref_checks", "inject_line_skip", "inject_method_skip",
    "inject_value_pool", "is_instrumented", "seed_remove_null_checks",
    "transform_all",
]
