"""npefix: a runtime-repair laboratory for null-dereference failures.

The package instruments MiniJ programs so harmful null dereferences are
detected before they crash, applies alternative execution strategies at
runtime, and benchmarks repairability with an outcome taxonomy.
"""

__version__ = "0.1.0"
