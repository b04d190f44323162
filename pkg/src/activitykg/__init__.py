"""Activity-centric knowledge-graph engine.

Ingests heterogeneous activity records, builds a unified graph through
summarize -> contextual-retrieve -> extract -> resolve -> normalize
stages with pluggable model providers, and serves expertise discovery,
task prioritization, and analytics queries with an evaluation harness.
"""

from . import kernels

__version__ = "0.1.0"

__all__ = ["kernels", "__version__"]
