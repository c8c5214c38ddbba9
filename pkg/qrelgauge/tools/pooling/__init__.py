"""
Pool coverage and its extrapolation over systems and depth.
"""

from .coverage import (
    EXACT,
    MONTE_CARLO,
    CoverageTable,
    pool_union,
    coverage,
    expected_coverage,
    exact_coverage,
    monte_carlo_coverage,
)

from .extrapolation import (
    fit_log,
    extrapolate_systems,
    depth_analysis,
)

__all__ = [
    "EXACT",
    "MONTE_CARLO",
    "CoverageTable",
    "pool_union",
    "coverage",
    "expected_coverage",
    "exact_coverage",
    "monte_carlo_coverage",
    "fit_log",
    "extrapolate_systems",
    "depth_analysis",
]
