"""
Partial-annotation simulations and the synthetic benchmark generator.
"""

from .selection import (
    PolicyKind,
    FallbackMode,
    SelectionPolicy,
    SelectionOutcome,
    RankingComparator,
    select_single,
    select_with_outcome,
    single_relevant_study,
    default_policies,
)

from .incremental import (
    annotation_quota,
    annotation_orders,
    partial_qrels,
    incremental_study,
)

from .synth import SynthConfig, synth_generate

__all__ = [
    # Single-relevant selection
    "PolicyKind",
    "FallbackMode",
    "SelectionPolicy",
    "SelectionOutcome",
    "RankingComparator",
    "select_single",
    "select_with_outcome",
    "single_relevant_study",
    "default_policies",

    # Incremental annotation
    "annotation_quota",
    "annotation_orders",
    "partial_qrels",
    "incremental_study",

    # Synthetic data
    "SynthConfig",
    "synth_generate",
]
