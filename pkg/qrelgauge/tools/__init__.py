# Copyright 2024-2025 The qrelgauge Project Developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Tools module for qrelgauge.

One interface over every analysis, organized into categories:
- IO: run, qrels, metadata, dataset and report formats
- Metrics: per-query retrieval metrics and the metric matrix
- Rankstats: Kendall-tau, significance buckets, concordance
- Simulation: single-relevant and incremental annotation studies, synthetic data
- Pooling: pool coverage and its extrapolation
"""

# IO
from .io import (
    ParseDiagnostics,
    parse_run,
    emit_run,
    parse_qrels,
    emit_qrels,
    describe_qrels,
    parse_doc_meta,
    emit_doc_meta,
    ingest_dmerit,
    emit_report,
    parse_report,
    write_report,
)

# Metrics
from .metrics import (
    recall_at_k,
    ndcg_at_k,
    average_precision_at_k,
    r_precision,
    MetricKind,
    MetricSpec,
    MetricMatrix,
    evaluate,
)

# Ranking statistics
from .rankstats import (
    PairBucket,
    PairClassification,
    SignificanceRelation,
    parse_buckets,
    paired_t_test,
    classify_pairs,
    significance_relation,
    kendall_tau,
    error_rate,
    partial_kendall_tau,
    discordant_pairs,
    concordance,
)

# Simulation
from .simulation import (
    FallbackMode,
    SelectionPolicy,
    select_single,
    single_relevant_study,
    default_policies,
    incremental_study,
    SynthConfig,
    synth_generate,
)

# Pooling
from .pooling import (
    pool_union,
    coverage,
    expected_coverage,
    fit_log,
    extrapolate_systems,
    depth_analysis,
)

__all__ = [
    # IO
    "ParseDiagnostics",
    "parse_run",
    "emit_run",
    "parse_qrels",
    "emit_qrels",
    "describe_qrels",
    "parse_doc_meta",
    "emit_doc_meta",
    "ingest_dmerit",
    "emit_report",
    "parse_report",
    "write_report",

    # Metrics
    "recall_at_k",
    "ndcg_at_k",
    "average_precision_at_k",
    "r_precision",
    "MetricKind",
    "MetricSpec",
    "MetricMatrix",
    "evaluate",

    # Ranking statistics
    "PairBucket",
    "PairClassification",
    "SignificanceRelation",
    "parse_buckets",
    "paired_t_test",
    "classify_pairs",
    "significance_relation",
    "kendall_tau",
    "error_rate",
    "partial_kendall_tau",
    "discordant_pairs",
    "concordance",

    # Simulation
    "FallbackMode",
    "SelectionPolicy",
    "select_single",
    "single_relevant_study",
    "default_policies",
    "incremental_study",
    "SynthConfig",
    "synth_generate",

    # Pooling
    "pool_union",
    "coverage",
    "expected_coverage",
    "fit_log",
    "extrapolate_systems",
    "depth_analysis",
]
