"""
Readers and writers for runs, qrels, document metadata, the JSONL dataset and reports.
"""

from .trec_files import (
    ParseDiagnostics,
    parse_run,
    emit_run,
    parse_qrels,
    emit_qrels,
    describe_qrels,
)

from .doc_meta import (
    parse_doc_meta,
    emit_doc_meta,
)

from .dmerit import ingest_dmerit

from .reports import (
    emit_report,
    parse_report,
    render_report,
    write_report,
)

__all__ = [
    # TREC formats
    "ParseDiagnostics",
    "parse_run",
    "emit_run",
    "parse_qrels",
    "emit_qrels",
    "describe_qrels",

    # Metadata
    "parse_doc_meta",
    "emit_doc_meta",

    # Dataset adapter
    "ingest_dmerit",

    # Reports
    "emit_report",
    "parse_report",
    "render_report",
    "write_report",
]
