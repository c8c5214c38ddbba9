"""
Streaming readers and writers for TREC run files and qrels.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ...error_handler import ConflictingGrade, DuplicateDoc, MixedRunTags, ParseError
from ...models import Qrels, Run, canonical_order, canonicalize
from ...schemas import QrelsStats
from ...shared_libraries.config import resolve_strict

logger = logging.getLogger(__name__)


@dataclass
class ParseDiagnostics:
    """Warnings and line accounting for one parsed stream (accepted + skipped = read)."""
    warnings: List[Tuple[int, str]] = field(default_factory=list)
    lines_read: int = 0
    lines_skipped: int = 0
    lines_accepted: int = 0
    source: str = "<stream>"

    def warn(self, line_number: int, message: str) -> None:
        self.warnings.append((line_number, message))
        logger.warning(f"{self.source}:{line_number}: {message}")

    def skip(self, line_number: int, message: Optional[str] = None) -> None:
        self.lines_skipped += 1
        if message:
            self.warn(line_number, message)

    def accept(self) -> None:
        self.lines_accepted += 1


def _reject(diagnostics: ParseDiagnostics, strict: bool, line_number: int, message: str) -> None:
    if strict:
        raise ParseError(message, line_number)
    diagnostics.skip(line_number, f"skipped: {message}")


def parse_run(
    stream: Iterable[str],
    strict: Optional[bool] = None,
    default_system_id: str = "",
    source: str = "<run>",
) -> Tuple[Run, ParseDiagnostics]:
    """
    Parse a six-column TREC run (``qid Q0 docid rank score tag``).

    Ranks in the file are ignored; the returned run is in canonical order.

    Raises:
        ParseError: malformed line in strict mode
        MixedRunTags: more than one run tag in the stream
        DuplicateDoc: a document listed twice for one query
    """
    strict = resolve_strict(strict)
    diagnostics = ParseDiagnostics(source=source)
    rankings: Dict[str, List[Tuple[str, float]]] = defaultdict(list)
    seen: Dict[str, set] = defaultdict(set)
    tag: Optional[str] = None

    for line_number, raw in enumerate(stream, start=1):
        diagnostics.lines_read += 1
        line = raw.strip()
        if not line:
            diagnostics.skip(line_number)
            continue

        parts = line.split()
        if len(parts) != 6:
            _reject(diagnostics, strict, line_number, f"expected 6 fields, found {len(parts)}")
            continue
        qid, _, docid, _, score_text, run_tag = parts
        try:
            score = float(score_text)
        except ValueError:
            _reject(diagnostics, strict, line_number, f"non-numeric score {score_text!r}")
            continue
        if not math.isfinite(score):
            _reject(diagnostics, strict, line_number, f"non-finite score {score_text!r}")
            continue

        if tag is None:
            tag = run_tag
        elif run_tag != tag:
            raise MixedRunTags(f"run tag {run_tag!r} differs from {tag!r}", line_number)
        if docid in seen[qid]:
            raise DuplicateDoc(f"document {docid} listed twice for query {qid}", line_number)
        seen[qid].add(docid)
        rankings[qid].append((docid, score))
        diagnostics.accept()

    if tag is None:
        diagnostics.warn(diagnostics.lines_read, "run contains no entries")
        tag = default_system_id

    run = canonicalize(Run(tag, {qid: tuple(entries) for qid, entries in rankings.items()}))
    logger.debug(f"Parsed run {tag}: {len(run.rankings)} queries, {diagnostics.lines_accepted} entries")
    return run, diagnostics


def emit_run(run: Run) -> str:
    """Write a run in six-column TREC format, canonical order, ranks from 1."""
    lines = []
    for qid in sorted(run.rankings):
        for rank, (docid, score) in enumerate(canonical_order(run.rankings[qid]), start=1):
            lines.append(f"{qid} Q0 {docid} {rank} {score!r} {run.system_id}\n")
    return "".join(lines)


def parse_qrels(
    stream: Iterable[str],
    strict: Optional[bool] = None,
    source: str = "<qrels>",
) -> Tuple[Qrels, ParseDiagnostics]:
    """
    Parse four-column qrels (``qid iter docid grade``); the second column is ignored.

    Repeated pairs with the same grade are merged with a warning.

    Raises:
        ParseError: malformed line in strict mode
        ConflictingGrade: the same pair judged with two grades
    """
    strict = resolve_strict(strict)
    diagnostics = ParseDiagnostics(source=source)
    entries: Dict[str, Dict[str, int]] = defaultdict(dict)

    for line_number, raw in enumerate(stream, start=1):
        diagnostics.lines_read += 1
        line = raw.strip()
        if not line:
            diagnostics.skip(line_number)
            continue

        parts = line.split()
        if len(parts) != 4:
            _reject(diagnostics, strict, line_number, f"expected 4 fields, found {len(parts)}")
            continue
        qid, _, docid, grade_text = parts
        try:
            grade = int(grade_text)
        except ValueError:
            _reject(diagnostics, strict, line_number, f"non-integer grade {grade_text!r}")
            continue
        if grade < 0:
            _reject(diagnostics, strict, line_number, f"negative grade {grade}")
            continue

        previous = entries[qid].get(docid)
        if previous is not None:
            if previous != grade:
                raise ConflictingGrade(f"({qid}, {docid}) judged {previous} and {grade}", line_number)
            diagnostics.skip(line_number, f"duplicate judgment ({qid}, {docid}) merged")
            continue
        entries[qid][docid] = grade
        diagnostics.accept()

    if not entries:
        diagnostics.warn(diagnostics.lines_read, "qrels contain no judgments")

    return Qrels(dict(entries)), diagnostics


def emit_qrels(qrels: Qrels) -> str:
    """Write qrels in four-column format, sorted by query then document."""
    lines = []
    for qid in qrels.queries:
        judged = qrels.entries[qid]
        for docid in sorted(judged):
            lines.append(f"{qid} 0 {docid} {judged[docid]}\n")
    return "".join(lines)


def describe_qrels(qrels: Qrels) -> QrelsStats:
    """Query count and relevant-per-query distribution."""
    counts = np.array([qrels.num_relevant(qid) for qid in qrels.queries], dtype=np.int64)
    if counts.size == 0:
        return QrelsStats(n_queries=0, total_relevant=0, min_relevant=0, median_relevant=0.0, max_relevant=0)
    return QrelsStats(
        n_queries=int(counts.size),
        total_relevant=int(counts.sum()),
        min_relevant=int(counts.min()),
        median_relevant=float(np.median(counts)),
        max_relevant=int(counts.max()),
    )
