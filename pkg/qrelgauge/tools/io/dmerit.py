"""
Adapter for the multi-evidence retrieval dataset in JSONL form.

Each line holds ``query_id``, ``query`` and ``evidence`` (passage ids); only ids are used.
"""

import logging
from typing import Dict, Iterable, Optional, Tuple

import orjson
from pydantic import ValidationError

from ...error_handler import SchemaError
from ...models import Qrels
from ...schemas import DMeritRecord
from .trec_files import ParseDiagnostics

logger = logging.getLogger(__name__)

# queries with fewer evidence were filtered out when the dataset was built
MIN_EVIDENCE = 5


def ingest_dmerit(
    stream: Iterable[str],
    diagnostics: Optional[ParseDiagnostics] = None,
) -> Tuple[Qrels, Dict[str, str]]:
    """
    Load evidence ids as binary qrels plus the query texts used for report labels.

    Raises:
        SchemaError: invalid JSON, a missing/ill-typed required field, or a repeated query_id
    """
    if diagnostics is None:
        diagnostics = ParseDiagnostics(source="<dmerit>")
    relevant: Dict[str, Dict[str, int]] = {}
    texts: Dict[str, str] = {}

    for line_number, raw in enumerate(stream, start=1):
        diagnostics.lines_read += 1
        line = raw.strip()
        if not line:
            diagnostics.skip(line_number)
            continue

        try:
            record = DMeritRecord.model_validate(orjson.loads(line))
        except orjson.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}", line_number) from e
        except ValidationError as e:
            fields = ", ".join(".".join(str(p) for p in err["loc"]) for err in e.errors())
            raise SchemaError(f"missing or invalid field(s): {fields}", line_number) from e

        if record.query_id in relevant:
            raise SchemaError(f"query_id {record.query_id} repeated", line_number)

        evidence = dict.fromkeys(record.evidence)
        if len(evidence) != len(record.evidence):
            diagnostics.warn(line_number, f"query {record.query_id}: duplicate evidence ids merged")
        if not evidence:
            diagnostics.skip(line_number, f"query {record.query_id} has no evidence; dropped")
            continue
        if len(evidence) < MIN_EVIDENCE:
            diagnostics.warn(line_number, f"query {record.query_id} has only {len(evidence)} evidence")

        relevant[record.query_id] = {pid: 1 for pid in evidence}
        texts[record.query_id] = record.query
        diagnostics.accept()

    logger.info(f"Ingested {len(relevant)} queries with {sum(len(v) for v in relevant.values())} evidence")
    return Qrels(relevant), texts
