"""
Document metadata TSV: ``docid<TAB>popularity<TAB>length``.
"""

import logging
from typing import Dict, Iterable, Optional, Tuple

from ...error_handler import ConflictingMeta, ParseError, RangeError
from ...models import DocMeta
from ...shared_libraries.config import resolve_strict

logger = logging.getLogger(__name__)

HEADER = ("docid", "popularity", "length")


def _is_int(text: str) -> bool:
    try:
        int(text)
        return True
    except ValueError:
        return False


def parse_doc_meta(stream: Iterable[str], strict: Optional[bool] = None) -> DocMeta:
    """
    Parse document metadata. A first row with non-numeric value fields is taken as a header.

    Raises:
        RangeError: negative popularity or length
        ConflictingMeta: a document listed twice with different values
        ParseError: malformed row in strict mode
    """
    strict = resolve_strict(strict)
    entries: Dict[str, Tuple[int, int]] = {}
    first_row = True

    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [part.strip() for part in line.split("\t")]

        if first_row:
            first_row = False
            if len(parts) == 3 and not (_is_int(parts[1]) and _is_int(parts[2])):
                logger.debug(f"Skipping metadata header: {parts}")
                continue

        if len(parts) != 3 or not (_is_int(parts[1]) and _is_int(parts[2])):
            if strict:
                raise ParseError(f"expected docid, popularity, length; got {line!r}", line_number)
            logger.warning(f"metadata line {line_number}: skipped malformed row")
            continue

        docid, popularity, length = parts[0], int(parts[1]), int(parts[2])
        if popularity < 0 or length < 0:
            raise RangeError(f"negative metadata for document {docid}", line_number)
        previous = entries.get(docid)
        if previous is not None and previous != (popularity, length):
            raise ConflictingMeta(f"document {docid} listed with {previous} and {(popularity, length)}", line_number)
        entries[docid] = (popularity, length)

    logger.info(f"Loaded metadata for {len(entries)} documents")
    return DocMeta(entries)


def emit_doc_meta(meta: DocMeta) -> str:
    lines = ["\t".join(HEADER) + "\n"]
    for docid in sorted(meta.entries):
        popularity, length = meta.entries[docid]
        lines.append(f"{docid}\t{popularity}\t{length}\n")
    return "".join(lines)
