"""
Error handling for qrelgauge.
Provides the exception hierarchy and structured error cards with exit codes.
"""

import logging
import traceback
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class ErrorSeverity(Enum):
    """Error severity levels"""
    CRITICAL = "critical"    # Analysis cannot produce output
    HIGH = "high"            # Input rejected
    MEDIUM = "medium"        # Recoverable in lenient mode


class ErrorCategory(Enum):
    """Error categories, each mapped to a process exit code"""
    INPUT = "input"
    CONFIG = "config"
    NUMERICAL = "numerical"


EXIT_CODES = {
    ErrorCategory.INPUT: 2,
    ErrorCategory.CONFIG: 2,
    ErrorCategory.NUMERICAL: 3,
}


class QrelGaugeError(Exception):
    """Base class for every error raised by qrelgauge."""

    category: ErrorCategory = ErrorCategory.INPUT
    severity: ErrorSeverity = ErrorSeverity.HIGH
    title: str = "Input Error"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.category]


class LineError(QrelGaugeError):
    """An error tied to a line of an input stream."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


# --- data model errors ---

class MissingQuery(QrelGaugeError):
    title = "Unknown Query"


class DuplicateDoc(LineError):
    title = "Duplicate Document"


class DuplicateSystem(QrelGaugeError):
    title = "Duplicate System"


class QueryUniverseMismatch(QrelGaugeError):
    title = "Runs Cover Different Queries"


# --- parsing errors ---

class ParseError(LineError):
    title = "Malformed Input Line"
    severity = ErrorSeverity.MEDIUM


class MixedRunTags(LineError):
    title = "Mixed Run Tags"


class ConflictingGrade(LineError):
    title = "Conflicting Relevance Grade"


class ConflictingMeta(LineError):
    title = "Conflicting Document Metadata"


class RangeError(LineError):
    title = "Value Out Of Range"


class SchemaError(LineError):
    title = "Schema Violation"


# --- analysis errors ---

class NoRelevant(QrelGaugeError):
    title = "Query Without Relevant Documents"
    severity = ErrorSeverity.MEDIUM


class NoCommonQueries(QrelGaugeError):
    title = "No Common Queries"


class MismatchedSystems(QrelGaugeError):
    title = "Mismatched System Sets"


class TooFewSystems(QrelGaugeError):
    title = "Too Few Systems"


class TooFewQueries(QrelGaugeError):
    title = "Too Few Queries"


class EmptyBucket(QrelGaugeError):
    title = "Empty Significance Bucket"
    severity = ErrorSeverity.MEDIUM


class MissingMeta(QrelGaugeError):
    title = "Missing Document Metadata"


# --- configuration errors ---

class ConfigError(QrelGaugeError):
    category = ErrorCategory.CONFIG
    title = "Configuration Error"


class ExactBudgetExceeded(ConfigError):
    title = "Exact Enumeration Over Budget"


# --- numerical errors ---

class NumericalError(QrelGaugeError):
    category = ErrorCategory.NUMERICAL
    severity = ErrorSeverity.CRITICAL
    title = "Numerical Failure"


class DegenerateFit(NumericalError):
    title = "Degenerate Curve Fit"


@dataclass
class StructuredError:
    """Structured error card emitted on the error stream"""
    title: str
    message: str
    category: ErrorCategory
    severity: ErrorSeverity
    exit_code: int
    error_type: str
    technical_details: str = ""
    stack_trace: Optional[str] = None
    suggestions: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        result = asdict(self)
        result["category"] = self.category.value
        result["severity"] = self.severity.value
        return result


_SUGGESTIONS = {
    "ParseError": ["Re-run with --lenient to skip malformed lines (warnings are reported)."],
    "NoRelevant": ["Re-run with --lenient to skip queries without relevant documents."],
    "QueryUniverseMismatch": ["Re-run with --lenient to restrict every analysis to the shared queries."],
    "ExactBudgetExceeded": ["Use --coverage-mode monte_carlo with --samples and --seed."],
    "MissingMeta": ["Supply --meta with popularity and length for every relevant document."],
}


def create_error(exception: BaseException, with_trace: bool = False) -> StructuredError:
    """Create a structured error card for any exception."""
    if isinstance(exception, QrelGaugeError):
        title = exception.title
        category = exception.category
        severity = exception.severity
        exit_code = exception.exit_code
    elif isinstance(exception, (OSError, ValueError)):
        title = "Input Error"
        category = ErrorCategory.INPUT
        severity = ErrorSeverity.HIGH
        exit_code = EXIT_CODES[category]
    else:
        title = "Internal Error"
        category = ErrorCategory.NUMERICAL
        severity = ErrorSeverity.CRITICAL
        exit_code = EXIT_CODES[category]

    error_type = type(exception).__name__
    return StructuredError(
        title=title,
        message=str(exception),
        category=category,
        severity=severity,
        exit_code=exit_code,
        error_type=error_type,
        technical_details=f"{error_type}: {exception}",
        stack_trace=traceback.format_exc() if with_trace else None,
        suggestions=list(_SUGGESTIONS.get(error_type, [])),
    )


def handle_error(exception: BaseException, with_trace: bool = False) -> StructuredError:
    """Log and return the structured card for an exception."""
    error = create_error(exception, with_trace=with_trace)
    logger.error(f"{error.title}: {error.message}")
    return error
