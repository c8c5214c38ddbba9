"""Configuration settings for qrelgauge."""

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

DEFAULT_BUCKETS = "0-0.01,0.01-0.05,0.05-1"
DEFAULT_FRACTIONS = "0.01,0.02,0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"


def _env_flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


def _env_optional_int(name: str) -> Optional[int]:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else None


def parse_float_list(text: str) -> Tuple[float, ...]:
    """Parse a comma-separated list of reals such as ``0.1,0.5,1.0``."""
    return tuple(float(item) for item in text.split(",") if item.strip())


@dataclass
class ParseConfig:
    """Input parsing settings."""
    # QRELGAUGE_STRICT=1 forces strict parsing even when a caller asks for lenient mode
    force_strict: bool = field(default_factory=lambda: _env_flag("QRELGAUGE_STRICT"))
    strict: bool = True

    def resolve(self, strict: Optional[bool]) -> bool:
        """Return the effective strictness for a call site."""
        if self.force_strict:
            return True
        return self.strict if strict is None else strict


@dataclass
class AnalysisConfig:
    """Significance and pooling settings."""
    alpha: float = field(default_factory=lambda: float(os.getenv("QRELGAUGE_ALPHA", "0.05")))
    buckets: str = field(default_factory=lambda: os.getenv("QRELGAUGE_BUCKETS", DEFAULT_BUCKETS))
    exact_subset_budget: int = field(default_factory=lambda: int(os.getenv("QRELGAUGE_EXACT_BUDGET", "100000")))
    system_based_fallback: str = field(default_factory=lambda: os.getenv("QRELGAUGE_FALLBACK", "fallback").lower())
    # incomplete-beta evaluation tolerance
    beta_tolerance: float = 1e-12


@dataclass
class SimulationConfig:
    """Monte Carlo study settings."""
    trials: int = field(default_factory=lambda: int(os.getenv("QRELGAUGE_TRIALS", "1000")))
    fractions: str = field(default_factory=lambda: os.getenv("QRELGAUGE_FRACTIONS", DEFAULT_FRACTIONS))
    repetitions: int = field(default_factory=lambda: int(os.getenv("QRELGAUGE_REPETITIONS", "1")))
    seed: Optional[int] = field(default_factory=lambda: _env_optional_int("QRELGAUGE_SEED"))
    monte_carlo_samples: int = field(default_factory=lambda: int(os.getenv("QRELGAUGE_MC_SAMPLES", "10000")))


@dataclass
class ReportConfig:
    """Report emission settings."""
    significant_digits: int = field(default_factory=lambda: int(os.getenv("QRELGAUGE_SIG_DIGITS", "6")))
    full_precision: bool = field(default_factory=lambda: _env_flag("QRELGAUGE_FULL_PRECISION"))


@dataclass
class WorkerConfig:
    """Parallelism settings."""
    jobs: int = field(default_factory=lambda: int(os.getenv("QRELGAUGE_JOBS", "1")))

    @property
    def max_jobs(self) -> int:
        return os.cpu_count() or 1


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = field(default_factory=lambda: os.getenv("QRELGAUGE_LOG_LEVEL", "INFO"))
    format: str = field(default_factory=lambda: os.getenv("QRELGAUGE_LOG_FORMAT", "[%(levelname)s] %(name)s: %(message)s"))


@dataclass
class QrelGaugeConfig:
    """Main configuration class combining all settings."""
    parsing: ParseConfig = field(default_factory=ParseConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    workers: WorkerConfig = field(default_factory=WorkerConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return asdict(self)

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues."""
        issues = []

        if not 0.0 < self.analysis.alpha < 1.0:
            issues.append(f"alpha must lie in (0, 1), got {self.analysis.alpha}")
        if self.analysis.exact_subset_budget < 1:
            issues.append("exact subset budget must be positive")
        if self.analysis.system_based_fallback not in ("fallback", "skip"):
            issues.append(f"unknown system-based fallback mode: {self.analysis.system_based_fallback}")

        if self.simulation.trials < 1:
            issues.append("trials must be at least 1")
        if self.simulation.repetitions < 1:
            issues.append("repetitions must be at least 1")
        if self.simulation.monte_carlo_samples < 1:
            issues.append("monte carlo samples must be at least 1")

        if not 1 <= self.report.significant_digits <= 17:
            issues.append("significant digits must lie in [1, 17]")
        if self.workers.jobs < 1:
            issues.append("jobs must be at least 1")

        return issues


# Global configuration instance
config = QrelGaugeConfig()


def resolve_strict(strict: Optional[bool]) -> bool:
    """Effective strict/lenient mode for a call site."""
    return config.parsing.resolve(strict)


def validate_config() -> List[str]:
    """Validate configuration settings."""
    return config.validate()
