# qrelgauge/schemas.py
import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# --- Reports ---

class ReportTable(BaseModel):
    """One flat analysis table; a CSV file holds exactly one of these."""
    columns: List[str]
    rows: List[List[Any]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_width(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row width {len(row)} does not match {len(self.columns)} columns")
        return self


class Report(BaseModel):
    """Analysis report: a header of run settings plus named tables in a stable order."""
    title: str = ""
    header: Dict[str, Any] = Field(default_factory=dict)
    tables: Dict[str, ReportTable] = Field(default_factory=dict)

    def add_table(self, name: str, columns: List[str], rows: List[List[Any]]) -> "Report":
        self.tables[name] = ReportTable(columns=columns, rows=rows)
        return self


# --- Dataset records ---

class DMeritRecord(BaseModel):
    """One line of the multi-evidence JSONL dataset. Unknown fields are ignored."""
    model_config = ConfigDict(extra="ignore")

    query_id: str
    query: str
    evidence: List[str]


class QrelsStats(BaseModel):
    n_queries: int
    total_relevant: int
    min_relevant: int
    median_relevant: float
    max_relevant: int


# --- Curves ---

class LogFit(BaseModel):
    """Least-squares fit of y = a + b ln(x)."""
    a: float
    b: float
    rmse: float = Field(ge=0.0)
    max_error: float = Field(ge=0.0)

    def predict(self, x: float) -> float:
        return self.a + self.b * math.log(x)


class CurvePoint(BaseModel):
    x: int = Field(ge=1)
    y: float


class CoverageCurve(BaseModel):
    """Observed (x, y) points, their log fit and extrapolated predictions."""
    points: List[CurvePoint]
    fit: LogFit
    extrapolated: List[CurvePoint] = Field(default_factory=list)

    @field_validator("points")
    @classmethod
    def _ascending(cls, points: List[CurvePoint]) -> List[CurvePoint]:
        xs = [p.x for p in points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("curve points must have strictly ascending x")
        return points

    def rows(self) -> List[List[Any]]:
        """x, y, fitted, residual; extrapolated rows carry no observation."""
        rows = []
        for p in self.points:
            fitted = self.fit.predict(p.x)
            rows.append([p.x, p.y, fitted, p.y - fitted])
        for p in self.extrapolated:
            rows.append([p.x, None, p.y, None])
        return rows


class DepthAnalysis(BaseModel):
    """Pool-depth accounting: relevant docs identified and newly discovered per depth."""
    depths: List[int]
    identified: List[int]
    new: List[int]
    pool_size: List[int]
    relevant_fraction: List[Optional[float]]
    known_total: int
    identified_curve: CoverageCurve
    new_curve: CoverageCurve
    extrapolate_to: int
    # share of known-or-identified relevant docs held by the known qrels at the horizon
    known_share_at_horizon: Optional[float] = None


# --- Study results ---

class BucketResult(BaseModel):
    p_min: float
    p_max: float
    n_pairs: int
    partial_tau: Optional[float] = None
    error_rate: Optional[float] = None
    concordance: Optional[float] = None


class SwapPoint(BaseModel):
    system: str
    score: float
    rank: int


class SelectorResult(BaseModel):
    selector: str
    tau: float
    error_rate: float
    all_ties: bool = False
    fallback_queries: int = 0
    skipped_queries: int = 0
    buckets: List[BucketResult] = Field(default_factory=list)
    scores: List[SwapPoint] = Field(default_factory=list)


class PolicyResult(BaseModel):
    policy: str
    tau: float
    error_rate: float
    tau_std: Optional[float] = None
    trials: Optional[int] = None
    all_ties: bool = False
    fallback_queries: int = 0
    buckets: List[BucketResult] = Field(default_factory=list)
    selectors: List[SelectorResult] = Field(default_factory=list)


class SelectionStudy(BaseModel):
    metric: str
    seed: Optional[int] = None
    reference: List[Tuple[str, float]]
    bucket_edges: List[Tuple[float, float]]
    policies: List[PolicyResult]


class StabilityPoint(BaseModel):
    fraction: float
    p_min: float
    p_max: float
    n_pairs: int
    partial_tau: Optional[float] = None
    error_rate: Optional[float] = None
    concordance: Optional[float] = None


class StabilityCurve(BaseModel):
    """Mean partial-τ per (annotation fraction, bucket), averaged over selectors and repetitions."""
    metric: str
    seed: int
    fractions: List[float]
    selectors: List[str]
    repetitions: int = 1
    annotated: List[int] = Field(default_factory=list)
    unseeded_queries: int = 0
    points: List[StabilityPoint] = Field(default_factory=list)

    @field_validator("fractions")
    @classmethod
    def _fractions(cls, fractions: List[float]) -> List[float]:
        if any(not 0.0 < f <= 1.0 for f in fractions):
            raise ValueError("fractions must lie in (0, 1]")
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ValueError("fractions must be strictly ascending")
        return fractions

    def at(self, fraction: float, p_min: float) -> StabilityPoint:
        for point in self.points:
            if point.fraction == fraction and point.p_min == p_min:
                return point
        raise KeyError((fraction, p_min))


# --- CLI ---

class Subcommand(str, Enum):
    EVALUATE = "evaluate"
    RANK_COMPARE = "rank-compare"
    SIMULATE_SELECTION = "simulate-selection"
    SIMULATE_INCREMENTAL = "simulate-incremental"
    POOLING = "pooling"
    SYNTH = "synth"
    STATS = "stats"


class CliConfig(BaseModel):
    """Validated settings for one CLI invocation."""
    subcommand: Subcommand
    runs: List[str] = Field(default_factory=list)
    qrels: Optional[str] = None
    candidate_qrels: Optional[str] = None
    pool_qrels: Optional[str] = None
    meta: Optional[str] = None
    dmerit: Optional[str] = None
    metrics: List[str] = Field(default_factory=lambda: ["recall@20"])
    cutoffs: List[int] = Field(default_factory=lambda: [20])
    buckets: str = "0-0.01,0.01-0.05,0.05-1"
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    seed: Optional[int] = Field(default=None, ge=0)
    trials: int = Field(default=1000, ge=1)
    repetitions: int = Field(default=1, ge=1)
    fractions: List[float] = Field(default_factory=list)
    policies: List[str] = Field(default_factory=list)
    selectors: List[str] = Field(default_factory=list)
    fallback: Literal["fallback", "skip"] = "fallback"
    pool_depth: int = Field(default=10, ge=1)
    depths: List[int] = Field(default_factory=list)
    t_max: int = Field(default=100, ge=2)
    extrapolate_to: int = Field(default=100, ge=1)
    coverage_mode: Literal["exact", "monte_carlo"] = "exact"
    samples: int = Field(default=10000, ge=1)
    strict: bool = True
    output_dir: str = "."
    format: Literal["csv", "json", "both"] = "both"
    full_precision: bool = False
    jobs: int = Field(default=1, ge=1)
    synth: Dict[str, Any] = Field(default_factory=dict)
