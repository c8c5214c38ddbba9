"""
Command-line entry point: one subcommand per analysis.

Every command computes all of its outputs in memory first and writes them only
once nothing failed, so an error never leaves partial reports behind.
"""

import argparse
import glob
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import orjson

from .error_handler import ConfigError, MissingMeta, handle_error
from .models import DocMeta, Qrels, RunSet
from .schemas import CliConfig, Report, Subcommand
from .shared_libraries.config import config, parse_float_list, validate_config
from .shared_libraries.rng import choose_seed
from .tools.io import (
    describe_qrels,
    emit_doc_meta,
    emit_qrels,
    emit_run,
    ingest_dmerit,
    parse_doc_meta,
    parse_qrels,
    parse_run,
    render_report,
)
from .tools.metrics import MetricKind, MetricSpec, evaluate
from .tools.pooling import depth_analysis, extrapolate_systems
from .tools.rankstats import (
    concordance,
    discordant_pairs,
    error_rate,
    parse_buckets,
    significance_relation,
)
from .tools.simulation import (
    FallbackMode,
    RankingComparator,
    SelectionPolicy,
    SynthConfig,
    default_policies,
    incremental_study,
    single_relevant_study,
    synth_generate,
)

logger = logging.getLogger(__name__)

EVALUATE_METRICS = ["recall", "ndcg", "map", "r_precision"]
DEFAULT_DEPTHS = list(range(0, 21))


@dataclass
class CommandOutput:
    """Everything a command produces: reports, extra files (relative paths) and stdout text."""
    reports: List[Tuple[str, Report]] = field(default_factory=list)
    files: Dict[str, str] = field(default_factory=dict)
    stdout: str = ""


# --- Input loading ---

def _expand_run_paths(specs: Sequence[str]) -> List[Path]:
    paths: List[Path] = []
    for spec in specs:
        path = Path(spec)
        if path.is_dir():
            found = sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith("."))
        elif glob.has_magic(spec):
            found = [Path(p) for p in sorted(glob.glob(spec)) if Path(p).is_file()]
        else:
            if not path.is_file():
                raise FileNotFoundError(f"run file not found: {spec}")
            found = [path]
        if not found:
            raise FileNotFoundError(f"no run files match {spec}")
        paths.extend(found)
    return paths


def load_runs(specs: Sequence[str], strict: bool) -> RunSet:
    """Read every run file named by paths, directories or globs."""
    if not specs:
        raise ConfigError("at least one run is required (--runs)")
    runs = []
    for path in _expand_run_paths(specs):
        with open(path, encoding="utf-8") as stream:
            run, _ = parse_run(stream, strict=strict, default_system_id=path.stem, source=str(path))
        runs.append(run)
    runset = RunSet.build(runs, strict=strict)
    logger.info(f"Loaded {len(runset)} runs over {len(runset.query_universe)} queries")
    return runset


def load_qrels(path: str, strict: bool) -> Qrels:
    with open(path, encoding="utf-8") as stream:
        qrels, _ = parse_qrels(stream, strict=strict, source=path)
    return qrels


def load_judgments(cfg: CliConfig) -> Qrels:
    """Full qrels from --qrels, or from the JSONL dataset given with --dmerit."""
    if cfg.qrels:
        return load_qrels(cfg.qrels, cfg.strict)
    if cfg.dmerit:
        with open(cfg.dmerit, encoding="utf-8") as stream:
            qrels, _ = ingest_dmerit(stream)
        return qrels
    raise ConfigError(f"{cfg.subcommand.value} needs --qrels or --dmerit")


def load_meta(cfg: CliConfig) -> Optional[DocMeta]:
    if not cfg.meta:
        return None
    with open(cfg.meta, encoding="utf-8") as stream:
        return parse_doc_meta(stream, strict=cfg.strict)


def expand_metrics(names: Sequence[str], cutoffs: Sequence[int]) -> List[MetricSpec]:
    """``recall@20`` stays as is; a bare ``recall`` expands over every cutoff."""
    specs: List[MetricSpec] = []
    bare: List[MetricKind] = []
    for name in names:
        spec = MetricSpec.parse(name) if "@" in name else None
        if spec is not None:
            specs.append(spec)
            continue
        if name.strip().lower() in ("r_precision", "rprec", "r-precision"):
            specs.append(MetricSpec.parse(name))
            continue
        bare.append(MetricSpec.parse(f"{name}@1").kind)
    grouped = [MetricSpec(kind, k) for k in cutoffs for kind in bare]
    # explicit cutoffs first, then one column group per cutoff, R-precision last
    ordered = [s for s in specs if s.k is not None] + grouped + [s for s in specs if s.k is None]
    unique = list(dict.fromkeys(ordered))
    if not unique:
        raise ConfigError("no metric requested")
    return unique


def _bucket_edges(cfg: CliConfig):
    buckets = parse_buckets(cfg.buckets)
    return buckets, [[b.p_min, b.p_max] for b in buckets]


# --- Commands ---

def cmd_evaluate(cfg: CliConfig) -> CommandOutput:
    runset = load_runs(cfg.runs, cfg.strict)
    qrels = load_judgments(cfg)
    specs = expand_metrics(cfg.metrics, cfg.cutoffs)
    matrices = [evaluate(runset, qrels, spec, strict=cfg.strict, jobs=cfg.jobs) for spec in specs]
    means = [matrix.means() for matrix in matrices]

    report = Report(
        title="evaluate",
        header={
            "metrics": [spec.label for spec in specs],
            "n_systems": len(runset),
            "n_queries": len(matrices[0].queries),
        },
    )
    report.add_table(
        "metrics",
        ["system"] + [spec.label for spec in specs],
        [[system] + [m[system] for m in means] for system in runset.system_ids],
    )
    return CommandOutput(reports=[("evaluate", report)])


def cmd_rank_compare(cfg: CliConfig) -> CommandOutput:
    if not cfg.candidate_qrels:
        raise ConfigError("rank-compare needs --candidate-qrels")
    runset = load_runs(cfg.runs, cfg.strict)
    reference_qrels = load_judgments(cfg)
    candidate_qrels = load_qrels(cfg.candidate_qrels, cfg.strict)
    buckets, edges = _bucket_edges(cfg)

    output = CommandOutput()
    for spec in expand_metrics(cfg.metrics, cfg.cutoffs):
        comparator = RankingComparator(runset, reference_qrels, spec, buckets, cfg.alpha, cfg.strict)
        matrix = comparator.candidate_matrix(candidate_qrels)
        comparison = comparator.compare_matrix(matrix)
        reference, candidate = comparator.reference, comparison.ranking
        overall = concordance(significance_relation(matrix, cfg.alpha), comparator.reference_relation)

        report = Report(
            title=f"rank-compare {spec.label}",
            header={"metric": spec.label, "alpha": cfg.alpha, "buckets": edges, "n_systems": len(runset)},
        )
        report.add_table(
            "summary",
            ["metric", "tau", "error_rate_pct", "concordance", "all_ties"],
            [[spec.label, comparison.tau, error_rate(comparison.tau), overall, comparison.all_ties]],
        )
        report.add_table(
            "buckets",
            ["p_min", "p_max", "n_pairs", "partial_tau", "error_rate_pct", "concordance", "status"],
            [
                [
                    b.bucket.p_min, b.bucket.p_max, b.n_pairs, b.partial_tau,
                    error_rate(b.partial_tau) if b.partial_tau is not None else None,
                    b.concordance, "empty" if b.partial_tau is None else "ok",
                ]
                for b in comparison.buckets
            ],
        )
        report.add_table(
            "rankings",
            ["system", "reference_score", "reference_rank", "candidate_score", "candidate_rank"],
            [
                [s, reference.score(s), reference.position(s), candidate.score(s), candidate.position(s)]
                for s in reference.systems
            ],
        )
        rows = []
        for higher, lower in discordant_pairs(candidate, reference):
            outcome = comparator.classification.outcome(higher, lower)
            rows.append([
                higher, lower,
                reference.score(higher) - reference.score(lower),
                candidate.score(higher) - candidate.score(lower),
                outcome.p_value,
            ])
        report.add_table(
            "discordant_pairs",
            ["reference_higher", "reference_lower", "reference_delta", "candidate_delta", "reference_p_value"],
            rows,
        )
        output.reports.append((f"rank_compare.{spec.label}", report))
    return output


def _policies(cfg: CliConfig, seed: int, meta: Optional[DocMeta]) -> List[SelectionPolicy]:
    if not cfg.policies:
        if meta is None:
            logger.warning("No --meta given; skipping the popularity and length policies")
        return default_policies(cfg.trials, seed, with_meta=meta is not None)
    policies = [SelectionPolicy.parse(name, trials=cfg.trials, seed=seed) for name in cfg.policies]
    if meta is None and any(p.needs_meta for p in policies):
        raise MissingMeta("the popularity and length policies need --meta")
    return policies


def cmd_simulate_selection(cfg: CliConfig) -> CommandOutput:
    runset = load_runs(cfg.runs, cfg.strict)
    qrels = load_judgments(cfg)
    meta = load_meta(cfg)
    buckets, edges = _bucket_edges(cfg)
    seed = choose_seed(cfg.seed)
    policies = _policies(cfg, seed, meta)

    output = CommandOutput()
    for spec in expand_metrics(cfg.metrics, cfg.cutoffs):
        study = single_relevant_study(
            runset, qrels, policies, spec, buckets,
            meta=meta, alpha=cfg.alpha, fallback=FallbackMode(cfg.fallback), strict=cfg.strict, jobs=cfg.jobs,
        )
        report = Report(
            title=f"single-relevant selection {spec.label}",
            header={
                "metric": spec.label,
                "seed": seed,
                "alpha": cfg.alpha,
                "buckets": edges,
                "trials": cfg.trials,
                "fallback": cfg.fallback,
                "policies": [p.label for p in policies],
                "n_systems": len(runset),
            },
        )
        report.add_table(
            "kendall_tau",
            ["selection", "tau", "error_rate_pct"],
            [[p.policy, p.tau, p.error_rate] for p in study.policies],
        )
        report.add_table(
            "detail",
            ["selection", "tau_std", "trials", "all_ties", "fallback_queries"],
            [[p.policy, p.tau_std, p.trials, p.all_ties, p.fallback_queries] for p in study.policies],
        )
        report.add_table(
            "buckets",
            ["selection", "p_min", "p_max", "n_pairs", "partial_tau", "error_rate_pct", "concordance"],
            [
                [p.policy, b.p_min, b.p_max, b.n_pairs, b.partial_tau, b.error_rate, b.concordance]
                for p in study.policies for b in p.buckets
            ],
        )
        selectors = [s for p in study.policies for s in p.selectors]
        report.add_table(
            "selectors",
            ["selector", "tau", "error_rate_pct", "all_ties", "fallback_queries", "skipped_queries"],
            [[s.selector, s.tau, s.error_rate, s.all_ties, s.fallback_queries, s.skipped_queries] for s in selectors],
        )
        # x = selector, series = system, y = score
        report.add_table(
            "swap_plot",
            ["selector", "system", "score", "rank"],
            [[s.selector, point.system, point.score, point.rank] for s in selectors for point in s.scores],
        )
        report.add_table(
            "reference",
            ["system", "score", "rank"],
            [[system, score, rank] for rank, (system, score) in enumerate(study.reference, start=1)],
        )
        output.reports.append((f"selection.{spec.label}", report))
    return output


def cmd_simulate_incremental(cfg: CliConfig) -> CommandOutput:
    runset = load_runs(cfg.runs, cfg.strict)
    qrels = load_judgments(cfg)
    buckets, edges = _bucket_edges(cfg)
    seed = choose_seed(cfg.seed)
    fractions = cfg.fractions or list(parse_float_list(config.simulation.fractions))

    output = CommandOutput()
    for spec in expand_metrics(cfg.metrics, cfg.cutoffs):
        curve = incremental_study(
            runset, qrels, buckets, spec,
            fractions=fractions, seed=seed, selectors=cfg.selectors or None, repetitions=cfg.repetitions,
            alpha=cfg.alpha, fallback=FallbackMode(cfg.fallback), strict=cfg.strict, jobs=cfg.jobs,
        )
        report = Report(
            title=f"incremental annotation {spec.label}",
            header={
                "metric": spec.label,
                "seed": seed,
                "alpha": cfg.alpha,
                "buckets": edges,
                "fractions": curve.fractions,
                "selectors": curve.selectors,
                "repetitions": curve.repetitions,
                "unseeded_queries": curve.unseeded_queries,
            },
        )
        report.add_table(
            "curve",
            ["fraction", "p_min", "p_max", "n_pairs", "partial_tau", "error_rate_pct", "concordance"],
            [
                [p.fraction, p.p_min, p.p_max, p.n_pairs, p.partial_tau, p.error_rate, p.concordance]
                for p in curve.points
            ],
        )
        report.add_table(
            "plot",
            ["x", "series", "y"],
            [[p.fraction, f"[{p.p_min:g},{p.p_max:g})", p.partial_tau] for p in curve.points],
        )
        report.add_table(
            "annotated",
            ["fraction", "annotated"],
            [[f, n] for f, n in zip(curve.fractions, curve.annotated)],
        )
        output.reports.append((f"incremental.{spec.label}", report))
    return output


def cmd_pooling(cfg: CliConfig) -> CommandOutput:
    runset = load_runs(cfg.runs, cfg.strict)
    qrels = load_judgments(cfg)
    seed = choose_seed(cfg.seed) if cfg.coverage_mode == "monte_carlo" else cfg.seed
    curve = extrapolate_systems(
        runset, qrels, cfg.pool_depth, cfg.t_max,
        mode=cfg.coverage_mode, samples=cfg.samples, seed=seed, strict=cfg.strict, jobs=cfg.jobs,
    )
    header = {"k": cfg.pool_depth, "t_max": cfg.t_max, "mode": cfg.coverage_mode, "n_systems": len(runset)}
    if cfg.coverage_mode == "monte_carlo":
        header.update(seed=seed, samples=cfg.samples)
    report = Report(title="pooling", header=header)
    report.add_table("coverage", ["x", "y", "fitted", "residual"], curve.rows())
    report.add_table(
        "fit",
        ["k", "systems", "coverage", "a", "b", "rmse", "max_error", "t_max", "predicted_at_t_max"],
        [[
            cfg.pool_depth, len(runset), curve.points[-1].y, curve.fit.a, curve.fit.b,
            curve.fit.rmse, curve.fit.max_error, cfg.t_max, curve.fit.predict(cfg.t_max),
        ]],
    )

    if cfg.pool_qrels:
        pool_qrels = load_qrels(cfg.pool_qrels, cfg.strict)
        analysis = depth_analysis(runset, qrels, pool_qrels, cfg.depths or DEFAULT_DEPTHS, cfg.extrapolate_to)
        report.header["depths"] = analysis.depths
        report.header["extrapolate_to"] = analysis.extrapolate_to
        report.add_table(
            "depth_counts",
            ["depth", "identified", "new", "pool_size", "relevant_fraction"],
            [list(row) for row in zip(analysis.depths, analysis.identified, analysis.new,
                                      analysis.pool_size, analysis.relevant_fraction)],
        )
        report.add_table("depth_identified", ["x", "y", "fitted", "residual"], analysis.identified_curve.rows())
        report.add_table("depth_new", ["x", "y", "fitted", "residual"], analysis.new_curve.rows())
        horizon = analysis.extrapolate_to
        report.add_table(
            "depth_fit",
            ["known_total", "horizon", "identified_at_horizon", "new_at_horizon",
             "known_share_at_horizon", "identified_rmse", "new_rmse"],
            [[
                analysis.known_total, horizon,
                analysis.identified_curve.fit.predict(horizon), analysis.new_curve.fit.predict(horizon),
                analysis.known_share_at_horizon,
                analysis.identified_curve.fit.rmse, analysis.new_curve.fit.rmse,
            ]],
        )
    return CommandOutput(reports=[("pooling", report)])


def cmd_synth(cfg: CliConfig) -> CommandOutput:
    seed = choose_seed(cfg.seed)
    try:
        synth = SynthConfig(seed=seed, **cfg.synth)
    except TypeError as e:
        raise ConfigError(f"invalid synthetic config: {e}") from e
    qrels, runset, meta = synth_generate(synth)

    files = {"qrels.txt": emit_qrels(qrels), "meta.tsv": emit_doc_meta(meta)}
    for run in runset:
        files[f"runs/{run.system_id}.run"] = emit_run(run)

    order = synth.quality_order()
    qualities = dict(zip(synth.system_ids(), synth.system_qualities()))
    report = Report(title="synth", header={"seed": seed, **cfg.synth})
    report.add_table(
        "quality",
        ["system", "quality", "rank"],
        [[system, qualities[system], rank] for rank, system in enumerate(order, start=1)],
    )
    stdout = "".join(f"{rank}\t{system}\t{qualities[system]:.6g}\n" for rank, system in enumerate(order, start=1))
    return CommandOutput(reports=[("synth", report)], files=files, stdout=stdout)


def cmd_stats(cfg: CliConfig) -> CommandOutput:
    stats = describe_qrels(load_judgments(cfg))
    report = Report(title="stats")
    report.add_table(
        "stats",
        ["n_queries", "total_relevant", "min_relevant", "median_relevant", "max_relevant"],
        [[stats.n_queries, stats.total_relevant, stats.min_relevant, stats.median_relevant, stats.max_relevant]],
    )
    stdout = (
        f"queries: {stats.n_queries}\nrelevant: {stats.total_relevant}\n"
        f"per query: min {stats.min_relevant}, median {stats.median_relevant:g}, max {stats.max_relevant}\n"
    )
    return CommandOutput(reports=[("stats", report)], stdout=stdout)


COMMANDS: Dict[Subcommand, Callable[[CliConfig], CommandOutput]] = {
    Subcommand.EVALUATE: cmd_evaluate,
    Subcommand.RANK_COMPARE: cmd_rank_compare,
    Subcommand.SIMULATE_SELECTION: cmd_simulate_selection,
    Subcommand.SIMULATE_INCREMENTAL: cmd_simulate_incremental,
    Subcommand.POOLING: cmd_pooling,
    Subcommand.SYNTH: cmd_synth,
    Subcommand.STATS: cmd_stats,
}


# --- Parser ---

def _jobs(text: str) -> int:
    if text == "max":
        return config.workers.max_jobs
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'max', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("jobs must be at least 1")
    return value


def _floats(text: str) -> List[float]:
    try:
        return list(parse_float_list(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", default=".", help="Directory for report files (default: current)")
    parser.add_argument("--format", choices=["csv", "json", "both"], default="both", help="Report format")
    parser.add_argument("--full-precision", action="store_true", default=config.report.full_precision,
                        help="Write floats with full precision instead of 6 significant digits")
    parser.add_argument("--jobs", type=_jobs, default=config.workers.jobs,
                        help="Worker count, or 'max' for one per CPU; results do not depend on it")
    parser.add_argument("--lenient", dest="strict", action="store_false", default=config.parsing.strict,
                        help="Skip malformed input lines with a warning (QRELGAUGE_STRICT=1 overrides)")


def _inputs(parser: argparse.ArgumentParser, runs: bool = True) -> None:
    if runs:
        parser.add_argument("--runs", nargs="+", required=True, help="Run files, directories or globs")
    parser.add_argument("--qrels", help="Qrels file (qid iter docid grade)")
    parser.add_argument("--dmerit", help="JSONL dataset with query_id, query, evidence")


def _metric_args(parser: argparse.ArgumentParser, default: Sequence[str]) -> None:
    parser.add_argument("--metric", dest="metrics", action="append",
                        help=f"recall@K, ndcg@K, map@K, r_precision, or a bare kind expanded over --k "
                             f"(repeatable; default {', '.join(default)})")
    parser.add_argument("--k", dest="cutoffs", type=int, nargs="+", help="Cutoffs for bare metric kinds (default 20)")
    parser.set_defaults(default_metrics=list(default))


def _study_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--buckets", default=config.analysis.buckets,
                        help=f"p-value buckets as pmin-pmax,... (default {config.analysis.buckets})")
    parser.add_argument("--alpha", type=float, default=config.analysis.alpha, help="Significance level")
    parser.add_argument("--seed", type=int, help="Seed; an auto-chosen seed is recorded in the report header")
    parser.add_argument("--fallback", choices=["fallback", "skip"], default=config.analysis.system_based_fallback,
                        help="System-based selection when the selector retrieved no relevant doc")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrelgauge",
        description="Evaluation-reliability analyses for retrieval benchmarks with partial relevance judgments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="Per-system metric table")
    _inputs(ev)
    _metric_args(ev, EVALUATE_METRICS)
    _common(ev)

    rc = sub.add_parser("rank-compare", help="Compare the reference ranking with one formed on other qrels")
    _inputs(rc)
    rc.add_argument("--candidate-qrels", required=True, help="Alternate qrels forming the candidate ranking")
    _metric_args(rc, ["recall@20"])
    _study_args(rc)
    _common(rc)

    ss = sub.add_parser("simulate-selection", help="Single-relevant selection study")
    _inputs(ss)
    ss.add_argument("--meta", help="Document metadata TSV (docid, popularity, length)")
    ss.add_argument("--policies", nargs="+",
                    help="random, most_popular, longest, shortest, system_based or system:<id> (default: all)")
    ss.add_argument("--trials", type=int, default=config.simulation.trials, help="Random-policy trials")
    _metric_args(ss, ["recall@20"])
    _study_args(ss)
    _common(ss)

    si = sub.add_parser("simulate-incremental", help="Ranking stability as annotation grows")
    _inputs(si)
    si.add_argument("--fractions", type=_floats, help="Ascending fractions in (0, 1] (default 0.01,0.02,0.05,0.1,...,1.0)")
    si.add_argument("--selectors", nargs="+", help="Selector systems (default: every system)")
    si.add_argument("--repetitions", type=int, default=config.simulation.repetitions,
                    help="Independent sampling repetitions per selector")
    _metric_args(si, ["recall@20"])
    _study_args(si)
    _common(si)

    po = sub.add_parser("pooling", help="Pool coverage and its extrapolation")
    _inputs(po)
    po.add_argument("--k", dest="pool_depth", type=int, default=10, help="Pool depth per system (default 10)")
    po.add_argument("--t-max", type=int, default=100, help="Extrapolate coverage to this many systems")
    po.add_argument("--coverage-mode", choices=["exact", "monte_carlo"], default="exact")
    po.add_argument("--samples", type=int, default=config.simulation.monte_carlo_samples,
                    help="Monte Carlo subset samples")
    po.add_argument("--seed", type=int, help="Monte Carlo seed")
    po.add_argument("--pool-qrels", help="Judgments of pooled documents, enables the depth analysis")
    po.add_argument("--depths", type=int, nargs="+", help="Pool depths for the depth analysis (default 0..20)")
    po.add_argument("--extrapolate-to", type=int, default=100, help="Depth to extrapolate the depth curves to")
    _common(po)

    sy = sub.add_parser("synth", help="Generate a synthetic benchmark with known system quality")
    sy.add_argument("--systems", dest="synth_n_systems", type=int, default=12)
    sy.add_argument("--queries", dest="synth_n_queries", type=int, default=200)
    sy.add_argument("--evidence-min", dest="synth_evidence_min", type=int, default=5)
    sy.add_argument("--evidence-max", dest="synth_evidence_max", type=int, default=40)
    sy.add_argument("--corpus-size", dest="synth_corpus_size", type=int, default=20000)
    sy.add_argument("--distractors", dest="synth_distractors", type=int, default=150)
    sy.add_argument("--depth", dest="synth_depth", type=int, default=100, help="Documents retrieved per query")
    sy.add_argument("--noise", dest="synth_noise", type=float, default=0.3)
    sy.add_argument("--popularity-bias", dest="synth_popularity_bias", type=float, default=0.0)
    sy.add_argument("--strict-ordering", dest="synth_strict_ordering", action="store_true")
    sy.add_argument("--seed", type=int, help="Generator seed; an auto-chosen seed is printed in the report")
    _common(sy)

    st = sub.add_parser("stats", help="Relevant-per-query statistics of a qrels file or JSONL dataset")
    _inputs(st, runs=False)
    _common(st)
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    """Validated CliConfig from parsed arguments."""
    values = {key: value for key, value in vars(args).items() if key in CliConfig.model_fields and value is not None}
    if args.command in ("evaluate", "rank-compare", "simulate-selection", "simulate-incremental"):
        values["metrics"] = args.metrics or args.default_metrics
    values["synth"] = {key[len("synth_"):]: value for key, value in vars(args).items() if key.startswith("synth_")}
    return CliConfig(subcommand=Subcommand(args.command), **values)


def _render(cfg: CliConfig, output: CommandOutput) -> Dict[Path, str]:
    root = Path(cfg.output_dir)
    rendered: Dict[Path, str] = {root / name: text for name, text in output.files.items()}
    for name, report in output.reports:
        for file_name, text in render_report(report, name, cfg.format, cfg.full_precision).items():
            rendered[root / file_name] = text
    return rendered


def run_command(cfg: CliConfig) -> CommandOutput:
    """Run one subcommand and write its outputs."""
    output = COMMANDS[cfg.subcommand](cfg)
    rendered = _render(cfg, output)
    for path, text in rendered.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {path}")
    return output


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command, return the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=config.logging.level.upper(), format=config.logging.format)

    try:
        issues = validate_config()
        if issues:
            raise ConfigError("invalid configuration: " + "; ".join(issues))
        cfg = config_from_args(args)
        output = run_command(cfg)
    except Exception as e:
        error = handle_error(e)
        sys.stderr.write(orjson.dumps(error.to_dict(), option=orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE).decode())
        return error.exit_code

    if output.stdout:
        sys.stdout.write(output.stdout)
    return 0
