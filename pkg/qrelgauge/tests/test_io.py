import io

import pytest

from qrelgauge.error_handler import (
    ConflictingGrade,
    ConflictingMeta,
    DuplicateDoc,
    MixedRunTags,
    ParseError,
    RangeError,
    SchemaError,
)
from qrelgauge.models import DocMeta
from qrelgauge.tools.io import (
    describe_qrels,
    emit_doc_meta,
    emit_qrels,
    emit_run,
    ingest_dmerit,
    parse_doc_meta,
    parse_qrels,
    parse_run,
)
from qrelgauge.tools.simulation import SynthConfig, synth_generate


def lines(text):
    return io.StringIO(text)


def test_parse_run_single_line():
    run, diagnostics = parse_run(lines("q1 Q0 d7 1 12.5 bm25\n"))
    assert run.system_id == "bm25"
    assert run.rankings == {"q1": (("d7", 12.5),)}
    assert diagnostics.lines_accepted == 1


def test_parse_run_ignores_file_ranks_and_canonicalizes():
    text = "q1 Q0 a 1 1.0 t\nq1 Q0 b 2 2.0 t\nq1 Q0 c 3 2.0 t\n"
    run, _ = parse_run(lines(text))
    assert [docid for docid, _ in run.rankings["q1"]] == ["c", "b", "a"]


def test_parse_run_duplicate_doc():
    with pytest.raises(DuplicateDoc):
        parse_run(lines("q1 Q0 d7 1 1.0 t\nq1 Q0 d7 2 0.5 t\n"))


def test_parse_run_mixed_tags():
    with pytest.raises(MixedRunTags):
        parse_run(lines("q1 Q0 a 1 1.0 t1\nq1 Q0 b 2 0.5 t2\n"))


def test_parse_run_bad_score_strict_and_lenient():
    text = "q1 Q0 a 1 high t\nq1 Q0 b 2 0.5 t\n"
    with pytest.raises(ParseError) as excinfo:
        parse_run(lines(text), strict=True)
    assert excinfo.value.line_number == 1

    run, diagnostics = parse_run(lines(text), strict=False)
    assert run.rankings["q1"] == (("b", 0.5),)
    assert diagnostics.lines_skipped == 1
    assert diagnostics.warnings and diagnostics.warnings[0][0] == 1
    assert diagnostics.lines_accepted + diagnostics.lines_skipped == diagnostics.lines_read


def test_parse_run_rejects_non_finite_score():
    with pytest.raises(ParseError):
        parse_run(lines("q1 Q0 a 1 nan t\n"), strict=True)


def test_parse_run_tolerates_crlf_blank_lines_and_trailing_space():
    clean, _ = parse_run(lines("q1 Q0 a 1 2.0 t\nq1 Q0 b 2 1.0 t\n"))
    messy, _ = parse_run(lines("q1 Q0 a 1 2.0 t  \r\n\r\n   \nq1 Q0 b 2 1.0 t\t\r\n"))
    assert messy == clean


def test_empty_run_gets_default_id_and_warning():
    run, diagnostics = parse_run(lines(""), default_system_id="bm25")
    assert run.system_id == "bm25"
    assert run.rankings == {}
    assert diagnostics.warnings


def test_run_round_trip_on_large_generated_run():
    cfg = SynthConfig(n_systems=1, n_queries=1000, evidence_min=5, evidence_max=10,
                      corpus_size=5000, distractors=100, depth=100, seed=3)
    _, runset, _ = synth_generate(cfg)
    (run,) = runset.runs
    text = emit_run(run)
    assert text.count("\n") == 100_000
    parsed, _ = parse_run(lines(text))
    assert parsed == run
    assert emit_run(parsed) == text


def test_parse_qrels():
    qrels, _ = parse_qrels(lines("q1 0 d7 1\n"))
    assert qrels.entries == {"q1": {"d7": 1}}


def test_parse_qrels_conflicting_grade():
    with pytest.raises(ConflictingGrade):
        parse_qrels(lines("q1 0 d7 0\nq1 0 d7 1\n"))


def test_parse_qrels_merges_equal_duplicates():
    qrels, diagnostics = parse_qrels(lines("q1 0 d7 1\nq1 0 d7 1\n"))
    assert qrels.entries == {"q1": {"d7": 1}}
    assert len(diagnostics.warnings) == 1


def test_parse_qrels_empty_file():
    qrels, diagnostics = parse_qrels(lines(""))
    assert len(qrels) == 0
    assert diagnostics.warnings


def test_parse_qrels_negative_grade_lenient():
    qrels, diagnostics = parse_qrels(lines("q1 0 a -1\nq1 0 b 1\n"), strict=False)
    assert qrels.entries == {"q1": {"b": 1}}
    assert diagnostics.lines_skipped == 1


def test_qrels_round_trip(tiny_qrels):
    text = emit_qrels(tiny_qrels)
    parsed, _ = parse_qrels(lines(text))
    assert parsed == tiny_qrels
    assert emit_qrels(parsed) == text


def test_describe_qrels(tiny_qrels):
    stats = describe_qrels(tiny_qrels)
    assert stats.n_queries == 2
    assert stats.total_relevant == 6
    assert stats.min_relevant == 2
    assert stats.median_relevant == 3.0
    assert stats.max_relevant == 4


def test_parse_doc_meta_with_header():
    meta = parse_doc_meta(lines("docid\tpopularity\tlength\nd1\t600\t48\n"))
    assert meta.entries == {"d1": (600, 48)}


def test_parse_doc_meta_errors():
    with pytest.raises(ConflictingMeta):
        parse_doc_meta(lines("d1\t600\t48\nd1\t601\t48\n"))
    with pytest.raises(RangeError):
        parse_doc_meta(lines("d1\t-3\t48\n"))
    with pytest.raises(ParseError):
        parse_doc_meta(lines("d1\t600\t48\nd2\tmany\n"), strict=True)
    assert len(parse_doc_meta(lines("d1\t600\t48\nd2\tmany\n"), strict=False)) == 1


def test_doc_meta_round_trip():
    meta = DocMeta({"d2": (9, 120), "d1": (600, 48)})
    assert parse_doc_meta(lines(emit_doc_meta(meta))) == meta


def test_ingest_dmerit():
    record = '{"query_id":"q1","query":"names of rivers","evidence":["p1","p2"],"extra":3}\n'
    qrels, texts = ingest_dmerit(lines(record))
    assert qrels.entries == {"q1": {"p1": 1, "p2": 1}}
    assert texts == {"q1": "names of rivers"}


def test_ingest_dmerit_warns_on_short_evidence_lists():
    from qrelgauge.tools.io import ParseDiagnostics

    diagnostics = ParseDiagnostics()
    ingest_dmerit(lines('{"query_id":"q1","query":"x","evidence":["p1"]}\n'), diagnostics)
    assert any("only 1 evidence" in message for _, message in diagnostics.warnings)


def test_ingest_dmerit_schema_errors():
    with pytest.raises(SchemaError) as excinfo:
        ingest_dmerit(lines('{"query_id":"q1","query":"x","evidence":["p1"]}\n{"query":"y","evidence":[]}\n'))
    assert "line 2" in str(excinfo.value)
    with pytest.raises(SchemaError):
        ingest_dmerit(lines("not json\n"))
    with pytest.raises(SchemaError):
        ingest_dmerit(lines('{"query_id":"q1","query":"x","evidence":["a"]}\n'
                            '{"query_id":"q1","query":"x","evidence":["b"]}\n'))
