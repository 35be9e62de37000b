import json
from pathlib import Path

import numpy as np
import pytest

from claimlens.corpus import (
    EntityType,
    GoldCase,
    NoiseConfig,
    default_kb,
    default_schema,
    generate_corpus,
)
from claimlens.evalkit import (
    EvalError,
    ExperimentToggles,
    extraction_precision,
    gold_values_by_etype,
    recall_at_5,
    render_tables,
    report_records,
    run_experiment,
)
from claimlens.linking import LinkMethod, LinkResult
from claimlens.recommend import SuggestionList
from claimlens.tracker import KeywordRecord, KeywordState

FIXTURES = Path(__file__).parent / "fixtures"


def suggestion(field_id, *candidates):
    return SuggestionList(field_id=field_id, candidates=tuple(candidates),
                          source="pipeline")


class TestRecallAt5:
    def test_half(self):
        gold = {"f1": ["A"], "f2": ["B"]}
        suggestions = {"f1": suggestion("f1", "A"), "f2": suggestion("f2", "X")}
        assert recall_at_5(suggestions, gold) == 0.5

    def test_all_found(self):
        gold = {"f1": ["A", "B"], "f2": ["C"]}
        suggestions = {"f1": suggestion("f1", "B", "A"), "f2": suggestion("f2", "C")}
        assert recall_at_5(suggestions, gold) == 1.0

    def test_empty_suggestions(self):
        gold = {"f1": ["A"]}
        assert recall_at_5({}, gold) == 0.0

    def test_empty_gold_is_absent_not_zero(self):
        assert recall_at_5({"f1": suggestion("f1", "A")}, {"f1": []}) is None


def record(value, etype, state=KeywordState.CONFIRMED):
    return KeywordRecord(record_id=0, value=value, etype=etype,
                         topic="disease_history", utterance_index=0, state=state,
                         link=LinkResult(None, value, 1.0, LinkMethod.PASSTHROUGH))


def case_with_report(report):
    from claimlens.corpus import Dialogue, Speaker, Utterance
    return GoldCase(
        dialogue=Dialogue(id="x", utterances=(Utterance(0, Speaker.ASSESSOR, "hi"),)),
        gold_spans=(), gold_topics={0: None}, gold_questions={0: False},
        gold_negations={0: False}, gold_report=report)


class TestExtractionPrecision:
    def test_all_match(self, schema):
        case = case_with_report({"disease_history_hos": ["Qilu Hospital"]})
        confirmed = [record("Qilu Hospital", EntityType.HOS)]
        assert extraction_precision(confirmed, case, schema, EntityType.HOS) == 1.0

    def test_two_of_three(self, schema):
        case = case_with_report(
            {"disease_history_hos": ["Qilu Hospital", "Lakeshore Hospital"]})
        confirmed = [record("Qilu Hospital", EntityType.HOS),
                     record("Lakeshore Hospital", EntityType.HOS),
                     record("Mercy General Hospital", EntityType.HOS)]
        assert extraction_precision(confirmed, case, schema, EntityType.HOS) \
            == pytest.approx(2 / 3)

    def test_none_confirmed_is_absent(self, schema):
        case = case_with_report({"disease_history_hos": ["Qilu Hospital"]})
        assert extraction_precision([], case, schema, EntityType.HOS) is None

    def test_gold_union_covers_all_fields_of_type(self, schema):
        case = case_with_report({"disease_history_hos": ["Qilu Hospital"],
                                 "diagnostic_record_hos": ["Lakeshore Hospital"]})
        gold = gold_values_by_etype(case, schema)[EntityType.HOS]
        assert gold == {"Qilu Hospital", "Lakeshore Hospital"}


@pytest.fixture(scope="module")
def clean_negation_corpus(schema, kb):
    # the ablation corpus: negation-heavy, noise-free so the exact-match
    # gazetteer extracts every probed distractor
    return generate_corpus(schema, kb, 10, 0.5,
                           NoiseConfig(char_error_rate=0.0, seed=42), seed=42)


@pytest.fixture(scope="module")
def eval_report(seed42_corpus, bundle, schema, sq, kb_index):
    return run_experiment(seed42_corpus, bundle, schema, sq, kb_index)


class TestRunExperiment:
    def test_ablation_direction(self, clean_negation_corpus, bundle, schema, sq,
                                kb_index):
        report = run_experiment(clean_negation_corpus, bundle, schema, sq, kb_index)
        for etype in ("Hos", "Dis"):
            with_dst = report.precision_with_dst[etype]
            without = report.precision_without_dst[etype]
            assert with_dst is not None and without is not None
            assert with_dst > without, etype

    def test_dst_toggle_only_moves_pipeline_metrics(self, seed42_corpus, bundle,
                                                    schema, sq, kb_index):
        on = run_experiment(seed42_corpus, bundle, schema, sq, kb_index,
                            ExperimentToggles(dst_enabled=True))
        off = run_experiment(seed42_corpus, bundle, schema, sq, kb_index,
                             ExperimentToggles(dst_enabled=False))
        assert on.question_accuracy == off.question_accuracy
        assert on.negation_accuracy == off.negation_accuracy
        assert on.segmentation_accuracy == off.segmentation_accuracy
        assert on.recall_pipeline != off.recall_pipeline

    def test_train_test_overlap_rejected(self, train_corpus, bundle, schema, sq,
                                         kb_index):
        with pytest.raises(EvalError, match="overlap"):
            run_experiment(train_corpus[:2], bundle, schema, sq, kb_index)

    def test_baseline_date_cells_are_dashes(self, eval_report, schema):
        for (topic, etype), value in eval_report.recall_baseline.items():
            if etype == "Date":
                assert value is None
        text = render_tables(eval_report, schema)
        header_cols = [c for c in text.splitlines()[1].split("  ") if c.strip()]
        retrieval_row = text.splitlines()[2]
        assert "-" in retrieval_row

    def test_aggregation_is_order_independent(self, seed42_corpus, bundle, schema,
                                              sq, kb_index):
        report_fwd = run_experiment(seed42_corpus, bundle, schema, sq, kb_index)
        shuffled = list(seed42_corpus)
        np.random.default_rng(3).shuffle(shuffled)
        report_shuf = run_experiment(shuffled, bundle, schema, sq, kb_index)
        assert report_records(report_fwd, schema) == report_records(report_shuf, schema)

    def test_oracle_equivalence_on_seed42(self, seed42_corpus, bundle, schema, sq,
                                          kb_index):
        # brute-force recount per dialogue, independently of the harness
        from claimlens.recommend import suggest_for_field
        from claimlens.tracker import PipelineConfig, SessionState, Tracker

        tracker = Tracker(sq=sq, tagger=bundle.tagger, qid=bundle.qid["adv_mtl"],
                          neg=bundle.neg, index=kb_index, config=PipelineConfig())
        for case in seed42_corpus:
            state = SessionState()
            for utt in case.dialogue.utterances:
                tracker.process_utterance(state, utt)
            suggestions = {f.field_id: suggest_for_field(state, schema, f.field_id)
                           for _t, f in schema.fields()}
            got = recall_at_5(suggestions, case.gold_report)
            hits = total = 0
            for fid, values in case.gold_report.items():
                total += len(values)
                hits += sum(1 for v in values if v in suggestions[fid].candidates)
            assert got == (None if total == 0 else hits / total)
            confirmed = [r for r in state.ledger if r.state == KeywordState.CONFIRMED]
            for etype in EntityType:
                gold = set()
                for topic, fspec in schema.fields():
                    if fspec.etype == etype:
                        gold |= set(case.gold_report.get(fspec.field_id, ()))
                mine = [r for r in confirmed if r.etype == etype]
                expected = (None if not mine
                            else sum(1 for r in mine if r.value in gold) / len(mine))
                assert extraction_precision(confirmed, case, schema, etype) == expected

    def test_golden_report_regression(self, eval_report, schema):
        golden = FIXTURES / "golden_report.jsonl"
        got = json.dumps(report_records(eval_report, schema), sort_keys=True)
        if not golden.exists():
            pytest.fail("golden report fixture missing; regenerate with "
                        "scripts in tests/fixtures")
        expected = json.dumps(json.loads(golden.read_text()), sort_keys=True)
        assert got == expected

    def test_latency_collected(self, eval_report):
        assert eval_report.latency_ms["events"] > 0
        assert eval_report.latency_ms["p95_ms"] >= eval_report.latency_ms["p50_ms"]
