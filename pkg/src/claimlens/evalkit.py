"""Evaluation harness: Recall@5 per (topic, entity-type) cell for the
pipeline and the retrieval baseline, extraction precision with and without
the DST gates, classifier accuracies, segmentation accuracy and runtime
percentiles.

Metrics that are undefined (no gold values, no confirmed keywords, or a
baseline Date cell) are reported as absent and rendered "-", never as 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bundle import ModelBundle
from .corpus.io import write_records
from .corpus.model import EntityType, GoldCase, ReportSchema
from .filtering.data import negation_examples, question_examples
from .filtering.negation import classify_negation
from .filtering.question import classify_question
from .linking import KbIndex
from .recommend import SuggestionList, retrieval_baseline_suggest, suggest_for_field
from .segmentation import SegmenterConfig, StandardQuestionSet, segment_dialogue
from .tracker import KeywordRecord, KeywordState, PipelineConfig, SessionState, Tracker


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentToggles:
    dst_enabled: bool = True
    baseline_enabled: bool = True
    modes: tuple[str, ...] = ("single", "mtl", "adv_mtl")
    qid_mode: str = "adv_mtl"


@dataclass
class EvalReport:
    recall_pipeline: dict[tuple[str, str], float | None]
    recall_baseline: dict[tuple[str, str], float | None]
    precision_with_dst: dict[str, float | None]
    precision_without_dst: dict[str, float | None]
    question_accuracy: dict[str, float]
    negation_accuracy: float | None
    segmentation_accuracy: float | None
    latency_ms: dict[str, float] = field(default_factory=dict)
    n_dialogues: int = 0


# -- metric primitives --

def recall_counts(suggestions: dict[str, SuggestionList],
                  gold_report: dict[str, list[str]]) -> tuple[int, int]:
    hits = total = 0
    for field_id, gold_values in gold_report.items():
        total += len(gold_values)
        got = suggestions.get(field_id)
        candidates = set(got.candidates) if got else set()
        hits += sum(1 for v in gold_values if v in candidates)
    return hits, total


def recall_at_5(suggestions: dict[str, SuggestionList],
                gold_report: dict[str, list[str]]) -> float | None:
    """Fraction of gold field values present in that field's top five;
    None (absent) when there are no gold values at all."""
    hits, total = recall_counts(suggestions, gold_report)
    if total == 0:
        return None
    return hits / total


def gold_values_by_etype(case: GoldCase, schema: ReportSchema) -> dict[EntityType, set[str]]:
    out: dict[EntityType, set[str]] = {et: set() for et in EntityType}
    for topic, fspec in schema.fields():
        out[fspec.etype].update(case.gold_report.get(fspec.field_id, ()))
    return out


def precision_counts(confirmed: list[KeywordRecord], case: GoldCase,
                     schema: ReportSchema, etype: EntityType) -> tuple[int, int]:
    gold = gold_values_by_etype(case, schema)[etype]
    records = [r for r in confirmed if r.etype == etype
               and r.state == KeywordState.CONFIRMED]
    return sum(1 for r in records if r.value in gold), len(records)


def extraction_precision(confirmed: list[KeywordRecord], case: GoldCase,
                         schema: ReportSchema, etype: EntityType) -> float | None:
    """Fraction of confirmed keywords of a type whose value belongs in the
    dialogue's report; None when nothing of that type was confirmed."""
    hits, total = precision_counts(confirmed, case, schema, etype)
    if total == 0:
        return None
    return hits / total


# -- the experiment --

def _run_pipeline(tracker: Tracker, case: GoldCase,
                  timings: list[float] | None = None) -> SessionState:
    state = SessionState()
    for utt in case.dialogue.utterances:
        t0 = time.perf_counter()
        tracker.process_utterance(state, utt)
        if timings is not None:
            timings.append((time.perf_counter() - t0) * 1000.0)
    return state


def run_experiment(
    corpus: list[GoldCase],
    bundle: ModelBundle,
    schema: ReportSchema,
    sq: StandardQuestionSet,
    index: KbIndex,
    toggles: ExperimentToggles | None = None,
) -> EvalReport:
    toggles = toggles or ExperimentToggles()
    bundle.require(toggles.qid_mode)
    train_ids = set(bundle.metadata.get("train_case_ids", ()))
    overlap = train_ids & {c.dialogue.id for c in corpus}
    if overlap:
        raise EvalError(f"evaluation corpus overlaps the training split: "
                        f"{sorted(overlap)[:3]}...")

    def tracker_with(dst: bool) -> Tracker:
        return Tracker(sq=sq, tagger=bundle.tagger, qid=bundle.qid[toggles.qid_mode],
                       neg=bundle.neg, index=index,
                       config=PipelineConfig(qid_mode=toggles.qid_mode,
                                             dst_enabled=dst))

    cells = [(t.topic_id, f.etype) for t in schema.topics for f in t.fields]
    recall_hits = {c: 0 for c in cells}
    recall_total = {c: 0 for c in cells}
    base_hits = {c: 0 for c in cells}
    base_total = {c: 0 for c in cells}
    prec_hits = {et: 0 for et in EntityType}
    prec_total = {et: 0 for et in EntityType}
    prec_hits_nodst = {et: 0 for et in EntityType}
    prec_total_nodst = {et: 0 for et in EntityType}
    timings: list[float] = []

    main = tracker_with(toggles.dst_enabled)
    ablated = tracker_with(False)
    for case in corpus:
        state = _run_pipeline(main, case, timings)
        suggestions = {f.field_id: suggest_for_field(state, schema, f.field_id)
                       for _t, f in schema.fields()}
        for topic, fspec in schema.fields():
            gold = case.gold_report.get(fspec.field_id, [])
            cell = (topic.topic_id, fspec.etype)
            recall_total[cell] += len(gold)
            got = set(suggestions[fspec.field_id].candidates)
            recall_hits[cell] += sum(1 for v in gold if v in got)
            if toggles.baseline_enabled and fspec.etype != EntityType.DATE:
                text = " ".join(u.text for u in case.dialogue.utterances)
                baseline = retrieval_baseline_suggest(index, text, fspec.field_id,
                                                      fspec.etype)
                base_total[cell] += len(gold)
                got_b = set(baseline.candidates)
                base_hits[cell] += sum(1 for v in gold if v in got_b)
        confirmed = [r for r in state.ledger if r.state == KeywordState.CONFIRMED]
        for et in EntityType:
            h, t = precision_counts(confirmed, case, schema, et)
            prec_hits[et] += h
            prec_total[et] += t
        state_nodst = _run_pipeline(ablated, case)
        confirmed_nodst = [r for r in state_nodst.ledger
                           if r.state == KeywordState.CONFIRMED]
        for et in EntityType:
            h, t = precision_counts(confirmed_nodst, case, schema, et)
            prec_hits_nodst[et] += h
            prec_total_nodst[et] += t

    def rate(hits: int, total: int) -> float | None:
        return None if total == 0 else hits / total

    recall_pipeline = {(t, et.value): rate(recall_hits[(t, et)], recall_total[(t, et)])
                       for t, et in cells}
    recall_baseline = {}
    for t, et in cells:
        if not toggles.baseline_enabled or et == EntityType.DATE:
            recall_baseline[(t, et.value)] = None
        else:
            recall_baseline[(t, et.value)] = rate(base_hits[(t, et)], base_total[(t, et)])

    question_accuracy = {}
    qid_examples = question_examples(corpus)
    for mode in toggles.modes:
        if mode not in bundle.qid:
            continue
        model = bundle.qid[mode]
        hits = sum(1 for e in qid_examples
                   if classify_question(model, " ".join(e.tokens), e.topic)[1]
                   == bool(e.label))
        question_accuracy[mode] = hits / len(qid_examples) if qid_examples else 0.0

    neg_examples = negation_examples(corpus)
    negation_accuracy = None
    if neg_examples and bundle.neg is not None:
        hits = sum(1 for e in neg_examples
                   if classify_negation(bundle.neg, e.assessor_prev, e.claimant_prev,
                                        e.current)[1] == bool(e.label))
        negation_accuracy = hits / len(neg_examples)

    seg_hits = seg_total = 0
    for case in corpus:
        assignments = segment_dialogue(case.dialogue, sq, SegmenterConfig())
        for a in assignments:
            gold = case.gold_topics.get(a.utterance_index)
            seg_total += 1
            seg_hits += int(a.topic_id == gold)
    segmentation_accuracy = rate(seg_hits, seg_total)

    latency = {}
    if timings:
        arr = np.asarray(timings)
        latency = {"p50_ms": float(np.percentile(arr, 50)),
                   "p95_ms": float(np.percentile(arr, 95)),
                   "max_ms": float(arr.max()),
                   "events": int(arr.size)}

    return EvalReport(
        recall_pipeline=recall_pipeline,
        recall_baseline=recall_baseline,
        precision_with_dst={et.value: rate(prec_hits[et], prec_total[et])
                            for et in EntityType},
        precision_without_dst={et.value: rate(prec_hits_nodst[et], prec_total_nodst[et])
                               for et in EntityType},
        question_accuracy=question_accuracy,
        negation_accuracy=negation_accuracy,
        segmentation_accuracy=segmentation_accuracy,
        latency_ms=latency,
        n_dialogues=len(corpus),
    )


# -- serialization and rendering --

def report_records(report: EvalReport, schema: ReportSchema) -> list[dict]:
    """Deterministic part of the report (runtime stats excluded), one
    record per metric value."""
    records: list[dict] = []
    for topic in schema.topics:
        for fspec in topic.fields:
            key = (topic.topic_id, fspec.etype.value)
            for system, table in (("baseline", report.recall_baseline),
                                  ("pipeline", report.recall_pipeline)):
                records.append({"metric": "recall_at_5", "topic": topic.topic_id,
                                "etype": fspec.etype.value, "system": system,
                                "value": table[key]})
    for dst, table in ((True, report.precision_with_dst),
                       (False, report.precision_without_dst)):
        for et in EntityType:
            records.append({"metric": "extraction_precision", "etype": et.value,
                            "dst": dst, "value": table[et.value]})
    for mode in sorted(report.question_accuracy):
        records.append({"metric": "question_accuracy", "mode": mode,
                        "value": report.question_accuracy[mode]})
    records.append({"metric": "negation_accuracy", "value": report.negation_accuracy})
    records.append({"metric": "segmentation_accuracy",
                    "value": report.segmentation_accuracy})
    records.append({"metric": "n_dialogues", "value": report.n_dialogues})
    return records


def save_report(path, report: EvalReport, schema: ReportSchema) -> None:
    records = report_records(report, schema)
    if report.latency_ms:
        records = records + [{"metric": "latency", **report.latency_ms}]
    write_records(path, records)


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{100 * value:.1f}"


def render_tables(report: EvalReport, schema: ReportSchema) -> str:
    """Aligned text tables: Recall@5 in the topic-by-type grid (split in
    two halves), then the DST ablation and accuracy blocks."""
    lines: list[str] = []
    halves = [schema.topics[:3], schema.topics[3:]]
    for half_index, topics in enumerate(halves):
        if not topics:
            continue
        cols = [(t, f.etype) for t in topics for f in t.fields]
        headers = ["System"] + [f"{t.display_name}/{et.value}" for t, et in cols]
        rows = [
            ["Retrieval"] + [_fmt(report.recall_baseline[(t.topic_id, et.value)])
                             for t, et in cols],
            ["Pipeline"] + [_fmt(report.recall_pipeline[(t.topic_id, et.value)])
                            for t, et in cols],
        ]
        widths = [max(len(h), *(len(r[i]) for r in rows))
                  for i, h in enumerate(headers)]
        lines.append(f"Recall@5 (%), part {half_index + 1}")
        lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
        for row in rows:
            lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
        lines.append("")
    lines.append("Extraction precision (%)")
    header = ["Condition"] + [et.value for et in EntityType]
    with_row = ["with DST"] + [_fmt(report.precision_with_dst[et.value])
                               for et in EntityType]
    wo_row = ["w/o DST"] + [_fmt(report.precision_without_dst[et.value])
                            for et in EntityType]
    widths = [max(len(a), len(b), len(c))
              for a, b, c in zip(header, with_row, wo_row)]
    for row in (header, wo_row, with_row):
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    lines.append("")
    lines.append("Question identification accuracy (%)")
    for mode in ("single", "mtl", "adv_mtl"):
        if mode in report.question_accuracy:
            lines.append(f"  {mode:8s} {100 * report.question_accuracy[mode]:.1f}")
    if report.negation_accuracy is not None:
        lines.append(f"Negation accuracy (%): {100 * report.negation_accuracy:.1f}")
    if report.segmentation_accuracy is not None:
        lines.append(f"Segmentation accuracy (%): "
                     f"{100 * report.segmentation_accuracy:.1f}")
    if report.latency_ms:
        lines.append(f"Latency: p50 {report.latency_ms['p50_ms']:.2f} ms, "
                     f"p95 {report.latency_ms['p95_ms']:.2f} ms over "
                     f"{report.latency_ms['events']} events")
    return "\n".join(lines)
