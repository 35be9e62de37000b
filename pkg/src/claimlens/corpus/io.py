"""Versioned line-delimited file formats.

Every file starts with the header line `#claimlens-v1` followed by one JSON
record per line. Key order inside records is fixed so that save -> load ->
save round-trips byte-identically.

  transcript : {"index", "speaker", "text", "timestamp_ms"}
  kb         : {"id", "etype", "canonical", "aliases"}
  schema     : {"topic_id", "display_name", "fields": [{"field_id","etype"}]}
  gold case  : directory with transcript.jsonl + annotations.jsonl + report.jsonl
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .. import FORMAT_HEADER
from ..strings import edit_distance
from .model import (
    CorpusError,
    Dialogue,
    EntityType,
    FieldSpec,
    GoldCase,
    GoldSpan,
    KbEntry,
    ReportSchema,
    Speaker,
    TopicSpec,
    Utterance,
)

log = logging.getLogger(__name__)

MIN_KB_NAME_DISTANCE = 3


def read_records(path: str | Path) -> list[dict]:
    """Read a headered JSONL file; raises CorpusError with line numbers."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CorpusError(f"{path}: empty file (missing {FORMAT_HEADER} header)")
    if lines[0].strip() != FORMAT_HEADER:
        raise CorpusError(f"{path}: line 1: expected header {FORMAT_HEADER!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            records.append((lineno, json.loads(line)))
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: line {lineno}: malformed record: {exc}") from exc
    return records


def write_records(path: str | Path, records: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(FORMAT_HEADER + "\n")
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


# -- transcripts --

def load_transcript(path: str | Path, dialogue_id: str | None = None) -> Dialogue:
    """Load a transcript file. Indices in the file must be strictly
    increasing; they are re-numbered to 0..n-1 on load."""
    records = read_records(path)
    if not records:
        raise CorpusError(f"{path}: transcript has no utterances")
    utterances = []
    prev_index = None
    for lineno, rec in records:
        try:
            raw_index = int(rec["index"])
            speaker = Speaker(rec["speaker"])
            text = rec["text"]
            ts = rec.get("timestamp_ms")
        except (KeyError, ValueError) as exc:
            raise CorpusError(f"{path}: line {lineno}: bad utterance record: {exc}") from exc
        if prev_index is not None and raw_index <= prev_index:
            raise CorpusError(
                f"{path}: line {lineno}: non-monotone utterance index {raw_index}"
            )
        prev_index = raw_index
        try:
            utterances.append(
                Utterance(index=len(utterances), speaker=speaker, text=text,
                          timestamp_ms=ts if ts is None else int(ts))
            )
        except CorpusError as exc:
            raise CorpusError(f"{path}: line {lineno}: {exc}") from exc
    return Dialogue(id=dialogue_id or Path(path).stem, utterances=tuple(utterances))


def save_transcript(path: str | Path, dialogue: Dialogue) -> None:
    write_records(path, [
        {"index": u.index, "speaker": u.speaker.value, "text": u.text,
         "timestamp_ms": u.timestamp_ms}
        for u in dialogue.utterances
    ])


# -- knowledge base --

def load_kb(path: str | Path) -> list[KbEntry]:
    records = read_records(path)
    entries: list[KbEntry] = []
    seen: set[str] = set()
    for lineno, rec in records:
        try:
            etype = EntityType(rec["etype"])
        except (KeyError, ValueError) as exc:
            raise CorpusError(f"{path}: line {lineno}: bad etype: {exc}") from exc
        if etype == EntityType.DATE:
            raise CorpusError(
                f"{path}: line {lineno}: Date entries are rejected; date values "
                "are open-ended and cannot be enumerated in a KB"
            )
        entry_id = rec.get("id", "")
        if entry_id in seen:
            raise CorpusError(f"{path}: line {lineno}: duplicate KB id {entry_id!r}")
        seen.add(entry_id)
        try:
            entries.append(KbEntry(id=entry_id, etype=etype,
                                   canonical=rec["canonical"],
                                   aliases=tuple(rec.get("aliases", ()))))
        except CorpusError as exc:
            raise CorpusError(f"{path}: line {lineno}: {exc}") from exc
    _warn_close_canonicals(entries)
    return entries


def _warn_close_canonicals(entries: list[KbEntry]) -> None:
    by_type: dict[EntityType, list[KbEntry]] = {}
    for e in entries:
        by_type.setdefault(e.etype, []).append(e)
    for etype, group in by_type.items():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                d = edit_distance(a.canonical, b.canonical)
                if d < MIN_KB_NAME_DISTANCE:
                    log.warning(
                        "KB entries %s and %s (%s) have close canonical names "
                        "(edit distance %d < %d); fuzzy linking may confuse them",
                        a.id, b.id, etype.value, d, MIN_KB_NAME_DISTANCE,
                    )


def save_kb(path: str | Path, entries: list[KbEntry]) -> None:
    write_records(path, [
        {"id": e.id, "etype": e.etype.value, "canonical": e.canonical,
         "aliases": list(e.aliases)}
        for e in entries
    ])


# -- report schema --

def load_schema(path: str | Path) -> ReportSchema:
    records = read_records(path)
    topics = []
    for lineno, rec in records:
        try:
            fields = tuple(FieldSpec(field_id=f["field_id"], etype=EntityType(f["etype"]))
                           for f in rec["fields"])
            topics.append(TopicSpec(topic_id=rec["topic_id"],
                                    display_name=rec["display_name"], fields=fields))
        except (KeyError, ValueError) as exc:
            raise CorpusError(f"{path}: line {lineno}: bad topic record: {exc}") from exc
    return ReportSchema(topics=tuple(topics))


def save_schema(path: str | Path, schema: ReportSchema) -> None:
    write_records(path, [
        {"topic_id": t.topic_id, "display_name": t.display_name,
         "fields": [{"field_id": f.field_id, "etype": f.etype.value} for f in t.fields]}
        for t in schema.topics
    ])


# -- gold cases --

def save_gold_case(case_dir: str | Path, case: GoldCase) -> None:
    case_dir = Path(case_dir)
    case_dir.mkdir(parents=True, exist_ok=True)
    save_transcript(case_dir / "transcript.jsonl", case.dialogue)
    ann: list[dict] = []
    for s in case.gold_spans:
        ann.append({"type": "span", "utterance_index": s.utterance_index,
                    "char_start": s.char_start, "char_end": s.char_end,
                    "etype": s.etype.value, "linked": s.linked})
    for idx in sorted(case.gold_topics):
        ann.append({"type": "topic", "utterance_index": idx,
                    "topic_id": case.gold_topics[idx]})
    for idx in sorted(case.gold_questions):
        ann.append({"type": "question", "utterance_index": idx,
                    "value": case.gold_questions[idx]})
    for idx in sorted(case.gold_negations):
        ann.append({"type": "negation", "utterance_index": idx,
                    "value": case.gold_negations[idx]})
    write_records(case_dir / "annotations.jsonl", ann)
    write_records(case_dir / "report.jsonl", [
        {"field_id": fid, "values": values}
        for fid, values in case.gold_report.items()
    ])


def load_gold_case(case_dir: str | Path) -> GoldCase:
    case_dir = Path(case_dir)
    dialogue = load_transcript(case_dir / "transcript.jsonl", dialogue_id=case_dir.name)
    spans: list[GoldSpan] = []
    topics: dict[int, str | None] = {}
    questions: dict[int, bool] = {}
    negations: dict[int, bool] = {}
    for lineno, rec in read_records(case_dir / "annotations.jsonl"):
        kind = rec.get("type")
        if kind == "span":
            spans.append(GoldSpan(utterance_index=rec["utterance_index"],
                                  char_start=rec["char_start"], char_end=rec["char_end"],
                                  etype=EntityType(rec["etype"]), linked=rec["linked"]))
        elif kind == "topic":
            topics[rec["utterance_index"]] = rec["topic_id"]
        elif kind == "question":
            questions[rec["utterance_index"]] = bool(rec["value"])
        elif kind == "negation":
            negations[rec["utterance_index"]] = bool(rec["value"])
        else:
            raise CorpusError(f"{case_dir}/annotations.jsonl: line {lineno}: "
                              f"unknown annotation type {kind!r}")
    report = {rec["field_id"]: list(rec["values"])
              for _, rec in read_records(case_dir / "report.jsonl")}
    return GoldCase(dialogue=dialogue, gold_spans=tuple(spans), gold_topics=topics,
                    gold_questions=questions, gold_negations=negations,
                    gold_report=report)


def save_corpus(root: str | Path, cases: list[GoldCase]) -> None:
    """One directory per case, named by dialogue id (ids carry the
    generation seed, which keeps train/eval splits distinguishable)."""
    root = Path(root)
    for case in cases:
        save_gold_case(root / case.dialogue.id, case)


def load_corpus(root: str | Path) -> list[GoldCase]:
    root = Path(root)
    case_dirs = sorted(p for p in root.iterdir()
                       if p.is_dir() and (p / "transcript.jsonl").exists())
    if not case_dirs:
        raise CorpusError(f"{root}: no case directories with transcripts")
    return [load_gold_case(d) for d in case_dirs]
