"""Keyword lifecycle tracking (the DST core).

Every utterance runs the fixed pipeline: topic assignment (assessor turns
only), then extraction and linking, then routing:

  assessor + question      extracted keywords become Tentative and wait in
                           `pending`; a newer question replaces (drops) an
                           unresolved pending set
  assessor + non-question  keywords confirm immediately
  claimant, negative       pending drops, and the claimant turn's own
                           keywords are suppressed too ("No, I never
                           visited X" must not confirm X)
  claimant, non-negative   pending confirms, the turn's keywords confirm

`pending` always empties after a claimant turn. Rejected link results
(non-Date) are discarded before routing. Confirmed duplicates (same value,
type and topic) merge into the earliest record, refreshing its recency.
Dropped records stay in the ledger for audit and are never revived.

With `dst_enabled=False` the gates disappear: every extracted keyword
confirms immediately (the ablation condition).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .corpus.model import EntityType, Speaker, Utterance
from .extraction.bio import decode_spans
from .extraction.tokenizer import tokenize
from .filtering.negation import NegationClassifier, classify_negation
from .filtering.question import QuestionClassifier, classify_question
from .linking import DEFAULT_TAU, KbIndex, LinkMethod, LinkResult, link_span
from .segmentation import SegmenterConfig, StandardQuestionSet, assign_topic


class TrackerError(ValueError):
    pass


class KeywordState(str, Enum):
    TENTATIVE = "Tentative"
    CONFIRMED = "Confirmed"
    DROPPED = "Dropped"


class EventKind(str, Enum):
    TOPIC_CHANGED = "TopicChanged"
    KEYWORD_TENTATIVE = "KeywordTentative"
    KEYWORD_CONFIRMED = "KeywordConfirmed"
    KEYWORD_DROPPED = "KeywordDropped"
    SUGGESTION_MADE = "SuggestionMade"


@dataclass
class KeywordRecord:
    record_id: int
    value: str
    etype: EntityType
    topic: str | None
    utterance_index: int
    state: KeywordState
    link: LinkResult

    def payload(self) -> dict:
        return {
            "record_id": self.record_id,
            "value": self.value,
            "etype": self.etype.value,
            "topic": self.topic,
            "utterance_index": self.utterance_index,
            "state": self.state.value,
            "link_method": self.link.method.value,
            "link_score": self.link.score,
            "entry_id": self.link.entry_id,
        }


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    kind: EventKind
    utterance_index: int
    payload: dict


@dataclass(frozen=True)
class Snapshot:
    current_topic: str | None
    confirmed: dict[EntityType, tuple[dict, ...]]  # record payloads, newest first
    pending_count: int
    event_count: int


@dataclass
class SessionState:
    current_topic: str | None = None
    pending: list[KeywordRecord] = field(default_factory=list)
    ledger: list[KeywordRecord] = field(default_factory=list)
    events: list[SessionEvent] = field(default_factory=list)
    last_assessor_text: str = ""
    last_claimant_text: str = ""
    last_utterance_index: int = -1
    _next_record_id: int = 0
    _next_seq: int = 0

    def record_by_id(self, record_id: int) -> KeywordRecord:
        for rec in self.ledger:
            if rec.record_id == record_id:
                return rec
        raise TrackerError(f"no keyword record {record_id}")


@dataclass(frozen=True)
class PipelineConfig:
    qid_mode: str = "adv_mtl"
    dst_enabled: bool = True
    tau: float = DEFAULT_TAU
    segmenter: SegmenterConfig = field(default_factory=SegmenterConfig)


class Tracker:
    """Binds the trained components; `process_utterance` mutates a
    SessionState and returns the newly appended events."""

    def __init__(self, sq: StandardQuestionSet, tagger, qid: QuestionClassifier,
                 neg: NegationClassifier, index: KbIndex,
                 config: PipelineConfig | None = None):
        self.sq = sq
        self.tagger = tagger
        self.qid = qid
        self.neg = neg
        self.index = index
        self.config = config or PipelineConfig()

    # -- event/record plumbing --

    def _emit(self, state: SessionState, kind: EventKind, utterance_index: int,
              payload: dict) -> SessionEvent:
        event = SessionEvent(seq=state._next_seq, kind=kind,
                             utterance_index=utterance_index, payload=payload)
        state._next_seq += 1
        state.events.append(event)
        return event

    def _new_record(self, state: SessionState, value: str, etype: EntityType,
                    utterance_index: int, link: LinkResult) -> KeywordRecord:
        rec = KeywordRecord(record_id=state._next_record_id, value=value,
                            etype=etype, topic=state.current_topic,
                            utterance_index=utterance_index,
                            state=KeywordState.TENTATIVE, link=link)
        state._next_record_id += 1
        return rec

    def _confirm(self, state: SessionState, rec: KeywordRecord,
                 events: list[SessionEvent]) -> None:
        for existing in state.ledger:
            if (existing.state == KeywordState.CONFIRMED
                    and existing.value == rec.value
                    and existing.etype == rec.etype
                    and existing.topic == rec.topic):
                existing.utterance_index = rec.utterance_index
                events.append(self._emit(state, EventKind.KEYWORD_CONFIRMED,
                                         rec.utterance_index, existing.payload()))
                if rec in state.ledger:
                    # a manually confirmed duplicate collapses into the
                    # earlier record; audit it as dropped
                    rec.state = KeywordState.DROPPED
                    events.append(self._emit(state, EventKind.KEYWORD_DROPPED,
                                             rec.utterance_index, rec.payload()))
                return
        rec.state = KeywordState.CONFIRMED
        if rec not in state.ledger:
            state.ledger.append(rec)
        events.append(self._emit(state, EventKind.KEYWORD_CONFIRMED,
                                 rec.utterance_index, rec.payload()))

    def _drop(self, state: SessionState, rec: KeywordRecord,
              events: list[SessionEvent]) -> None:
        rec.state = KeywordState.DROPPED
        if rec not in state.ledger:
            state.ledger.append(rec)
        events.append(self._emit(state, EventKind.KEYWORD_DROPPED,
                                 rec.utterance_index, rec.payload()))

    # -- extraction --

    def _extract(self, state: SessionState, utt: Utterance) -> list[KeywordRecord]:
        toks = tokenize(utt.text, utt.index)
        if len(toks) == 0:
            return []
        labels, confidences = self.tagger.tag_full(toks)
        records: list[KeywordRecord] = []
        seen: set[tuple[str, EntityType]] = set()
        for span in decode_spans(toks, labels, confidences):
            link = link_span(span, self.index, tau=self.config.tau)
            if link.method == LinkMethod.REJECTED:
                continue
            key = (link.normalized_value, span.etype)
            if key in seen:
                continue
            seen.add(key)
            records.append(self._new_record(state, link.normalized_value,
                                            span.etype, utt.index, link))
        return records

    # -- the pipeline --

    def process_utterance(self, state: SessionState,
                          utt: Utterance) -> list[SessionEvent]:
        if utt.index <= state.last_utterance_index:
            raise TrackerError(
                f"utterance index {utt.index} not after {state.last_utterance_index}")
        events: list[SessionEvent] = []

        if utt.speaker == Speaker.ASSESSOR:
            assignment = assign_topic(utt, state.current_topic, self.sq,
                                      self.config.segmenter)
            if assignment.topic_id != state.current_topic:
                state.current_topic = assignment.topic_id
                self._emit(state, EventKind.TOPIC_CHANGED, utt.index,
                           {"topic_id": state.current_topic,
                            "score": assignment.best_score})
                events.append(state.events[-1])

        keywords = self._extract(state, utt)

        if not self.config.dst_enabled:
            for rec in keywords:
                self._confirm(state, rec, events)
        elif utt.speaker == Speaker.ASSESSOR:
            topic = state.current_topic or self.sq.topics[0]
            _prob, is_question = classify_question(self.qid, utt.text, topic)
            if is_question:
                for stale in state.pending:
                    self._drop(state, stale, events)
                state.pending = []
                for rec in keywords:
                    rec.state = KeywordState.TENTATIVE
                    state.ledger.append(rec)
                    state.pending.append(rec)
                    events.append(self._emit(state, EventKind.KEYWORD_TENTATIVE,
                                             utt.index, rec.payload()))
            else:
                for rec in keywords:
                    self._confirm(state, rec, events)
        else:
            _prob, is_negative = classify_negation(
                self.neg, state.last_assessor_text, state.last_claimant_text,
                utt.text)
            if is_negative:
                for rec in state.pending:
                    self._drop(state, rec, events)
                for rec in keywords:
                    self._drop(state, rec, events)
            else:
                for rec in state.pending:
                    self._confirm(state, rec, events)
                for rec in keywords:
                    self._confirm(state, rec, events)
            state.pending = []

        if utt.speaker == Speaker.ASSESSOR:
            state.last_assessor_text = utt.text
        else:
            state.last_claimant_text = utt.text
        state.last_utterance_index = utt.index
        return events

    # -- manual overrides (dashboard affordances) --

    def confirm_record(self, state: SessionState, record_id: int) -> list[SessionEvent]:
        rec = state.record_by_id(record_id)
        if rec.state == KeywordState.DROPPED:
            raise TrackerError(f"record {record_id} is dropped and cannot be revived")
        events: list[SessionEvent] = []
        if rec.state == KeywordState.TENTATIVE:
            state.pending = [p for p in state.pending if p.record_id != record_id]
            self._confirm(state, rec, events)
        return events

    def reject_record(self, state: SessionState, record_id: int) -> list[SessionEvent]:
        rec = state.record_by_id(record_id)
        if rec.state == KeywordState.DROPPED:
            raise TrackerError(f"record {record_id} is already dropped")
        state.pending = [p for p in state.pending if p.record_id != record_id]
        events: list[SessionEvent] = []
        self._drop(state, rec, events)
        return events

    def record_suggestion(self, state: SessionState, field_id: str,
                          candidates: list[str]) -> SessionEvent:
        return self._emit(state, EventKind.SUGGESTION_MADE,
                          state.last_utterance_index,
                          {"field_id": field_id, "candidates": list(candidates)})


def snapshot(state: SessionState) -> Snapshot:
    """Pure read: confirmed records grouped by type, newest first, one entry
    per value. Tentative and Dropped records never appear."""
    groups: dict[EntityType, list[KeywordRecord]] = {et: [] for et in EntityType}
    for rec in state.ledger:
        if rec.state == KeywordState.CONFIRMED:
            groups[rec.etype].append(rec)
    confirmed: dict[EntityType, tuple[dict, ...]] = {}
    for etype, records in groups.items():
        records.sort(key=lambda r: (-r.utterance_index, -r.record_id))
        seen: set[str] = set()
        rows = []
        for rec in records:
            if rec.value in seen:
                continue
            seen.add(rec.value)
            rows.append(rec.payload())
        confirmed[etype] = tuple(rows)
    return Snapshot(current_topic=state.current_topic, confirmed=confirmed,
                    pending_count=len(state.pending), event_count=len(state.events))
