"""Core data model: utterances, dialogues, KB entries, report schemas and
gold-annotated cases.

Validation lives on the constructors (`validate_*` helpers) so that file
loading and the synthetic generator share one set of rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class CorpusError(ValueError):
    """Raised for malformed transcripts, KBs or gold cases."""


class Speaker(str, Enum):
    ASSESSOR = "Assessor"
    CLAIMANT = "Claimant"


class EntityType(str, Enum):
    ADDR = "Addr"
    HOS = "Hos"
    DIS = "Dis"
    DATE = "Date"
    EXAM = "Exam"


ENTITY_TYPES = tuple(EntityType)


@dataclass(frozen=True)
class Utterance:
    index: int
    speaker: Speaker
    text: str
    timestamp_ms: int | None = None

    def __post_init__(self):
        if self.index < 0:
            raise CorpusError(f"utterance index must be >= 0, got {self.index}")
        if not self.text.strip():
            raise CorpusError(f"utterance {self.index}: text is empty")
        if self.timestamp_ms is None:
            object.__setattr__(self, "timestamp_ms", self.index * 1000)
        elif self.timestamp_ms < 0:
            raise CorpusError(f"utterance {self.index}: negative timestamp")


@dataclass(frozen=True)
class Dialogue:
    id: str
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        if not self.utterances:
            raise CorpusError(f"dialogue {self.id!r} has no utterances")
        object.__setattr__(self, "utterances", tuple(self.utterances))
        prev = None
        for utt in self.utterances:
            if prev is not None and utt.index != prev + 1:
                raise CorpusError(
                    f"dialogue {self.id!r}: utterance indices must increase "
                    f"without gaps; got {utt.index} after {prev}"
                )
            prev = utt.index


@dataclass(frozen=True)
class KbEntry:
    id: str
    etype: EntityType
    canonical: str
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if self.etype == EntityType.DATE:
            raise CorpusError(
                f"KB entry {self.id!r}: Date values are open-ended and are "
                "never stored in the KB; dates pass through linking verbatim"
            )
        if not self.canonical.strip():
            raise CorpusError(f"KB entry {self.id!r}: canonical name is empty")
        object.__setattr__(self, "aliases", tuple(self.aliases))

    def names(self) -> tuple[str, ...]:
        return (self.canonical, *self.aliases)


@dataclass(frozen=True)
class FieldSpec:
    field_id: str
    etype: EntityType


@dataclass(frozen=True)
class TopicSpec:
    topic_id: str
    display_name: str
    fields: tuple[FieldSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))


@dataclass(frozen=True)
class ReportSchema:
    topics: tuple[TopicSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "topics", tuple(self.topics))
        topic_ids = [t.topic_id for t in self.topics]
        if len(set(topic_ids)) != len(topic_ids):
            raise CorpusError("duplicate topic_id in report schema")
        field_ids = [f.field_id for t in self.topics for f in t.fields]
        if len(set(field_ids)) != len(field_ids):
            raise CorpusError("duplicate field_id in report schema")

    def topic_ids(self) -> list[str]:
        return [t.topic_id for t in self.topics]

    def topic(self, topic_id: str) -> TopicSpec:
        for t in self.topics:
            if t.topic_id == topic_id:
                return t
        raise KeyError(topic_id)

    def field(self, field_id: str) -> tuple[TopicSpec, FieldSpec]:
        for t in self.topics:
            for f in t.fields:
                if f.field_id == field_id:
                    return t, f
        raise KeyError(field_id)

    def fields(self) -> list[tuple[TopicSpec, FieldSpec]]:
        return [(t, f) for t in self.topics for f in t.fields]


@dataclass(frozen=True)
class GoldSpan:
    """One annotated entity mention. `linked` is the canonical KB id for
    KB-backed types and the normalized verbatim string for dates."""

    utterance_index: int
    char_start: int
    char_end: int
    etype: EntityType
    linked: str

    def surface(self, dialogue: Dialogue) -> str:
        for utt in dialogue.utterances:
            if utt.index == self.utterance_index:
                return utt.text[self.char_start : self.char_end]
        raise CorpusError(f"gold span references unknown utterance {self.utterance_index}")


@dataclass(frozen=True)
class GoldCase:
    dialogue: Dialogue
    gold_spans: tuple[GoldSpan, ...]
    gold_topics: dict[int, str | None]
    gold_questions: dict[int, bool]
    gold_negations: dict[int, bool]
    gold_report: dict[str, list[str]]

    def __post_init__(self):
        object.__setattr__(self, "gold_spans", tuple(self.gold_spans))
        by_index = {u.index: u for u in self.dialogue.utterances}
        for span in self.gold_spans:
            utt = by_index.get(span.utterance_index)
            if utt is None:
                raise CorpusError(
                    f"case {self.dialogue.id!r}: span references missing "
                    f"utterance {span.utterance_index}"
                )
            if not (0 <= span.char_start < span.char_end <= len(utt.text)):
                raise CorpusError(
                    f"case {self.dialogue.id!r}: span [{span.char_start},"
                    f"{span.char_end}) outside utterance {span.utterance_index}"
                )


@dataclass(frozen=True)
class NoiseConfig:
    """Character-level corruption simulating transcription noise."""

    char_error_rate: float = 0.05
    operations: tuple[str, ...] = ("substitute", "delete", "insert")
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.char_error_rate <= 1.0:
            raise CorpusError(f"char_error_rate {self.char_error_rate} not in [0,1]")
        ops = tuple(sorted(set(self.operations)))
        bad = [o for o in ops if o not in ("substitute", "delete", "insert")]
        if bad:
            raise CorpusError(f"unknown noise operations: {bad}")
        object.__setattr__(self, "operations", ops)
