"""Topic segmentation: score each assessor utterance against the standard
questions of every report topic and switch topics only on a sufficiently
strong match, otherwise carry the running topic forward.

The default scorer is a cosine over character-bigram multisets (cheap and
robust to a few corrupted characters). A trained sentence encoder can be
plugged in behind the same `(a, b) -> [0, 1]` contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .corpus.model import CorpusError, Dialogue, ReportSchema, Speaker, Utterance
from .corpus.io import read_records, write_records
from .strings import bigram_counts, cosine_counts


class SegmentationError(ValueError):
    pass


@dataclass(frozen=True)
class StandardQuestionSet:
    """Ordered topic -> standard questions mapping; order follows the schema
    and drives tie-breaking."""

    topics: tuple[str, ...]
    questions: dict[str, tuple[str, ...]]

    @classmethod
    def from_mapping(cls, mapping: dict[str, list[str]],
                     schema: ReportSchema) -> "StandardQuestionSet":
        schema_ids = schema.topic_ids()
        unknown = sorted(set(mapping) - set(schema_ids))
        if unknown:
            raise SegmentationError(f"standard questions reference unknown topics: {unknown}")
        ordered = [t for t in schema_ids if t in mapping]
        for t in ordered:
            if not mapping[t]:
                raise SegmentationError(f"topic {t!r} has no standard questions")
        return cls(topics=tuple(ordered),
                   questions={t: tuple(mapping[t]) for t in ordered})


@dataclass(frozen=True)
class SegmenterConfig:
    threshold: float = 0.5
    scorer: str = "lexical"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise SegmentationError(f"threshold {self.threshold} not in [0,1]")
        if self.scorer not in ("lexical", "trainable"):
            raise SegmentationError(f"unknown scorer {self.scorer!r}")


@dataclass(frozen=True)
class TopicAssignment:
    utterance_index: int
    topic_id: str | None
    best_score: float
    carried: bool


def similarity(a: str, b: str) -> float:
    """Cosine over character-bigram multisets of the lowercased strings."""
    if not a or not b:
        raise SegmentationError("similarity requires non-empty strings")
    if a == b:
        return 1.0
    return min(1.0, cosine_counts(bigram_counts(a.lower()), bigram_counts(b.lower())))


class TrainableScorer:
    """Similarity via cosine of sentence encodings, squashed to [0, 1].
    Satisfies the same contract as the lexical scorer (symmetric, 1.0 on
    identical inputs)."""

    def __init__(self, encoder, vocab):
        self.encoder = encoder
        self.vocab = vocab

    def __call__(self, a: str, b: str) -> float:
        if not a or not b:
            raise SegmentationError("similarity requires non-empty strings")
        if a == b:
            return 1.0
        va = self.encoder.encode(self.vocab.encode(a.lower().split())).values
        vb = self.encoder.encode(self.vocab.encode(b.lower().split())).values
        na, nb = np.linalg.norm(va), np.linalg.norm(vb)
        if na == 0.0 or nb == 0.0:
            return 0.0
        cos = float(va @ vb / (na * nb))
        return min(1.0, max(0.0, (cos + 1.0) / 2.0))


def assign_topic(
    utt: Utterance,
    prev: str | None,
    sq: StandardQuestionSet,
    cfg: SegmenterConfig,
    scorer: Callable[[str, str], float] | None = None,
) -> TopicAssignment:
    if utt.speaker != Speaker.ASSESSOR:
        raise SegmentationError("assign_topic only scores assessor utterances")
    score_fn = scorer or similarity
    best_topic: str | None = None
    best_score = 0.0
    for topic in sq.topics:
        for question in sq.questions[topic]:
            s = score_fn(utt.text, question)
            if s > best_score:
                best_score = s
                best_topic = topic
    if best_score > cfg.threshold:
        return TopicAssignment(utt.index, best_topic, best_score, carried=False)
    return TopicAssignment(utt.index, prev, best_score, carried=True)


def segment_dialogue(
    d: Dialogue,
    sq: StandardQuestionSet,
    cfg: SegmenterConfig,
    scorer: Callable[[str, str], float] | None = None,
) -> list[TopicAssignment]:
    assignments: list[TopicAssignment] = []
    current: str | None = None
    for utt in d.utterances:
        if utt.speaker == Speaker.ASSESSOR:
            a = assign_topic(utt, current, sq, cfg, scorer)
            current = a.topic_id
            assignments.append(a)
        else:
            assignments.append(TopicAssignment(utt.index, current, 0.0, carried=True))
    return assignments


# -- standard questions file --

def load_standard_questions(path: str | Path, schema: ReportSchema) -> StandardQuestionSet:
    mapping: dict[str, list[str]] = {}
    for lineno, rec in read_records(path):
        try:
            mapping.setdefault(rec["topic_id"], []).append(rec["question"])
        except KeyError as exc:
            raise CorpusError(f"{path}: line {lineno}: bad question record: {exc}") from exc
    return StandardQuestionSet.from_mapping(mapping, schema)


def save_standard_questions(path: str | Path, sq: StandardQuestionSet) -> None:
    write_records(path, [
        {"topic_id": t, "question": q}
        for t in sq.topics for q in sq.questions[t]
    ])
