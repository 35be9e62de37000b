"""The two keyword applications: the live display feed and report-filling
suggestions, plus the KB-retrieval baseline they are compared against.

Pipeline suggestions come only from Confirmed tracker records, most recent
mention first, capped at five. The baseline ranks KB entries by raw
trigram overlap with the dialogue so far; it cannot serve Date fields at
all, which is the structural difference the evaluation tables surface.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus.model import EntityType, ReportSchema
from .linking import KbIndex
from .tracker import KeywordState, SessionState

MAX_CANDIDATES = 5


class RecommendError(ValueError):
    pass


@dataclass(frozen=True)
class SuggestionList:
    field_id: str
    candidates: tuple[str, ...]
    source: str  # "pipeline" or "retrieval_baseline"

    def __post_init__(self):
        if len(self.candidates) > MAX_CANDIDATES:
            raise RecommendError("suggestion lists are capped at five candidates")
        if len(set(self.candidates)) != len(self.candidates):
            raise RecommendError("duplicate suggestion candidates")


def _confirmed_desc(state: SessionState) -> list:
    records = [r for r in state.ledger if r.state == KeywordState.CONFIRMED]
    records.sort(key=lambda r: (-r.utterance_index, -r.record_id))
    return records


def display_feed(state: SessionState) -> dict[EntityType, list[str]]:
    """Confirmed keyword values per type, most recent utterance first."""
    feed: dict[EntityType, list[str]] = {et: [] for et in EntityType}
    for rec in _confirmed_desc(state):
        if rec.value not in feed[rec.etype]:
            feed[rec.etype].append(rec.value)
    return feed


def suggest_for_field(state: SessionState, schema: ReportSchema,
                      field_id: str) -> SuggestionList:
    try:
        topic, fspec = schema.field(field_id)
    except KeyError:
        raise RecommendError(f"unknown field {field_id!r}") from None
    candidates: list[str] = []
    records = _confirmed_desc(state)
    for rec in records:
        if rec.etype == fspec.etype and rec.topic == topic.topic_id \
                and rec.value not in candidates:
            candidates.append(rec.value)
        if len(candidates) == MAX_CANDIDATES:
            break
    if len(candidates) < MAX_CANDIDATES:
        # fall back to same-type keywords from other topics, still newest first
        for rec in records:
            if rec.etype == fspec.etype and rec.value not in candidates:
                candidates.append(rec.value)
            if len(candidates) == MAX_CANDIDATES:
                break
    return SuggestionList(field_id=field_id, candidates=tuple(candidates),
                          source="pipeline")


def _trigrams(s: str) -> set[str]:
    s = s.lower()
    return {s[i : i + 3] for i in range(len(s) - 2)}


def retrieval_baseline_suggest(idx: KbIndex, dialogue_text_so_far: str,
                               field_id: str, etype: EntityType) -> SuggestionList:
    if etype == EntityType.DATE:
        raise RecommendError(
            "the retrieval baseline cannot serve Date fields: date values "
            "are not enumerable in the KB")
    text_grams = _trigrams(dialogue_text_so_far)
    scored: list[tuple[int, str, str]] = []
    for entry in idx.entries.values():
        if entry.etype != etype:
            continue
        overlap = len(_trigrams(entry.canonical) & text_grams)
        scored.append((-overlap, entry.id, entry.canonical))
    scored.sort()
    return SuggestionList(field_id=field_id,
                          candidates=tuple(c for _, _, c in scored[:MAX_CANDIDATES]),
                          source="retrieval_baseline")
