"""Entity linking: resolve tagged spans to canonical KB entries.

Date spans never touch the KB; they pass through with their normalized
surface. Everything else tries an exact alias hit first, then fuzzy
matching over trigram-generated candidates scored by

    score = 1 - editdist(span, alias) / max(len(span), len(alias))

and accepted at `tau` (default 0.8). Matching is case-insensitive; the
normalized value of a link is always the entry's canonical name.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .corpus.dates import normalize_date
from .corpus.model import EntityType, KbEntry
from .extraction.bio import TaggedSpan
from .strings import edit_distance, padded_trigrams

log = logging.getLogger(__name__)

DEFAULT_TAU = 0.8


class LinkMethod(str, Enum):
    EXACT = "exact"
    FUZZY = "fuzzy"
    PASSTHROUGH = "passthrough"
    REJECTED = "rejected"


@dataclass(frozen=True)
class LinkResult:
    entry_id: str | None
    normalized_value: str
    score: float
    method: LinkMethod


@dataclass(frozen=True)
class KbIndex:
    entries: dict[str, KbEntry]
    # per etype: lowercased alias -> entry id
    alias_tables: dict[EntityType, dict[str, str]]
    # per etype: trigram -> set of (alias, entry id)
    trigram_tables: dict[EntityType, dict[str, set[tuple[str, str]]]]

    def alias_count(self, etype: EntityType) -> int:
        return len(self.alias_tables.get(etype, {}))


def build_index(kb: list[KbEntry]) -> KbIndex:
    entries: dict[str, KbEntry] = {}
    alias_tables: dict[EntityType, dict[str, str]] = {}
    trigram_tables: dict[EntityType, dict[str, set[tuple[str, str]]]] = {}
    for entry in sorted(kb, key=lambda e: e.id):
        entries[entry.id] = entry
        table = alias_tables.setdefault(entry.etype, {})
        grams = trigram_tables.setdefault(entry.etype, {})
        for name in entry.names():
            key = name.lower()
            existing = table.get(key)
            if existing is not None and existing != entry.id:
                # collisions resolve toward the lexicographically smaller id
                winner = min(existing, entry.id)
                log.warning("alias %r shared by entries %s and %s; keeping %s",
                            name, existing, entry.id, winner)
                table[key] = winner
            else:
                table[key] = entry.id
            for gram in padded_trigrams(name):
                grams.setdefault(gram, set()).add((key, entry.id))
    return KbIndex(entries=entries, alias_tables=alias_tables,
                   trigram_tables=trigram_tables)


def link_span(span: TaggedSpan, idx: KbIndex, tau: float = DEFAULT_TAU) -> LinkResult:
    if span.etype == EntityType.DATE:
        return LinkResult(entry_id=None, normalized_value=normalize_date(span.surface),
                          score=1.0, method=LinkMethod.PASSTHROUGH)
    surface = span.surface.strip().lower()
    table = idx.alias_tables.get(span.etype, {})
    hit = table.get(surface)
    if hit is not None:
        return LinkResult(entry_id=hit, normalized_value=idx.entries[hit].canonical,
                          score=1.0, method=LinkMethod.EXACT)
    grams = idx.trigram_tables.get(span.etype, {})
    candidates: set[tuple[str, str]] = set()
    for gram in padded_trigrams(surface):
        candidates |= grams.get(gram, set())
    best: tuple[float, str] | None = None  # (score, entry id)
    for alias, entry_id in candidates:
        d = edit_distance(surface, alias)
        score = 1.0 - d / max(len(surface), len(alias))
        if score < tau:
            continue
        # ties go to the higher score, then the smaller entry id
        if best is None or score > best[0] or (score == best[0] and entry_id < best[1]):
            best = (score, entry_id)
    if best is None:
        return LinkResult(entry_id=None, normalized_value=span.surface.strip(),
                          score=0.0, method=LinkMethod.REJECTED)
    score, entry_id = best
    return LinkResult(entry_id=entry_id, normalized_value=idx.entries[entry_id].canonical,
                      score=score, method=LinkMethod.FUZZY)
