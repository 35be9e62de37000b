import pytest

from claimlens.corpus import EntityType, Speaker, Utterance
from claimlens.linking import LinkMethod, LinkResult
from claimlens.recommend import (
    RecommendError,
    display_feed,
    retrieval_baseline_suggest,
    suggest_for_field,
)
from claimlens.strings import edit_distance
from claimlens.tracker import KeywordRecord, KeywordState, SessionState


def make_state(records):
    """Build a session state holding pre-cooked keyword records."""
    state = SessionState()
    for rec in records:
        state.ledger.append(rec)
    state._next_record_id = len(records)
    return state


def rec(record_id, value, etype, topic, utt_index, state=KeywordState.CONFIRMED):
    return KeywordRecord(
        record_id=record_id, value=value, etype=etype, topic=topic,
        utterance_index=utt_index, state=state,
        link=LinkResult(entry_id=None, normalized_value=value, score=1.0,
                        method=LinkMethod.PASSTHROUGH))


class TestDisplayFeed:
    def test_empty_session_has_five_empty_lists(self):
        feed = display_feed(SessionState())
        assert set(feed) == set(EntityType)
        assert all(v == [] for v in feed.values())

    def test_reverse_utterance_order(self):
        state = make_state([
            rec(0, "Qilu Hospital", EntityType.HOS, "disease_history", 4),
            rec(1, "Lakeshore Hospital", EntityType.HOS, "disease_history", 10),
        ])
        feed = display_feed(state)
        assert feed[EntityType.HOS] == ["Lakeshore Hospital", "Qilu Hospital"]

    def test_dropped_never_appears(self):
        state = make_state([
            rec(0, "Qilu Hospital", EntityType.HOS, "disease_history", 4),
            rec(1, "Mercy General Hospital", EntityType.HOS, "disease_history", 6,
                state=KeywordState.DROPPED),
            rec(2, "Lakeshore Hospital", EntityType.HOS, "disease_history", 8,
                state=KeywordState.TENTATIVE),
        ])
        feed = display_feed(state)
        assert feed[EntityType.HOS] == ["Qilu Hospital"]


class TestSuggestForField:
    def test_seven_matches_keep_five_most_recent(self, schema):
        records = [rec(i, f"Hospital Number {i}", EntityType.HOS,
                       "disease_history", 10 + i) for i in range(7)]
        s = suggest_for_field(make_state(records), schema, "disease_history_hos")
        assert len(s.candidates) == 5
        assert s.candidates[0] == "Hospital Number 6"
        assert s.candidates[-1] == "Hospital Number 2"
        assert s.source == "pipeline"

    def test_etype_fallback_from_other_topics(self, schema):
        records = [
            rec(0, "Qilu Hospital", EntityType.HOS, "diagnostic_record", 3),
            rec(1, "Lakeshore Hospital", EntityType.HOS, "diagnostic_record", 7),
        ]
        s = suggest_for_field(make_state(records), schema, "disease_history_hos")
        # hand-walk of the fallback rule: no topic matches, two type matches
        assert s.candidates == ("Lakeshore Hospital", "Qilu Hospital")

    def test_topic_matches_come_first(self, schema):
        records = [
            rec(0, "Qilu Hospital", EntityType.HOS, "diagnostic_record", 9),
            rec(1, "Lakeshore Hospital", EntityType.HOS, "disease_history", 2),
        ]
        s = suggest_for_field(make_state(records), schema, "disease_history_hos")
        assert s.candidates == ("Lakeshore Hospital", "Qilu Hospital")

    def test_empty_session_date_field(self, schema):
        s = suggest_for_field(SessionState(), schema, "commercial_insurance_date")
        assert s.candidates == ()

    def test_unknown_field_rejected(self, schema):
        with pytest.raises(RecommendError, match="unknown field"):
            suggest_for_field(SessionState(), schema, "nope")

    def test_reverse_order_property(self, schema):
        records = [rec(i, f"v{i}", EntityType.DATE, "disease_history", i * 3)
                   for i in range(9)]
        state = make_state(records)
        s = suggest_for_field(state, schema, "disease_history_date")
        indices = []
        for value in s.candidates:
            indices.append(next(r.utterance_index for r in records if r.value == value))
        assert indices == sorted(indices, reverse=True)


class TestRetrievalBaseline:
    def test_date_field_unsupported(self, kb_index):
        with pytest.raises(RecommendError, match="Date"):
            retrieval_baseline_suggest(kb_index, "anything", "commercial_insurance_date",
                                       EntityType.DATE)

    def test_verbatim_mention_ranks_first(self, kb, kb_index):
        text = "the claimant said I was treated at Qilu Hospital last year"
        s = retrieval_baseline_suggest(kb_index, text, "disease_history_hos",
                                       EntityType.HOS)
        assert s.candidates[0] == "Qilu Hospital"
        assert s.source == "retrieval_baseline"
        # brute-force overlap recount over the fixture KB
        def trigrams(x):
            x = x.lower()
            return {x[i:i+3] for i in range(len(x) - 2)}
        overlaps = {e.canonical: len(trigrams(e.canonical) & trigrams(text))
                    for e in kb if e.etype == EntityType.HOS}
        assert overlaps["Qilu Hospital"] == max(overlaps.values())

    def test_empty_text_gives_tie_break_order(self, kb, kb_index):
        s = retrieval_baseline_suggest(kb_index, "", "disease_history_hos",
                                       EntityType.HOS)
        hos = sorted((e.id, e.canonical) for e in kb if e.etype == EntityType.HOS)
        assert list(s.candidates) == [c for _i, c in hos[:5]]

    def test_never_returns_values_outside_kb(self, kb, kb_index):
        canonicals = {e.canonical for e in kb}
        s = retrieval_baseline_suggest(kb_index, "random talk about things",
                                       "disease_history_dis", EntityType.DIS)
        assert set(s.candidates) <= canonicals
