import string

import pytest

from claimlens.corpus import EntityType, KbEntry, default_kb
from claimlens.extraction import TaggedSpan
from claimlens.linking import LinkMethod, build_index, link_span
from claimlens.strings import edit_distance


def span(surface, etype=EntityType.HOS):
    return TaggedSpan(etype=etype, surface=surface, char_start=0,
                      char_end=len(surface), utterance_index=0)


@pytest.fixture(scope="module")
def idx():
    return build_index(default_kb())


class TestBuildIndex:
    def test_empty_kb(self):
        empty = build_index([])
        r = link_span(span("Qilu Hospital"), empty)
        assert r.method == LinkMethod.REJECTED and r.entry_id is None
        r = link_span(span("2019-03-01", EntityType.DATE), empty)
        assert r.method == LinkMethod.PASSTHROUGH

    def test_alias_row_counting(self):
        kb = [
            KbEntry(id="a", etype=EntityType.HOS, canonical="Alpha Hospital",
                    aliases=("Alpha Hosp", "Alpha Medical", "Alpha Center")),
            KbEntry(id="b", etype=EntityType.HOS, canonical="Bravo Hospital",
                    aliases=("Bravo Hosp", "Bravo Medical", "Bravo Center")),
        ]
        index = build_index(kb)
        assert index.alias_count(EntityType.HOS) == 8  # canonicals included

    def test_shared_alias_resolves_to_smaller_id(self, caplog):
        kb = [
            KbEntry(id="hos_b", etype=EntityType.HOS, canonical="Beta Hospital",
                    aliases=("Shared Name",)),
            KbEntry(id="hos_a", etype=EntityType.HOS, canonical="Alpha Hospital",
                    aliases=("Shared Name",)),
        ]
        with caplog.at_level("WARNING"):
            index = build_index(kb)
        assert index.alias_tables[EntityType.HOS]["shared name"] == "hos_a"
        assert any("shared" in r.message.lower() for r in caplog.records)


class TestLinkSpan:
    def test_exact_canonical_hit(self, idx):
        r = link_span(span("Qilu Hospital"), idx)
        assert r.method == LinkMethod.EXACT
        assert r.score == 1.0
        assert r.entry_id == "hos_qilu"
        assert r.normalized_value == "Qilu Hospital"

    def test_fuzzy_single_deletion(self, idx):
        # editdist("qilu hosptal", "qilu hospital") = 1; score 1 - 1/13
        assert edit_distance("qilu hosptal", "qilu hospital") == 1
        r = link_span(span("Qilu Hosptal"), idx)
        assert r.method == LinkMethod.FUZZY
        assert r.score == pytest.approx(1 - 1 / 13)
        assert r.entry_id == "hos_qilu"
        assert r.normalized_value == "Qilu Hospital"

    def test_alias_normalizes_to_canonical(self, idx):
        r = link_span(span("Mercy General"), idx)
        assert r.method == LinkMethod.EXACT
        assert r.normalized_value == "Mercy General Hospital"

    def test_date_passes_through(self, idx):
        r = link_span(span("2019-03-01", EntityType.DATE), idx)
        assert r.method == LinkMethod.PASSTHROUGH
        assert r.entry_id is None
        assert r.normalized_value == "2019-03-01"

    def test_date_normalization(self, idx):
        assert link_span(span("2019/3/1", EntityType.DATE), idx).normalized_value \
            == "2019-03-01"
        assert link_span(span("last Friday", EntityType.DATE), idx).normalized_value \
            == "last friday"

    def test_garbage_rejected(self, idx):
        r = link_span(span("zzzqqqvvv"), idx)
        assert r.method == LinkMethod.REJECTED
        assert r.entry_id is None

    def test_wrong_type_not_linked(self, idx):
        r = link_span(span("Qilu Hospital", EntityType.DIS), idx)
        assert r.method == LinkMethod.REJECTED

    def test_tau_monotonicity(self, idx):
        # lowering tau never turns a fuzzy success into a rejection
        surfaces = ["Qilu Hosptal", "Mercy Generel Hospital", "Lakeshore Hospita",
                    "chronic anemi", "tissue biopsi"]
        etypes = [EntityType.HOS, EntityType.HOS, EntityType.HOS,
                  EntityType.DIS, EntityType.EXAM]
        for surface, etype in zip(surfaces, etypes):
            accepted_at: list[float] = []
            for tau in (0.95, 0.9, 0.85, 0.8, 0.7, 0.5, 0.3):
                r = link_span(span(surface, etype), idx, tau=tau)
                if r.method != LinkMethod.REJECTED:
                    accepted_at.append(tau)
            assert accepted_at == sorted(accepted_at, reverse=True)
            # once accepted, all lower taus accept too
            if accepted_at:
                assert accepted_at[-1] == 0.3

    def test_exact_implies_fuzzy_would_succeed(self, idx):
        for entry in default_kb()[:6]:
            r = link_span(span(entry.canonical, entry.etype), idx)
            assert r.method == LinkMethod.EXACT
            # force the fuzzy path by perturbing case only (exact is
            # case-insensitive, so corrupt one char instead)
            corrupted = "x" + entry.canonical[1:]
            rf = link_span(span(corrupted, entry.etype), idx)
            assert rf.method in (LinkMethod.FUZZY, LinkMethod.EXACT)
            assert rf.entry_id == entry.id


def single_edits(name):
    """All single-character substitutions, deletions and insertions."""
    letters = string.ascii_lowercase
    out = set()
    for i in range(len(name)):
        out.add(name[:i] + name[i + 1:])  # delete
        for ch in letters:
            out.add(name[:i] + ch + name[i + 1:])  # substitute
    for i in range(len(name) + 1):
        for ch in letters:
            out.add(name[:i] + ch + name[i:])  # insert
    return {o for o in out if o and o.lower() != name.lower()}


class TestLinkingGuarantee:
    def test_every_single_edit_relinks(self, idx):
        # exhaustive: every single-edit corruption of every fixture KB name
        # of length >= 4 relinks to the original entry
        failures = []
        for entry in default_kb():
            for name in entry.names():
                if len(name) < 4:
                    continue
                for corrupted in single_edits(name):
                    r = link_span(span(corrupted, entry.etype), idx)
                    if r.entry_id != entry.id:
                        failures.append((name, corrupted, r))
        assert not failures, failures[:5]
