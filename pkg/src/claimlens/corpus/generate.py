"""Seeded synthetic corpus: a scripted assessor/claimant interview per
dialogue, with full gold annotations (spans, topics, question/negation
flags, expected report values).

Each dialogue opens with a short greeting, then walks the schema topics in
order. Per topic:

  1. the assessor asks one of the topic's standard questions,
  2. the claimant answers with the topic's entities (and usually a date),
  3. sometimes the assessor restates a mentioned value (non-question),
  4. the assessor probes with a *distractor* entity of the topic's probe
     type ("Did you ever visit <other hospital>?"),
  5. the claimant either denies (probability `negation_rate`; the
     distractor must then stay out of the report) or confirms (the
     distractor becomes a legitimate report value).

Entity mentions are tracked as character spans, corrupted together with
the text, and emitted as gold spans over the *corrupted* surface with the
clean canonical value as the link target. Everything is a pure function of
(inputs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from ..strings import edit_distance
from .dates import normalize_date
from .model import (
    CorpusError,
    Dialogue,
    EntityType,
    FieldSpec,
    GoldCase,
    GoldSpan,
    KbEntry,
    NoiseConfig,
    ReportSchema,
    Speaker,
    TopicSpec,
    Utterance,
)
from .noise import corrupt_with_spans

MIN_GENERATED_NAME_DISTANCE = 3
# fuzzy linking scores 1 - d/max(len); recovering a single edit at
# tau=0.8 needs names of at least 5 characters
MIN_GENERATED_NAME_LENGTH = 5


def default_schema() -> ReportSchema:
    def topic(tid, name, *fields):
        return TopicSpec(topic_id=tid, display_name=name, fields=tuple(
            FieldSpec(field_id=f"{tid}_{et.value.lower()}", etype=et) for et in fields
        ))

    E = EntityType
    return ReportSchema(topics=(
        topic("resident_info", "Resident Information", E.ADDR, E.DATE),
        topic("work_record", "Work Record", E.ADDR, E.DATE),
        topic("diagnostic_record", "Diagnostic Record", E.DATE, E.HOS, E.EXAM),
        topic("disease_history", "Disease History", E.DATE, E.HOS, E.EXAM, E.DIS),
        topic("medical_insurance", "Medical Insurance", E.ADDR, E.DATE),
        topic("commercial_insurance", "Commercial Insurance", E.DATE),
    ))


_KB_SPEC: list[tuple[str, EntityType, str, tuple[str, ...]]] = [
    ("addr_maple", EntityType.ADDR, "Maple Garden Estate", ("Maple Garden",)),
    ("addr_harbor", EntityType.ADDR, "Harbor View Lane", ("Harbor Lane",)),
    ("addr_willow", EntityType.ADDR, "Willow Creek Road", ("Willow Creek",)),
    ("addr_sunset", EntityType.ADDR, "Sunset Boulevard North", ("Sunset Boulevard",)),
    ("addr_oldmill", EntityType.ADDR, "Old Mill Quarter", ("Old Mill",)),
    ("addr_cedar", EntityType.ADDR, "Cedar Hill Village", ("Cedar Hill",)),
    ("hos_qilu", EntityType.HOS, "Qilu Hospital", ("Qilu Hosp",)),
    ("hos_mercy", EntityType.HOS, "Mercy General Hospital", ("Mercy General",)),
    ("hos_vincent", EntityType.HOS, "Saint Vincent Clinic", ("Saint Vincent",)),
    ("hos_riverside", EntityType.HOS, "Riverside Medical Center", ("Riverside Medical",)),
    ("hos_union", EntityType.HOS, "Union Memorial Hospital", ("Union Memorial",)),
    ("hos_lakeshore", EntityType.HOS, "Lakeshore Hospital", ("Lakeshore Clinic",)),
    ("dis_anemia", EntityType.DIS, "chronic anemia", ("severe anemia",)),
    ("dis_lung", EntityType.DIS, "lung cancer", ("pulmonary carcinoma",)),
    ("dis_diabetes", EntityType.DIS, "type two diabetes", ("sugar diabetes",)),
    ("dis_hyper", EntityType.DIS, "hypertension", ("high blood pressure",)),
    ("dis_ulcer", EntityType.DIS, "gastric ulcer", ("stomach ulcer",)),
    ("dis_asthma", EntityType.DIS, "bronchial asthma", ("chronic asthma",)),
    ("exam_radio", EntityType.EXAM, "chest radiograph", ("chest imaging",)),
    ("exam_blood", EntityType.EXAM, "blood panel test", ("full blood panel",)),
    ("exam_ultra", EntityType.EXAM, "cardiac ultrasound", ("heart ultrasound",)),
    ("exam_biopsy", EntityType.EXAM, "tissue biopsy", ("biopsy sampling",)),
    ("exam_mri", EntityType.EXAM, "magnetic resonance scan", ("resonance scanning",)),
    ("exam_ecg", EntityType.EXAM, "electrocardiogram", ("cardiogram tracing",)),
]


def validate_generated_kb(entries: list[KbEntry]) -> None:
    """Generated KBs guarantee fuzzy linking can survive one character of
    corruption: every name is >= 5 chars and names of *different* entries
    of one type are pairwise >= 3 edits apart."""
    by_type: dict[EntityType, list[KbEntry]] = {}
    for e in entries:
        for name in e.names():
            if len(name) < MIN_GENERATED_NAME_LENGTH:
                raise CorpusError(f"generated KB name too short: {name!r} ({e.id})")
        by_type.setdefault(e.etype, []).append(e)
    for group in by_type.values():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                for na in a.names():
                    for nb in b.names():
                        d = edit_distance(na, nb)
                        if d < MIN_GENERATED_NAME_DISTANCE:
                            raise CorpusError(
                                f"generated KB names too close: {na!r} ({a.id}) vs "
                                f"{nb!r} ({b.id}), edit distance {d}"
                            )


@lru_cache(maxsize=1)
def _default_kb() -> tuple[KbEntry, ...]:
    entries = [KbEntry(id=i, etype=t, canonical=c, aliases=a) for i, t, c, a in _KB_SPEC]
    validate_generated_kb(entries)
    return tuple(entries)


def default_kb() -> list[KbEntry]:
    return list(_default_kb())


_STANDARD_QUESTIONS: dict[str, list[str]] = {
    "resident_info": [
        "Can you tell me your current home address?",
        "Where do you currently reside?",
        "Please confirm the address where you reside.",
    ],
    "work_record": [
        "What is the name of your workplace and where is it?",
        "Where do you work and since when?",
        "Tell me about your current employer and work address.",
    ],
    "diagnostic_record": [
        "When and where did you receive your first diagnosis?",
        "Where did the earliest examination happen?",
        "What was checked when the illness was first found?",
    ],
    "disease_history": [
        "Have you suffered any major illness in the past?",
        "What diseases have you been treated for before?",
        "Describe your previous conditions and the care you received.",
    ],
    "medical_insurance": [
        "Do you hold a public medical insurance policy?",
        "Is your social medical insurance still active?",
        "When did your public health coverage begin?",
    ],
    "commercial_insurance": [
        "Have you purchased any commercial insurance products?",
        "Do you own policies from private insurance companies?",
        "When did you buy your commercial policy?",
    ],
}


def default_standard_questions() -> dict[str, list[str]]:
    return {k: list(v) for k, v in _STANDARD_QUESTIONS.items()}


# claimant answer templates; {Addr}/{Hos}/{Dis}/{Exam}/{Date} are entity slots
_ANSWER_TEMPLATES: dict[str, list[str]] = {
    "resident_info": [
        "I live at {Addr}. I moved there on {Date}.",
        "My home is at {Addr}, since {Date}.",
    ],
    "work_record": [
        "I have been working at {Addr} since {Date}.",
        "My workplace is at {Addr}. I started on {Date}.",
    ],
    "diagnostic_record": [
        "I was first examined at {Hos} on {Date}. They performed a {Exam}.",
        "The first diagnosis was at {Hos}, on {Date}, after a {Exam}.",
    ],
    "disease_history": [
        "I was treated for {Dis} at {Hos}. They did a {Exam} on {Date}.",
        "Years ago I had {Dis}. The doctors at {Hos} ordered a {Exam} on {Date}.",
    ],
    "medical_insurance": [
        "Yes, my policy was registered at {Addr} on {Date}.",
        "I do. It was issued at {Addr} on {Date}.",
    ],
    "commercial_insurance": [
        "I bought one policy on {Date}.",
        "Yes, a single policy, purchased on {Date}.",
    ],
}

_PROBE_ETYPES: dict[str, list[EntityType]] = {
    "resident_info": [EntityType.ADDR],
    "work_record": [EntityType.ADDR],
    "diagnostic_record": [EntityType.HOS],
    "disease_history": [EntityType.HOS, EntityType.DIS],
    "medical_insurance": [EntityType.ADDR],
    "commercial_insurance": [EntityType.DATE],
}

_PROBE_TEMPLATES: dict[EntityType, list[str]] = {
    EntityType.ADDR: [
        "And {X}, is that spot known to you?",
        "What about {X}, any link to that spot?",
    ],
    EntityType.HOS: [
        "And {X}, any visits on your side?",
        "What about {X}, any stays in it?",
    ],
    EntityType.DIS: [
        "And {X}, any such episodes?",
        "What about {X}, anything of that kind?",
    ],
    EntityType.DATE: [
        "And {X}, does that ring a bell?",
        "What about {X}, might that be the day?",
    ],
}

_NEGATIVE_ANSWERS = [
    "No, never.",
    "No, that is not right.",
    "No, I have not.",
    "Definitely not.",
]

_POSITIVE_ANSWERS = [
    "Yes, that is right.",
    "Yes, exactly.",
    "Yes, I did.",
    "That is correct.",
]

_POSITIVE_WITH_DATE = [
    "Yes, I did, on {Date}.",
    "Yes, that was on {Date}.",
]

_RESTATE_TEMPLATES = [
    "Noting {X} into the file now.",
    "Let me jot {X} into the file.",
]

_GREETING = [
    ("Good morning, this is the assessment call, shall we begin?", Speaker.ASSESSOR, True),
    ("Yes, good morning, I am ready.", Speaker.CLAIMANT, False),
]


@dataclass
class _Mention:
    """An entity placement inside one utterance, pre-corruption."""
    char_start: int
    char_end: int
    etype: EntityType
    linked: str  # KB entry id, or normalized date string


@dataclass
class GeneratorConfig:
    """Knobs beyond the required arguments; defaults target roughly 25
    keywords per dialogue."""
    topic_cycles: int = 1
    alias_rate: float = 0.25
    restate_rate: float = 0.3
    extra_date_rate: float = 0.5


def _synth_date(rng: np.random.Generator) -> tuple[str, str]:
    """Returns (surface, normalized)."""
    kind = rng.random()
    if kind < 0.15:
        from .dates import WEEKDAYS
        day = WEEKDAYS[int(rng.integers(len(WEEKDAYS)))]
        surface = f"last {day.capitalize()}"
    else:
        y = int(rng.integers(2016, 2024))
        mo = int(rng.integers(1, 13))
        d = int(rng.integers(1, 29))
        if kind < 0.45:
            surface = f"{y}/{mo}/{d}"
        else:
            surface = f"{y}-{mo:02d}-{d:02d}"
    return surface, normalize_date(surface)


def _fill(template: str, values: dict[str, tuple[str, EntityType, str]]) -> tuple[str, list[_Mention]]:
    """Substitute {Slot} markers, recording each substitution's span.
    `values` maps slot name -> (surface, etype, linked)."""
    text = ""
    mentions: list[_Mention] = []
    rest = template
    while True:
        brace = rest.find("{")
        if brace < 0:
            text += rest
            break
        close = rest.index("}", brace)
        slot = rest[brace + 1 : close]
        surface, etype, linked = values[slot]
        text += rest[:brace]
        mentions.append(_Mention(len(text), len(text) + len(surface), etype, linked))
        text += surface
        rest = rest[close + 1 :]
    return text, mentions


class _DialogueBuilder:
    def __init__(self, noise: NoiseConfig):
        self.noise = noise
        self.texts: list[str] = []
        self.speakers: list[Speaker] = []
        self.mentions: list[list[_Mention]] = []
        self.topics: dict[int, str | None] = {}
        self.questions: dict[int, bool] = {}
        self.negations: dict[int, bool] = {}

    def add(self, text: str, speaker: Speaker, topic: str | None, question: bool,
            negation: bool, mentions: list[_Mention] | None = None) -> int:
        idx = len(self.texts)
        self.texts.append(text)
        self.speakers.append(speaker)
        self.mentions.append(mentions or [])
        self.topics[idx] = topic
        self.questions[idx] = question
        self.negations[idx] = negation
        return idx

    def build(self, dialogue_id: str) -> tuple[Dialogue, list[GoldSpan]]:
        utterances = []
        spans: list[GoldSpan] = []
        for idx, text in enumerate(self.texts):
            ranges = [(m.char_start, m.char_end) for m in self.mentions[idx]]
            corrupted, mapped = corrupt_with_spans(text, ranges, self.noise)
            if not corrupted.strip():
                # the whole turn was obliterated; keep a placeholder so
                # indices stay contiguous (practically unreachable at
                # realistic rates)
                corrupted = "..."
                mapped = [None] * len(ranges)
            utterances.append(Utterance(index=idx, speaker=self.speakers[idx],
                                        text=corrupted))
            for m, new_range in zip(self.mentions[idx], mapped):
                if new_range is None:
                    continue
                spans.append(GoldSpan(utterance_index=idx, char_start=new_range[0],
                                      char_end=new_range[1], etype=m.etype,
                                      linked=m.linked))
        return Dialogue(id=dialogue_id, utterances=tuple(utterances)), spans


def _choice(rng: np.random.Generator, items: list) -> object:
    return items[int(rng.integers(len(items)))]


def generate_corpus(
    schema: ReportSchema,
    kb: list[KbEntry],
    n_dialogues: int,
    negation_rate: float,
    noise: NoiseConfig,
    seed: int,
    config: GeneratorConfig | None = None,
) -> list[GoldCase]:
    if n_dialogues <= 0:
        raise CorpusError("n_dialogues must be positive")
    if not 0.0 <= negation_rate <= 1.0:
        raise CorpusError(f"negation_rate {negation_rate} not in [0,1]")
    cfg = config or GeneratorConfig()
    by_type: dict[EntityType, list[KbEntry]] = {}
    for e in kb:
        by_type.setdefault(e.etype, []).append(e)
    needed = {f.etype for t in schema.topics for f in t.fields if f.etype != EntityType.DATE}
    for t in schema.topics:
        for et in _PROBE_ETYPES.get(t.topic_id, []):
            if et != EntityType.DATE:
                needed.add(et)
    missing = [et.value for et in needed if not by_type.get(et)]
    if missing:
        raise CorpusError(f"KB has no entries for required entity types: {missing}")

    rng = np.random.default_rng(seed)
    cases = []
    for d in range(n_dialogues):
        cases.append(_generate_dialogue(f"dlg_{seed}_{d:04d}", schema, by_type,
                                        negation_rate, noise, rng, cfg))
    return cases


def _generate_dialogue(
    dialogue_id: str,
    schema: ReportSchema,
    by_type: dict[EntityType, list[KbEntry]],
    negation_rate: float,
    noise: NoiseConfig,
    rng: np.random.Generator,
    cfg: GeneratorConfig,
) -> GoldCase:
    b = _DialogueBuilder(noise)
    report: dict[str, list[str]] = {f.field_id: [] for _, f in schema.fields()}

    def field_id(topic: TopicSpec, etype: EntityType) -> str | None:
        for f in topic.fields:
            if f.etype == etype:
                return f.field_id
        return None

    def add_report_value(topic: TopicSpec, etype: EntityType, value: str) -> None:
        fid = field_id(topic, etype)
        if fid is not None and value not in report[fid]:
            report[fid].append(value)

    def entity_surface(entry: KbEntry) -> str:
        if entry.aliases and rng.random() < cfg.alias_rate:
            return str(_choice(rng, list(entry.aliases)))
        return entry.canonical

    for text, speaker, is_q in _GREETING:
        b.add(text, speaker, topic=None, question=is_q, negation=False)

    for _cycle in range(cfg.topic_cycles):
        used_ids: set[str] = set()
        for topic in schema.topics:
            # 1. opener: one of the topic's standard questions, verbatim
            opener = str(_choice(rng, _STANDARD_QUESTIONS[topic.topic_id]))
            b.add(opener, Speaker.ASSESSOR, topic.topic_id, question=True, negation=False)

            # 2. claimant answer embedding the topic's entities
            template = str(_choice(rng, _ANSWER_TEMPLATES[topic.topic_id]))
            slot_values: dict[str, tuple[str, EntityType, str]] = {}
            confirmed_here: list[tuple[EntityType, str, str]] = []  # etype, value, surface
            for etype in (EntityType.ADDR, EntityType.HOS, EntityType.DIS, EntityType.EXAM):
                if "{" + etype.value + "}" not in template:
                    continue
                pool = [e for e in by_type[etype] if e.id not in used_ids] or by_type[etype]
                entry: KbEntry = _choice(rng, pool)  # type: ignore[assignment]
                used_ids.add(entry.id)
                surface = entity_surface(entry)
                slot_values[etype.value] = (surface, etype, entry.id)
                confirmed_here.append((etype, entry.canonical, surface))
            if "{Date}" in template:
                surface, norm = _synth_date(rng)
                slot_values["Date"] = (surface, EntityType.DATE, norm)
                confirmed_here.append((EntityType.DATE, norm, surface))
            answer, mentions = _fill(template, slot_values)
            b.add(answer, Speaker.CLAIMANT, topic.topic_id, question=False,
                  negation=False, mentions=mentions)
            for etype, value, _surf in confirmed_here:
                add_report_value(topic, etype, value)

            # 3. occasional assessor restatement (confirms an already
            #    confirmed value, non-question)
            if confirmed_here and rng.random() < cfg.restate_rate:
                etype, value, surface = confirmed_here[int(rng.integers(len(confirmed_here)))]
                linked = value if etype == EntityType.DATE else next(
                    e.id for e in by_type[etype] if e.canonical == value)
                text, mentions = _fill(str(_choice(rng, _RESTATE_TEMPLATES)),
                                       {"X": (surface, etype, linked)})
                b.add(text, Speaker.ASSESSOR, topic.topic_id, question=False,
                      negation=False, mentions=mentions)

            # 4./5. distractor probes
            for probe_etype in _PROBE_ETYPES.get(topic.topic_id, []):
                if probe_etype == EntityType.DATE:
                    surface, linked = _synth_date(rng)
                    value = linked
                else:
                    pool = [e for e in by_type[probe_etype] if e.id not in used_ids] \
                        or by_type[probe_etype]
                    entry = _choice(rng, pool)  # type: ignore[assignment]
                    used_ids.add(entry.id)
                    surface, linked, value = entity_surface(entry), entry.id, entry.canonical
                text, mentions = _fill(str(_choice(rng, _PROBE_TEMPLATES[probe_etype])),
                                       {"X": (surface, probe_etype, linked)})
                b.add(text, Speaker.ASSESSOR, topic.topic_id, question=True,
                      negation=False, mentions=mentions)

                if rng.random() < negation_rate:
                    b.add(str(_choice(rng, _NEGATIVE_ANSWERS)), Speaker.CLAIMANT,
                          topic.topic_id, question=False, negation=True)
                else:
                    add_report_value(topic, probe_etype, value)
                    if (probe_etype == EntityType.HOS
                            and rng.random() < cfg.extra_date_rate):
                        dsurf, dnorm = _synth_date(rng)
                        atext, amentions = _fill(
                            str(_choice(rng, _POSITIVE_WITH_DATE)),
                            {"Date": (dsurf, EntityType.DATE, dnorm)})
                        b.add(atext, Speaker.CLAIMANT, topic.topic_id,
                              question=False, negation=False, mentions=amentions)
                        add_report_value(topic, EntityType.DATE, dnorm)
                    else:
                        b.add(str(_choice(rng, _POSITIVE_ANSWERS)), Speaker.CLAIMANT,
                              topic.topic_id, question=False, negation=False)

    dialogue, spans = b.build(dialogue_id)
    return GoldCase(dialogue=dialogue, gold_spans=tuple(spans), gold_topics=b.topics,
                    gold_questions=b.questions, gold_negations=b.negations,
                    gold_report=report)
