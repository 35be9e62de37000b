"""Training-example extraction from gold cases."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.model import GoldCase, Speaker
from ..extraction.tokenizer import tokenize


class FilteringError(ValueError):
    pass


@dataclass(frozen=True)
class QidExample:
    tokens: tuple[str, ...]
    topic: str
    label: int  # 1 = question


@dataclass(frozen=True)
class NegExample:
    assessor_prev: str
    claimant_prev: str
    current: str
    label: int  # 1 = negative semantics


def text_tokens(text: str) -> tuple[str, ...]:
    return tuple(t.lower() for t in tokenize(text).surfaces())


def question_examples(cases: list[GoldCase]) -> list[QidExample]:
    """One example per topic-labeled utterance, both speakers; claimant
    turns act as declarative negatives."""
    out = []
    for case in cases:
        for utt in case.dialogue.utterances:
            topic = case.gold_topics.get(utt.index)
            if topic is None:
                continue
            out.append(QidExample(tokens=text_tokens(utt.text), topic=topic,
                                  label=int(case.gold_questions.get(utt.index, False))))
    return out


def negation_windows(case: GoldCase, index: int) -> tuple[str, str]:
    """(assessor_prev, claimant_prev) texts before `index`, empty if absent."""
    assessor_prev = ""
    claimant_prev = ""
    for utt in case.dialogue.utterances:
        if utt.index >= index:
            break
        if utt.speaker == Speaker.ASSESSOR:
            assessor_prev = utt.text
        else:
            claimant_prev = utt.text
    return assessor_prev, claimant_prev


def negation_examples(cases: list[GoldCase]) -> list[NegExample]:
    out = []
    for case in cases:
        for utt in case.dialogue.utterances:
            if utt.speaker != Speaker.CLAIMANT:
                continue
            a_prev, c_prev = negation_windows(case, utt.index)
            out.append(NegExample(assessor_prev=a_prev, claimant_prev=c_prev,
                                  current=utt.text,
                                  label=int(case.gold_negations.get(utt.index, False))))
    return out
