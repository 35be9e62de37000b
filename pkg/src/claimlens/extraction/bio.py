"""BIO label set over the five entity types, span <-> label projection and
the repair rules for decoding non-autoregressive tag sequences:

  * an orphan I-x (no open span, or an open span of another type) is
    promoted to B-x and starts a new span;
  * every B always starts a new span, closing any open one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..corpus.model import EntityType
from .tokenizer import TokenSequence


class BioLabel(str, Enum):
    O = "O"
    B_ADDR = "B-Addr"
    I_ADDR = "I-Addr"
    B_HOS = "B-Hos"
    I_HOS = "I-Hos"
    B_DIS = "B-Dis"
    I_DIS = "I-Dis"
    B_DATE = "B-Date"
    I_DATE = "I-Date"
    B_EXAM = "B-Exam"
    I_EXAM = "I-Exam"


LABELS = tuple(BioLabel)
LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}


def begin(etype: EntityType) -> BioLabel:
    return BioLabel(f"B-{etype.value}")


def inside(etype: EntityType) -> BioLabel:
    return BioLabel(f"I-{etype.value}")


def split_label(label: BioLabel) -> tuple[str, EntityType | None]:
    if label == BioLabel.O:
        return "O", None
    kind, _, etype = label.value.partition("-")
    return kind, EntityType(etype)


@dataclass(frozen=True)
class TaggedSpan:
    etype: EntityType
    surface: str
    char_start: int
    char_end: int
    utterance_index: int
    confidence: float = 1.0


def decode_spans(
    toks: TokenSequence,
    labels: list[BioLabel],
    confidences: list[float] | None = None,
) -> list[TaggedSpan]:
    if len(labels) != len(toks):
        raise ValueError(f"got {len(labels)} labels for {len(toks)} tokens")
    spans: list[TaggedSpan] = []
    open_type: EntityType | None = None
    start_tok = 0

    def close(end_tok: int) -> None:
        nonlocal open_type
        if open_type is None:
            return
        cs = toks.tokens[start_tok].char_start
        ce = toks.tokens[end_tok].char_end
        conf = confidences[start_tok] if confidences is not None else 1.0
        spans.append(TaggedSpan(etype=open_type, surface=toks.text[cs:ce],
                                char_start=cs, char_end=ce,
                                utterance_index=toks.utterance_index,
                                confidence=conf))
        open_type = None

    for i, label in enumerate(labels):
        kind, etype = split_label(label)
        if kind == "O":
            close(i - 1)
        elif kind == "B":
            close(i - 1)
            open_type = etype
            start_tok = i
        else:  # I
            if open_type != etype:
                close(i - 1)  # orphan or type switch: promote to a new span
                open_type = etype
                start_tok = i
    close(len(labels) - 1)
    return spans


def project_spans(
    toks: TokenSequence,
    spans: list[tuple[int, int, EntityType]],
) -> list[BioLabel]:
    """Project character spans onto token labels; a token belongs to a span
    if their character ranges overlap."""
    labels = [BioLabel.O] * len(toks)
    for cs, ce, etype in sorted(spans):
        first = True
        for i, tok in enumerate(toks.tokens):
            if tok.char_start < ce and tok.char_end > cs:
                labels[i] = begin(etype) if first else inside(etype)
                first = False
    return labels
