"""Token taggers.

GazetteerTagger: leftmost-longest alias matching against the KB plus the
closed date grammar; deterministic, no training, confidence 1.0.

TrainableTagger: per-token linear softmax over window features (token
identities in a +-2 window, 3-char prefix/suffix, per-type gazetteer
coverage flags). Predictions are independent per token: no label feeds
back into another token's features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..corpus.dates import is_iso_date_token, is_last_weekday
from ..corpus.model import EntityType, GoldCase, KbEntry
from ..neural import NeuralError, ParameterStore, TrainConfig, sgd_step
from .bio import LABELS, LABEL_INDEX, BioLabel, begin, inside, project_spans
from .tokenizer import TokenSequence, tokenize

_ETYPE_ORDER = {et: i for i, et in enumerate(EntityType)}


class GazetteerTagger:
    backend = "gazetteer"

    def __init__(self, kb: list[KbEntry]):
        self._table: dict[str, list[tuple[tuple[str, ...], EntityType]]] = {}
        for entry in kb:
            for name in entry.names():
                seq = tuple(t.lower() for t in tokenize(name).surfaces())
                if seq:
                    self._table.setdefault(seq[0], []).append((seq, entry.etype))

    def _candidates_at(self, surfaces: list[str], i: int) -> list[tuple[int, int, EntityType]]:
        """(length, etype order, etype) candidates starting at token i."""
        out: list[tuple[int, int, EntityType]] = []
        for seq, etype in self._table.get(surfaces[i], ()):
            if tuple(surfaces[i : i + len(seq)]) == seq:
                out.append((len(seq), _ETYPE_ORDER[etype], etype))
        if is_iso_date_token(surfaces[i]):
            out.append((1, _ETYPE_ORDER[EntityType.DATE], EntityType.DATE))
        if i + 1 < len(surfaces) and is_last_weekday(surfaces[i], surfaces[i + 1]):
            out.append((2, _ETYPE_ORDER[EntityType.DATE], EntityType.DATE))
        return out

    def tag_full(self, toks: TokenSequence) -> tuple[list[BioLabel], list[float]]:
        surfaces = [t.surface.lower() for t in toks.tokens]
        labels = [BioLabel.O] * len(surfaces)
        i = 0
        while i < len(surfaces):
            candidates = self._candidates_at(surfaces, i)
            if not candidates:
                i += 1
                continue
            length, _, etype = max(candidates, key=lambda c: (c[0], -c[1]))
            labels[i] = begin(etype)
            for j in range(i + 1, i + length):
                labels[j] = inside(etype)
            i += length
        return labels, [1.0] * len(surfaces)

    def tag(self, toks: TokenSequence) -> list[BioLabel]:
        return self.tag_full(toks)[0]

    def coverage(self, surfaces: list[str], etype: EntityType) -> list[str]:
        """Greedy per-type B/I/O coverage used as trainable features."""
        out = ["O"] * len(surfaces)
        i = 0
        while i < len(surfaces):
            lengths = [c[0] for c in self._candidates_at(surfaces, i) if c[2] == etype]
            if not lengths:
                i += 1
                continue
            length = max(lengths)
            out[i] = "B"
            for j in range(i + 1, i + length):
                out[j] = "I"
            i += length
        return out


_BOUNDARY = "<s>"
_ABSENT = "<absent>"
N_FEATURES_PER_TOKEN = 5 + 2 + len(EntityType) + 1  # window, affixes, gaz flags, bias


def token_features(surfaces: list[str], coverages: dict[EntityType, list[str]],
                   i: int) -> list[str]:
    feats = []
    for off in (-2, -1, 0, 1, 2):
        j = i + off
        tok = surfaces[j] if 0 <= j < len(surfaces) else _BOUNDARY
        feats.append(f"w{off}={tok}")
    feats.append(f"pre={surfaces[i][:3]}")
    feats.append(f"suf={surfaces[i][-3:]}")
    for etype in EntityType:
        feats.append(f"g:{etype.value}={coverages[etype][i]}")
    feats.append("bias")
    return feats


@dataclass
class TrainableTagger:
    backend = "trainable"

    feature_index: dict[str, int]
    store: ParameterStore
    gazetteer: GazetteerTagger
    metadata: dict = field(default_factory=dict)

    @property
    def weights(self) -> np.ndarray:
        return self.store.value("tagger.W")

    def _featurize(self, toks: TokenSequence) -> np.ndarray:
        surfaces = [t.surface.lower() for t in toks.tokens]
        coverages = {et: self.gazetteer.coverage(surfaces, et) for et in EntityType}
        rows = np.zeros((len(surfaces), N_FEATURES_PER_TOKEN), dtype=np.int64)
        for i in range(len(surfaces)):
            for j, feat in enumerate(token_features(surfaces, coverages, i)):
                rows[i, j] = self.feature_index.get(feat, 0)
        return rows

    def tag_full(self, toks: TokenSequence) -> tuple[list[BioLabel], list[float]]:
        rows = self._featurize(toks)
        scores = self.weights[rows].sum(axis=1)
        scores -= scores.max(axis=1, keepdims=True)
        probs = np.exp(scores)
        probs /= probs.sum(axis=1, keepdims=True)
        picks = probs.argmax(axis=1)
        labels = [LABELS[p] for p in picks]
        return labels, [float(probs[i, p]) for i, p in enumerate(picks)]

    def tag(self, toks: TokenSequence) -> list[BioLabel]:
        return self.tag_full(toks)[0]


def training_rows(case: GoldCase) -> list[tuple[TokenSequence, list[BioLabel]]]:
    """Tokenize every utterance and project the case's gold spans to BIO."""
    spans_by_utt: dict[int, list[tuple[int, int, EntityType]]] = {}
    for s in case.gold_spans:
        spans_by_utt.setdefault(s.utterance_index, []).append(
            (s.char_start, s.char_end, s.etype))
    rows = []
    for utt in case.dialogue.utterances:
        toks = tokenize(utt.text, utt.index)
        if len(toks) == 0:
            continue
        rows.append((toks, project_spans(toks, spans_by_utt.get(utt.index, []))))
    return rows


def train_tagger(cases: list[GoldCase], cfg: TrainConfig,
                 kb: list[KbEntry]) -> TrainableTagger:
    gazetteer = GazetteerTagger(kb)
    feature_index: dict[str, int] = {_ABSENT: 0}
    feat_rows: list[list[int]] = []
    label_ids: list[int] = []
    seen_etypes: set[EntityType] = set()
    for case in cases:
        for s in case.gold_spans:
            seen_etypes.add(s.etype)
        for toks, labels in training_rows(case):
            surfaces = [t.surface.lower() for t in toks.tokens]
            coverages = {et: gazetteer.coverage(surfaces, et) for et in EntityType}
            for i, label in enumerate(labels):
                ids = []
                for feat in token_features(surfaces, coverages, i):
                    if feat not in feature_index:
                        feature_index[feat] = len(feature_index)
                    ids.append(feature_index[feat])
                feat_rows.append(ids)
                label_ids.append(LABEL_INDEX[label])

    metadata: dict = {"n_tokens": len(label_ids)}
    missing = [et.value for et in EntityType if et not in seen_etypes]
    if missing:
        metadata["warnings"] = [f"no training spans for entity types: {missing}"]

    X = np.asarray(feat_rows, dtype=np.int64)
    y = np.asarray(label_ids, dtype=np.int64)
    store = ParameterStore()
    W = store.add("tagger.W", np.zeros((len(feature_index), len(LABELS))))
    gW = store.grad("tagger.W")
    rng = np.random.default_rng(cfg.seed)
    n = len(y)
    for _epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            xb, yb = X[batch], y[batch]
            scores = W[xb].sum(axis=1)
            scores -= scores.max(axis=1, keepdims=True)
            probs = np.exp(scores)
            probs /= probs.sum(axis=1, keepdims=True)
            dscores = probs
            dscores[np.arange(len(yb)), yb] -= 1.0
            dscores /= len(yb)
            np.add.at(gW, xb.ravel(),
                      np.repeat(dscores, N_FEATURES_PER_TOKEN, axis=0))
            sgd_step(store, cfg)
    return TrainableTagger(feature_index=feature_index, store=store,
                           gazetteer=gazetteer, metadata=metadata)


def tag(model, toks: TokenSequence) -> list[BioLabel]:
    """One label per token, argmax per token independently."""
    return model.tag(toks)
