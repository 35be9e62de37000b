"""ModelBundle: every trained component in one versioned text file.

Layout:

    #claimlens-model-v1
    [section meta]
    meta {...bundle metadata...}
    [section tagger]
    meta {"backend": ...}
    param tagger.W 1024x11 ...
    [section qid.adv]
    meta {"mode": "adv_mtl", "topics": [...], "dim": 32, "vocab": [...]}
    param qid.shared.emb ...
    [section neg]
    ...

Floats carry 17 significant digits, so save -> load -> save round-trips
byte-identically and deterministic training yields bit-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import MODEL_HEADER
from .corpus.model import GoldCase, KbEntry, ReportSchema
from .extraction.tagger import GazetteerTagger, TrainableTagger, train_tagger
from .filtering.negation import NegationClassifier, train_negation_classifier
from .filtering.question import MODES, QuestionClassifier, train_question_classifier
from .neural import ParameterStore, TrainConfig, Vocabulary


class BundleError(ValueError):
    pass


_MODE_SECTIONS = {"single": "qid.single", "mtl": "qid.mtl", "adv_mtl": "qid.adv"}
_SECTION_MODES = {v: k for k, v in _MODE_SECTIONS.items()}


@dataclass
class ModelBundle:
    tagger: TrainableTagger | GazetteerTagger
    qid: dict[str, QuestionClassifier]
    neg: NegationClassifier | None
    metadata: dict = field(default_factory=dict)

    def require(self, qid_mode: str) -> None:
        missing = []
        if self.tagger is None:
            missing.append("tagger")
        if qid_mode not in self.qid:
            missing.append(_MODE_SECTIONS.get(qid_mode, qid_mode))
        if self.neg is None:
            missing.append("neg")
        if missing:
            raise BundleError(f"bundle is missing model sections: {missing}")


def train_bundle(
    cases: list[GoldCase],
    kb: list[KbEntry],
    schema: ReportSchema,
    cfg: TrainConfig,
    modes: tuple[str, ...] = ("adv_mtl",),
    tagger_backend: str = "gazetteer",
    tagger_cfg: TrainConfig | None = None,
) -> ModelBundle:
    for mode in modes:
        if mode not in MODES:
            raise BundleError(f"unknown question-identification mode {mode!r}")
    if tagger_backend == "gazetteer":
        tagger = GazetteerTagger(kb)
    elif tagger_backend == "trainable":
        tagger = train_tagger(cases, tagger_cfg or
                              TrainConfig(learning_rate=0.3, epochs=4, seed=cfg.seed), kb)
    else:
        raise BundleError(f"unknown tagger backend {tagger_backend!r}")
    qid = {mode: train_question_classifier(mode, cases, cfg,
                                           topics=schema.topic_ids())
           for mode in modes}
    neg = train_negation_classifier(cases, cfg)
    metadata = {
        "train_case_ids": [c.dialogue.id for c in cases],
        "schema_topics": schema.topic_ids(),
        "qid_modes": list(modes),
        "tagger_backend": tagger_backend,
        "train_config": {"learning_rate": cfg.learning_rate, "epochs": cfg.epochs,
                         "batch_size": cfg.batch_size,
                         "adversarial_lambda": cfg.adversarial_lambda,
                         "seed": cfg.seed},
    }
    return ModelBundle(tagger=tagger, qid=qid, neg=neg, metadata=metadata)


# -- serialization --

def _section_lines(meta: dict, store: ParameterStore | None) -> list[str]:
    lines = ["meta " + json.dumps(meta, ensure_ascii=False, sort_keys=True)]
    if store is not None:
        lines.extend(store.to_lines())
    return lines


def save_bundle(path: str | Path, bundle: ModelBundle) -> None:
    path = Path(path)
    out: list[str] = [MODEL_HEADER]

    def section(name: str, lines: list[str]) -> None:
        out.append(f"[section {name}]")
        out.extend(lines)

    section("meta", _section_lines(bundle.metadata, None))
    if isinstance(bundle.tagger, GazetteerTagger):
        section("tagger", _section_lines({"backend": "gazetteer"}, None))
    else:
        features = sorted(bundle.tagger.feature_index,
                          key=bundle.tagger.feature_index.get)
        section("tagger", _section_lines(
            {"backend": "trainable", "features": features,
             "metadata": bundle.tagger.metadata},
            bundle.tagger.store))
    for mode in sorted(bundle.qid):
        model = bundle.qid[mode]
        section(_MODE_SECTIONS[mode], _section_lines(
            {"mode": mode, "topics": list(model.topics), "dim": model.dim,
             "vocab": model.vocab.tokens()},
            model.store))
    if bundle.neg is not None:
        section("neg", _section_lines(
            {"dim": bundle.neg.dim, "vocab": bundle.neg.vocab.tokens()},
            bundle.neg.store))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")


def _split_sections(lines: list[str]) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in lines:
        if line.startswith("[section ") and line.endswith("]"):
            name = line[len("[section "):-1]
            current = sections.setdefault(name, [])
        elif line.strip():
            if current is None:
                raise BundleError(f"content before first section: {line[:40]!r}")
            current.append(line)
    return sections


def _parse_section(lines: list[str]) -> tuple[dict, ParameterStore]:
    if not lines or not lines[0].startswith("meta "):
        raise BundleError("section missing its meta line")
    meta = json.loads(lines[0][len("meta "):])
    store = ParameterStore.from_lines(lines[1:])
    return meta, store


def _rebuild_qid(meta: dict, store: ParameterStore) -> QuestionClassifier:
    vocab = Vocabulary.from_tokens(meta["vocab"])
    model = QuestionClassifier(meta["mode"], meta["topics"], vocab,
                               dim=meta["dim"], seed=0)
    model.store.load_values(store.params)
    return model


def load_bundle(path: str | Path, kb: list[KbEntry]) -> ModelBundle:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != MODEL_HEADER:
        raise BundleError(f"{path}: expected header {MODEL_HEADER!r}")
    sections = _split_sections(lines[1:])

    metadata: dict = {}
    if "meta" in sections:
        metadata, _ = _parse_section(sections["meta"])

    if "tagger" not in sections:
        raise BundleError("bundle is missing model sections: ['tagger']")
    tmeta, tstore = _parse_section(sections["tagger"])
    if tmeta["backend"] == "gazetteer":
        tagger: TrainableTagger | GazetteerTagger = GazetteerTagger(kb)
    else:
        feature_index = {f: i for i, f in enumerate(tmeta["features"])}
        tagger = TrainableTagger(feature_index=feature_index, store=tstore,
                                 gazetteer=GazetteerTagger(kb),
                                 metadata=tmeta.get("metadata", {}))

    qid: dict[str, QuestionClassifier] = {}
    for name, mode in _SECTION_MODES.items():
        if name in sections:
            qmeta, qstore = _parse_section(sections[name])
            qid[mode] = _rebuild_qid(qmeta, qstore)

    neg = None
    if "neg" in sections:
        nmeta, nstore = _parse_section(sections["neg"])
        neg = NegationClassifier(Vocabulary.from_tokens(nmeta["vocab"]),
                                 dim=nmeta["dim"], seed=0)
        neg.store.load_values(nstore.params)

    return ModelBundle(tagger=tagger, qid=qid, neg=neg, metadata=metadata)
