"""Seeded skewed-topic benchmark for comparing the three question-
identification training modes.

Construction: topics come in pairs with a mirror-marker scheme: within a
pair (A, B), marker tokens mA and mB both occur equally often, but mA
means "question" inside topic A and "statement" inside topic B (and vice
versa). A topic-blind model therefore gets zero net signal from markers
and can only exploit the weaker topic-invariant cue words, while
topic-aware models can read the markers through their private encoders.
Topic sizes are heavily skewed; the held-out set is balanced, so the rare
topics dominate the comparison.
"""

from __future__ import annotations

import numpy as np

from ..neural import TrainConfig
from .data import QidExample
from .question import MODES, QuestionClassifier, fit_question_classifier

BENCH_TOPICS = ("t0", "t1", "t2", "t3", "t4", "t5")
_PAIR_MARKERS = {
    ("t0", "t1"): ("alpha", "beta"),
    ("t2", "t3"): ("gamma", "delta"),
    ("t4", "t5"): ("epsilon", "zeta"),
}
_TRAIN_COUNTS = {"t0": 100, "t1": 100, "t2": 40, "t3": 40, "t4": 14, "t5": 14}
_TEST_PER_TOPIC = 30
_CUE_RATE = 0.6
_Q_CUE, _S_CUE = "surely", "indeed"
_FILLERS = tuple(f"word{i:02d}" for i in range(30))
# topic-identifying vocabulary, uniform across labels: carries no
# question/statement signal but gives the discriminator something real
# to detect (and the reversal something real to scrub)
_CTX = {t: tuple(f"ctx_{t}_{j}" for j in range(4)) for t in BENCH_TOPICS}


def _markers_for(topic: str) -> tuple[str, str]:
    """(question marker, statement marker) of a topic."""
    for (a, b), (ma, mb) in _PAIR_MARKERS.items():
        if topic == a:
            return ma, mb
        if topic == b:
            return mb, ma
    raise KeyError(topic)


def _make_example(topic: str, label: int, rng: np.random.Generator) -> QidExample:
    q_marker, s_marker = _markers_for(topic)
    tokens = [q_marker if label else s_marker]
    if rng.random() < _CUE_RATE:
        tokens.append(_Q_CUE if label else _S_CUE)
    ctx = _CTX[topic]
    tokens.extend(ctx[int(rng.integers(len(ctx)))] for _ in range(2))
    n_fill = int(rng.integers(4, 8))
    tokens.extend(_FILLERS[int(rng.integers(len(_FILLERS)))] for _ in range(n_fill))
    order = rng.permutation(len(tokens))
    return QidExample(tokens=tuple(tokens[i] for i in order), topic=topic, label=label)


def make_skewed_benchmark(seed: int = 42) -> tuple[list[QidExample], list[QidExample]]:
    rng = np.random.default_rng([seed, 0xBE0C])
    train: list[QidExample] = []
    for topic in BENCH_TOPICS:
        for i in range(_TRAIN_COUNTS[topic]):
            train.append(_make_example(topic, i % 2, rng))
    test: list[QidExample] = []
    for topic in BENCH_TOPICS:
        for i in range(_TEST_PER_TOPIC):
            test.append(_make_example(topic, i % 2, rng))
    return train, test


def qid_accuracy(model: QuestionClassifier, examples: list[QidExample]) -> float:
    correct = 0
    for e in examples:
        _prob, is_q = model.classify(" ".join(e.tokens), e.topic)
        correct += int(is_q == bool(e.label))
    return correct / len(examples)


def run_mode_comparison(seed: int = 42, cfg: TrainConfig | None = None,
                        dim: int = 24) -> dict[str, float]:
    """Train all three modes on the seeded benchmark; returns held-out
    accuracy per mode."""
    train, test = make_skewed_benchmark(seed)
    cfg = cfg or TrainConfig(learning_rate=0.25, epochs=40, batch_size=16,
                             adversarial_lambda=1.0, seed=seed)
    return {mode: qid_accuracy(
        fit_question_classifier(mode, train, list(BENCH_TOPICS), cfg, dim=dim), test)
        for mode in MODES}
