"""Question identification.

Three training modes share one contract:

  single   one encoder, one sigmoid head, topics ignored
  mtl      a shared encoder plus one private encoder and head per topic;
           the head sees the concatenation [shared; private]
  adv_mtl  mtl plus a topic discriminator on the shared representation;
           the discriminator minimizes its cross-entropy while the shared
           encoder receives that gradient reversed (scaled by lambda), so
           shared features drift topic-invariant

Training alternates one discriminator update and one task update per
batch and is bit-deterministic for a fixed (data, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..neural import (
    MeanPoolEncoder,
    ParameterStore,
    TrainConfig,
    Vocabulary,
    bce_loss,
    grad_reverse,
    sgd_step,
    sigmoid,
    softmax,
)
from .data import FilteringError, QidExample, text_tokens

MODES = ("single", "mtl", "adv_mtl")
SINGLE_TOPIC = "<all>"


@dataclass(frozen=True)
class TaskLabel:
    """Discriminator view of one example: true topic index and the
    predicted topic distribution."""

    t: int
    t_hat: np.ndarray

    def __post_init__(self):
        if not 0 <= self.t < len(self.t_hat):
            raise FilteringError(f"topic index {self.t} out of range")
        if abs(float(self.t_hat.sum()) - 1.0) > 1e-9:
            raise FilteringError("predicted topic distribution must sum to 1")


class QuestionClassifier:
    def __init__(self, mode: str, topics: list[str], vocab: Vocabulary,
                 dim: int = 32, seed: int = 0):
        if mode not in MODES:
            raise FilteringError(f"unknown mode {mode!r}")
        if not topics:
            raise FilteringError("need at least one topic")
        self.mode = mode
        self.topics = tuple(topics)
        self.topic_index = {t: i for i, t in enumerate(self.topics)}
        self.vocab = vocab
        self.dim = dim
        self.store = ParameterStore()
        self.training_log: dict = {}
        rng = np.random.default_rng(seed)
        self.shared = MeanPoolEncoder(self.store, "qid.shared", len(vocab), dim,
                                      rng, role="shared")
        self.privates: dict[str, MeanPoolEncoder] = {}
        head_dim = dim
        if mode != "single":
            for t in self.topics:
                self.privates[t] = MeanPoolEncoder(self.store, f"qid.private.{t}",
                                                   len(vocab), dim, rng, role="private")
            head_dim = 2 * dim
        head_topics = (SINGLE_TOPIC,) if mode == "single" else self.topics
        for t in head_topics:
            self.store.add(f"qid.head.{t}.W", rng.normal(0.0, 0.3, head_dim))
            self.store.add(f"qid.head.{t}.b", np.zeros(1))
        if mode == "adv_mtl":
            # discriminator over the K topics, applied to shared vectors
            self.store.add("qid.disc.U", rng.normal(0.0, 0.3, (dim, len(self.topics))))
            self.store.add("qid.disc.b", np.zeros(len(self.topics)))

    # -- single-example paths (classification, gradient checks) --

    def _head(self, topic: str) -> tuple[np.ndarray, np.ndarray]:
        key = SINGLE_TOPIC if self.mode == "single" else topic
        return self.store.value(f"qid.head.{key}.W"), self.store.value(f"qid.head.{key}.b")

    def forward_example(self, ids: np.ndarray, topic: str):
        if self.mode != "single" and topic not in self.topic_index:
            raise FilteringError(f"unknown topic {topic!r}")
        hs, cache_s = self.shared.forward(ids)
        if self.mode == "single":
            feats, cache_p = hs, None
        else:
            hp, cache_p = self.privates[topic].forward(ids)
            feats = np.concatenate([hs, hp])
        W, b = self._head(topic)
        z = float(W @ feats + b[0])
        return sigmoid(z), (ids, topic, cache_s, cache_p, feats, z)

    def backward_example(self, cache, dz: float) -> None:
        ids, topic, cache_s, cache_p, feats, _z = cache
        key = SINGLE_TOPIC if self.mode == "single" else topic
        W = self.store.value(f"qid.head.{key}.W")
        self.store.grad(f"qid.head.{key}.W")[:] += dz * feats
        self.store.grad(f"qid.head.{key}.b")[:] += dz
        dfeats = dz * W
        if self.mode == "single":
            self.shared.backward(cache_s, dfeats)
        else:
            self.shared.backward(cache_s, dfeats[: self.dim])
            self.privates[topic].backward(cache_p, dfeats[self.dim:])

    def disc_forward_example(self, ids: np.ndarray):
        hs, cache_s = self.shared.forward(ids)
        U = self.store.value("qid.disc.U")
        b = self.store.value("qid.disc.b")
        return hs @ U + b, (cache_s, hs)

    def disc_backward_example(self, cache, dlogits: np.ndarray,
                              into_shared: bool = True,
                              reverse_lambda: float | None = None) -> None:
        """Backprop discriminator logits. With `reverse_lambda` set, the
        gradient entering the shared encoder passes through gradient
        reversal and the discriminator parameters are left untouched."""
        cache_s, hs = cache
        if reverse_lambda is None:
            self.store.grad("qid.disc.U")[:] += np.outer(hs, dlogits)
            self.store.grad("qid.disc.b")[:] += dlogits
        dhs = self.store.value("qid.disc.U") @ dlogits
        if reverse_lambda is not None:
            dhs = grad_reverse(dhs, reverse_lambda)
        if into_shared:
            self.shared.backward(cache_s, dhs)

    def classify(self, text: str, topic: str | None) -> tuple[float, bool]:
        if not text:
            raise FilteringError("cannot classify empty text")
        if self.mode != "single":
            if topic not in self.topic_index:
                raise FilteringError(f"unknown topic {topic!r}")
        ids = self.vocab.encode(list(text_tokens(text)))
        prob, _ = self.forward_example(ids, topic if topic else SINGLE_TOPIC)
        return float(prob), bool(prob > 0.5)

    # -- batched training --

    def _pad(self, examples: list[QidExample]):
        length = max(len(e.tokens) for e in examples)
        ids = np.zeros((len(examples), length), dtype=np.int64)
        mask = np.zeros((len(examples), length))
        for i, e in enumerate(examples):
            enc = self.vocab.encode(list(e.tokens))
            ids[i, : len(enc)] = enc
            mask[i, : len(enc)] = 1.0
        y = np.array([e.label for e in examples], dtype=np.float64)
        t = np.array([self.topic_index.get(e.topic, 0) for e in examples], dtype=np.int64)
        return ids, mask, y, t

    def _task_forward(self, ids, mask, t):
        hs, cache_s = self.shared.forward_batch(ids, mask)
        n = len(ids)
        z = np.zeros(n)
        caches_p = {}
        feats = hs
        if self.mode == "single":
            W, b = self._head(SINGLE_TOPIC)
            z = hs @ W + b[0]
        else:
            feats = np.zeros((n, 2 * self.dim))
            feats[:, : self.dim] = hs
            for ti in np.unique(t):
                sel = t == ti
                topic = self.topics[ti]
                hp, cache_p = self.privates[topic].forward_batch(ids[sel], mask[sel])
                feats[sel, self.dim:] = hp
                caches_p[topic] = (sel, cache_p)
                W, b = self._head(topic)
                z[sel] = feats[sel] @ W + b[0]
        return sigmoid(z), (ids, mask, t, cache_s, caches_p, feats, hs)

    def _task_backward(self, cache, dz: np.ndarray, lam: float) -> None:
        ids, mask, t, cache_s, caches_p, feats, hs = cache
        if self.mode == "single":
            W, _ = self._head(SINGLE_TOPIC)
            self.store.grad(f"qid.head.{SINGLE_TOPIC}.W")[:] += feats.T @ dz
            self.store.grad(f"qid.head.{SINGLE_TOPIC}.b")[:] += dz.sum()
            dhs = np.outer(dz, W)
        else:
            dhs = np.zeros_like(hs)
            for topic, (sel, cache_p) in caches_p.items():
                W, _ = self._head(topic)
                self.store.grad(f"qid.head.{topic}.W")[:] += feats[sel].T @ dz[sel]
                self.store.grad(f"qid.head.{topic}.b")[:] += dz[sel].sum()
                dfeats = np.outer(dz[sel], W)
                dhs[sel] += dfeats[:, : self.dim]
                self.privates[topic].backward_batch(cache_p, dfeats[:, self.dim:])
        if self.mode == "adv_mtl" and lam > 0.0:
            # adversarial pull on the shared encoder; discriminator frozen
            dlogits = self._disc_dlogits(hs, t) / len(t)
            dhs += grad_reverse(dlogits @ self.store.value("qid.disc.U").T, lam)
        self.shared.backward_batch(cache_s, dhs)

    def _disc_dlogits(self, hs: np.ndarray, t: np.ndarray) -> np.ndarray:
        logits = hs @ self.store.value("qid.disc.U") + self.store.value("qid.disc.b")
        logits = logits - logits.max(axis=1, keepdims=True)
        probs = np.exp(logits)
        probs /= probs.sum(axis=1, keepdims=True)
        probs[np.arange(len(t)), t] -= 1.0
        return probs

    def _disc_step(self, ids, mask, t, cfg: TrainConfig) -> None:
        hs, _ = self.shared.forward_batch(ids, mask)
        dlogits = self._disc_dlogits(hs, t) / len(t)
        self.store.grad("qid.disc.U")[:] += hs.T @ dlogits
        self.store.grad("qid.disc.b")[:] += dlogits.sum(axis=0)
        sgd_step(self.store, cfg)

    def disc_accuracy(self, examples: list[QidExample]) -> float:
        ids, mask, _y, t = self._pad(examples)
        hs, _ = self.shared.forward_batch(ids, mask)
        logits = hs @ self.store.value("qid.disc.U") + self.store.value("qid.disc.b")
        return float((logits.argmax(axis=1) == t).mean())

    def predict_task(self, text: str, topic: str) -> TaskLabel:
        """Discriminator prediction for one utterance (adv_mtl only)."""
        if self.mode != "adv_mtl":
            raise FilteringError("only the adversarial model has a discriminator")
        if topic not in self.topic_index:
            raise FilteringError(f"unknown topic {topic!r}")
        ids = self.vocab.encode(list(text_tokens(text)))
        logits, _cache = self.disc_forward_example(ids)
        return TaskLabel(t=self.topic_index[topic], t_hat=softmax(logits))

    def fit(self, examples: list[QidExample], cfg: TrainConfig) -> "QuestionClassifier":
        if not examples:
            raise FilteringError("no training examples")
        if self.mode != "single":
            missing = set(self.topics) - {e.topic for e in examples}
            if missing:
                self.training_log.setdefault("warnings", []).append(
                    f"topics with zero examples keep their initial encoders: "
                    f"{sorted(missing)}")
        rng = np.random.default_rng(cfg.seed)
        n = len(examples)
        disc_acc: list[float] = []
        if self.mode == "adv_mtl":
            # discriminator warmup on the initial shared representations;
            # fixed-order passes so the main rng stream stays aligned with
            # an mtl run of the same seed
            for _ in range(20):
                for start in range(0, n, cfg.batch_size):
                    batch = examples[start : start + cfg.batch_size]
                    ids, mask, _y, t = self._pad(batch)
                    self._disc_step(ids, mask, t, cfg)
            disc_acc.append(self.disc_accuracy(examples))
        for _epoch in range(cfg.epochs):
            order = rng.permutation(n)
            for start in range(0, n, cfg.batch_size):
                batch = [examples[i] for i in order[start : start + cfg.batch_size]]
                ids, mask, y, t = self._pad(batch)
                if self.mode == "adv_mtl":
                    self._disc_step(ids, mask, t, cfg)
                p, cache = self._task_forward(ids, mask, t)
                dz = (p - y) / len(y)
                self._task_backward(cache, dz, cfg.adversarial_lambda)
                sgd_step(self.store, cfg)
            if self.mode == "adv_mtl":
                disc_acc.append(self.disc_accuracy(examples))
        if disc_acc:
            self.training_log["disc_accuracy"] = disc_acc
        return self


def train_question_classifier(mode: str, cases, cfg: TrainConfig,
                              topics: list[str] | None = None,
                              dim: int = 32) -> QuestionClassifier:
    """Train from gold cases; `topics` defaults to the topics present."""
    from .data import question_examples

    examples = question_examples(cases)
    if topics is None:
        topics = sorted({e.topic for e in examples})
    return fit_question_classifier(mode, examples, topics, cfg, dim=dim)


def fit_question_classifier(mode: str, examples: list[QidExample],
                            topics: list[str], cfg: TrainConfig,
                            dim: int = 32) -> QuestionClassifier:
    vocab = Vocabulary.from_token_lists([e.tokens for e in examples])
    model = QuestionClassifier(mode, topics, vocab, dim=dim, seed=cfg.seed)
    return model.fit(examples, cfg)


def classify_question(model: QuestionClassifier, text: str,
                      topic: str | None) -> tuple[float, bool]:
    """Returns (probability, is_question); is_question uses strict > 0.5."""
    return model.classify(text, topic)


# -- objectives for gradient verification -------------------------------
# Each returns a loss_fn suitable for finite_diff_check: it computes the
# scalar objective over the examples and leaves consistent gradients for
# *every* parameter in the model's store.

def bce_objective(model: QuestionClassifier, examples: list[QidExample]):
    def loss_fn(_store):
        model.store.zero_grads()
        total = 0.0
        n = len(examples)
        for e in examples:
            ids = model.vocab.encode(list(e.tokens))
            p, cache = model.forward_example(ids, e.topic)
            loss, dp = bce_loss(p, e.label)
            model.backward_example(cache, dp * p * (1.0 - p) / n)
            total += loss
        return total / n
    return loss_fn


def disc_objective(model: QuestionClassifier, examples: list[QidExample]):
    """Discriminator cross-entropy, backpropagated through the shared
    encoder as well (the discriminator's own training view)."""
    from ..neural import softmax_ce

    def loss_fn(_store):
        model.store.zero_grads()
        total = 0.0
        n = len(examples)
        for e in examples:
            ids = model.vocab.encode(list(e.tokens))
            logits, cache = model.disc_forward_example(ids)
            loss, dlogits = softmax_ce(logits, model.topic_index[e.topic])
            model.disc_backward_example(cache, dlogits / n)
            total += loss
        return total / n
    return loss_fn


def adversarial_objective(model: QuestionClassifier, examples: list[QidExample],
                          lam: float):
    """The task-side adversarial objective J = BCE - lambda * CE whose
    gradient field is exactly what the gradient-reversal training step
    sends to the non-discriminator parameters."""
    from ..neural import softmax_ce

    def loss_fn(_store):
        model.store.zero_grads()
        total = 0.0
        n = len(examples)
        gU = model.store.grad("qid.disc.U")
        gb = model.store.grad("qid.disc.b")
        for e in examples:
            ids = model.vocab.encode(list(e.tokens))
            p, cache = model.forward_example(ids, e.topic)
            loss, dp = bce_loss(p, e.label)
            model.backward_example(cache, dp * p * (1.0 - p) / n)
            logits, dcache = model.disc_forward_example(ids)
            ce, dlogits = softmax_ce(logits, model.topic_index[e.topic])
            model.disc_backward_example(dcache, dlogits / n, reverse_lambda=lam)
            _cache_s, hs = dcache
            gU += -lam * np.outer(hs, dlogits / n)
            gb += -lam * dlogits / n
            total += loss - lam * ce
        return total / n
    return loss_fn
