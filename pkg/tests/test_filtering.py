import numpy as np
import pytest

from claimlens.corpus import (
    NoiseConfig,
    Speaker,
    default_kb,
    default_schema,
    generate_corpus,
)
from claimlens.filtering import (
    FilteringError,
    NegationClassifier,
    QidExample,
    QuestionClassifier,
    classify_negation,
    classify_question,
    fit_question_classifier,
    make_skewed_benchmark,
    negation_examples,
    question_examples,
    train_negation_classifier,
    train_question_classifier,
)
from claimlens.filtering.benchmark import BENCH_TOPICS
from claimlens.filtering.question import (
    adversarial_objective,
    bce_objective,
    disc_objective,
)
from claimlens.neural import TrainConfig, Vocabulary, finite_diff_check

TOPICS = ["ta", "tb", "tc"]


def tiny_examples(n=12, seed=0):
    rng = np.random.default_rng(seed)
    words = ["how", "much", "noted", "when", "did", "you", "fine", "sure"]
    out = []
    for i in range(n):
        toks = tuple(words[int(rng.integers(len(words)))] for _ in range(4))
        out.append(QidExample(tokens=toks, topic=TOPICS[i % 3], label=i % 2))
    return out


def tiny_model(mode, seed=3, dim=4):
    examples = tiny_examples()
    vocab = Vocabulary.from_token_lists([e.tokens for e in examples])
    return QuestionClassifier(mode, TOPICS, vocab, dim=dim, seed=seed), examples


class TestGradients:
    def test_bce_head_single(self):
        model, examples = tiny_model("single")
        assert finite_diff_check(bce_objective(model, examples), model.store) < 1e-3

    def test_mtl_composite(self):
        model, examples = tiny_model("mtl")
        assert finite_diff_check(bce_objective(model, examples), model.store) < 1e-3

    def test_discriminator_objective(self):
        model, examples = tiny_model("adv_mtl")
        assert finite_diff_check(disc_objective(model, examples), model.store) < 1e-3

    def test_full_adversarial_with_reversal(self):
        model, examples = tiny_model("adv_mtl")
        loss_fn = adversarial_objective(model, examples[:10], lam=1.0)
        assert finite_diff_check(loss_fn, model.store) < 1e-3

    def test_adversarial_identity_exact(self):
        # shared-encoder gradient of the adversarial term == -lambda times
        # the discriminator-only gradient, coordinate-wise
        from claimlens.neural import softmax_ce

        model, examples = tiny_model("adv_mtl")
        lam = 0.7
        shared_names = [n for n in model.store.names() if n.startswith("qid.shared")]

        def shared_grads():
            return {n: model.store.grad(n).copy() for n in shared_names}

        e = examples[0]
        ids = model.vocab.encode(list(e.tokens))
        t = model.topic_index[e.topic]

        model.store.zero_grads()
        logits, cache = model.disc_forward_example(ids)
        _, dlogits = softmax_ce(logits, t)
        model.disc_backward_example(cache, dlogits, reverse_lambda=lam)
        g_adv = shared_grads()

        model.store.zero_grads()
        logits, cache = model.disc_forward_example(ids)
        _, dlogits = softmax_ce(logits, t)
        model.disc_backward_example(cache, dlogits)
        g_disc = shared_grads()

        for name in shared_names:
            np.testing.assert_allclose(g_adv[name], -lam * g_disc[name], atol=1e-6)


class TestQuestionClassifier:
    def test_zero_weights_give_half_probability(self):
        model, _ = tiny_model("mtl")
        for name in model.store.names():
            model.store.value(name)[:] = 0.0
        prob, is_q = classify_question(model, "is this a question", "ta")
        assert prob == 0.5
        assert is_q is False  # strict >

    def test_unknown_topic_rejected(self):
        model, _ = tiny_model("mtl")
        with pytest.raises(FilteringError, match="unknown topic"):
            classify_question(model, "hello there", "nope")

    def test_single_mode_ignores_topic(self):
        model, examples = tiny_model("single")
        model.fit(examples, TrainConfig(learning_rate=0.1, epochs=2, seed=1))
        p1, _ = classify_question(model, "how much", "ta")
        p2, _ = classify_question(model, "how much", "tc")
        assert p1 == p2

    def test_lambda_zero_adv_equals_mtl(self):
        # gradient reversal contributes nothing at lambda=0, so the task
        # parameters come out bit-identical
        _, examples = tiny_model("mtl")
        cfg0 = TrainConfig(learning_rate=0.2, epochs=3, batch_size=4,
                           adversarial_lambda=0.0, seed=5)
        mtl = fit_question_classifier("mtl", examples, TOPICS, cfg0, dim=4)
        adv = fit_question_classifier("adv_mtl", examples, TOPICS, cfg0, dim=4)
        for name in mtl.store.names():
            assert (mtl.store.value(name) == adv.store.value(name)).all(), name

    def test_training_determinism(self):
        _, examples = tiny_model("mtl")
        cfg = TrainConfig(learning_rate=0.2, epochs=3, batch_size=4, seed=5)
        a = fit_question_classifier("adv_mtl", examples, TOPICS, cfg, dim=4)
        b = fit_question_classifier("adv_mtl", examples, TOPICS, cfg, dim=4)
        for name in a.store.names():
            assert (a.store.value(name) == b.store.value(name)).all(), name

    def test_empty_topic_warning(self):
        examples = [e for e in tiny_examples() if e.topic != "tc"]
        cfg = TrainConfig(learning_rate=0.2, epochs=1, batch_size=4, seed=5)
        model = fit_question_classifier("mtl", examples, TOPICS, cfg, dim=4)
        assert any("tc" in w for w in model.training_log.get("warnings", []))


@pytest.fixture(scope="module")
def corpus_models():
    cases = generate_corpus(default_schema(), default_kb(), 25, 0.5,
                            NoiseConfig(char_error_rate=0.05, seed=11), seed=77)
    train, heldout = cases[:20], cases[20:]
    cfg = TrainConfig(learning_rate=0.25, epochs=20, batch_size=16, seed=42)
    qid = train_question_classifier("adv_mtl", train, cfg,
                                    topics=default_schema().topic_ids())
    neg = train_negation_classifier(train, cfg)
    return qid, neg, heldout


class TestTrainedOnCorpus:
    def test_heldout_questions_identified(self, corpus_models):
        qid, _neg, heldout = corpus_models
        hits = total = 0
        for case in heldout:
            for utt in case.dialogue.utterances:
                topic = case.gold_topics.get(utt.index)
                if topic is None or not case.gold_questions.get(utt.index):
                    continue
                if utt.speaker != Speaker.ASSESSOR:
                    continue
                _p, is_q = classify_question(qid, utt.text, topic)
                hits += int(is_q)
                total += 1
        assert total >= 30
        assert hits / total >= 0.95

    def test_heldout_declaratives_rejected(self, corpus_models):
        qid, _neg, heldout = corpus_models
        hits = total = 0
        for case in heldout:
            for utt in case.dialogue.utterances:
                topic = case.gold_topics.get(utt.index)
                if topic is None or utt.speaker != Speaker.CLAIMANT:
                    continue
                _p, is_q = classify_question(qid, utt.text, topic)
                hits += int(not is_q)
                total += 1
        assert total >= 30
        assert hits / total >= 0.9

    def test_heldout_negation_accuracy(self, corpus_models):
        _qid, neg, heldout = corpus_models
        hits = total = 0
        for e in negation_examples(heldout):
            _p, is_neg = classify_negation(neg, e.assessor_prev, e.claimant_prev,
                                           e.current)
            hits += int(is_neg == bool(e.label))
            total += 1
        assert total >= 40
        assert hits / total >= 0.9

    def test_negation_fixture_no_never(self, corpus_models):
        _qid, neg, _ = corpus_models
        _p, is_neg = classify_negation(
            neg, "And Qilu Hospital, any visits on your side?",
            "I was treated for chronic anemia at Mercy General Hospital.",
            "No, never.")
        assert is_neg

    def test_confirmation_not_negative(self, corpus_models):
        _qid, neg, _ = corpus_models
        _p, is_neg = classify_negation(
            neg, "And Qilu Hospital, any visits on your side?", "", "Yes, exactly.")
        assert not is_neg


class TestNegationClassifier:
    def test_zero_weights_give_half(self):
        vocab = Vocabulary(["no", "yes"])
        model = NegationClassifier(vocab, dim=4, seed=0)
        for name in model.store.names():
            model.store.value(name)[:] = 0.0
        prob, is_neg = classify_negation(model, "", "", "no")
        assert prob == 0.5 and is_neg is False

    def test_missing_history_uses_empty_markers(self):
        vocab = Vocabulary(["no"])
        model = NegationClassifier(vocab, dim=4, seed=0)
        prob, _ = classify_negation(model, "", "", "no")
        assert 0.0 < prob < 1.0  # no error on dialogue openers

    def test_empty_current_rejected(self):
        vocab = Vocabulary(["no"])
        model = NegationClassifier(vocab, dim=4, seed=0)
        with pytest.raises(FilteringError):
            classify_negation(model, "a", "b", "")

    def test_degenerate_all_positive_corpus(self):
        cases = generate_corpus(default_schema(), default_kb(), 4, 0.0,
                                NoiseConfig(char_error_rate=0.0, seed=0), seed=3)
        examples = negation_examples(cases)
        assert all(e.label == 0 for e in examples)
        model = train_negation_classifier(
            cases, TrainConfig(learning_rate=0.25, epochs=5, seed=1))
        predictions = [classify_negation(model, e.assessor_prev, e.claimant_prev,
                                         e.current)[1] for e in examples]
        assert not any(predictions)

    def test_retraining_is_deterministic(self):
        cases = generate_corpus(default_schema(), default_kb(), 3, 0.5,
                                NoiseConfig(char_error_rate=0.0, seed=0), seed=3)
        cfg = TrainConfig(learning_rate=0.25, epochs=3, seed=1)
        a = train_negation_classifier(cases, cfg)
        b = train_negation_classifier(cases, cfg)
        for name in a.store.names():
            assert (a.store.value(name) == b.store.value(name)).all()


class TestBenchmark:
    def test_benchmark_is_deterministic(self):
        t1, h1 = make_skewed_benchmark(42)
        t2, h2 = make_skewed_benchmark(42)
        assert t1 == t2 and h1 == h2

    def test_benchmark_is_skewed_with_balanced_heldout(self):
        train, test = make_skewed_benchmark(42)
        from collections import Counter
        train_counts = Counter(e.topic for e in train)
        test_counts = Counter(e.topic for e in test)
        assert train_counts["t0"] > 5 * train_counts["t5"]
        assert len(set(test_counts.values())) == 1

    def test_disc_accuracy_decreases_under_reversal(self):
        # regression on the fixed seed: the warmed-up discriminator loses
        # accuracy as the shared encoder sheds topic information
        train, _ = make_skewed_benchmark(42)
        cfg = TrainConfig(learning_rate=0.25, epochs=40, batch_size=16,
                          adversarial_lambda=1.0, seed=42)
        model = fit_question_classifier("adv_mtl", train, list(BENCH_TOPICS),
                                        cfg, dim=24)
        log = model.training_log["disc_accuracy"]
        assert log[0] > log[-1]
        assert min(log[1:]) < log[0] - 0.1


class TestExampleExtraction:
    def test_question_examples_cover_both_speakers(self):
        cases = generate_corpus(default_schema(), default_kb(), 2, 0.5,
                                NoiseConfig(char_error_rate=0.0, seed=0), seed=3)
        examples = question_examples(cases)
        labels = {e.label for e in examples}
        assert labels == {0, 1}
        # greeting turns have no topic and are excluded
        n_utts = sum(len(c.dialogue.utterances) for c in cases)
        assert len(examples) == n_utts - 4

    def test_negation_windows_order(self):
        cases = generate_corpus(default_schema(), default_kb(), 1, 1.0,
                                NoiseConfig(char_error_rate=0.0, seed=0), seed=3)
        examples = negation_examples(cases)
        negatives = [e for e in examples if e.label == 1]
        assert negatives
        for e in negatives:
            assert e.assessor_prev  # probes always precede negative answers


class TestTaskLabel:
    def test_prediction_sums_to_one(self):
        from claimlens.filtering.question import TaskLabel

        model, examples = tiny_model("adv_mtl")
        label = model.predict_task("how much did you", "tb")
        assert label.t == 1
        assert abs(float(label.t_hat.sum()) - 1.0) < 1e-9
        assert len(label.t_hat) == len(TOPICS)

    def test_rejected_on_non_adversarial(self):
        model, _ = tiny_model("mtl")
        with pytest.raises(FilteringError, match="discriminator"):
            model.predict_task("hello", "ta")

    def test_invalid_distribution_rejected(self):
        import numpy as np
        from claimlens.filtering.question import TaskLabel

        with pytest.raises(FilteringError, match="sum"):
            TaskLabel(t=0, t_hat=np.array([0.5, 0.2]))
