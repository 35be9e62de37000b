from .data import (
    FilteringError,
    NegExample,
    QidExample,
    negation_examples,
    negation_windows,
    question_examples,
    text_tokens,
)
from .question import (
    MODES,
    QuestionClassifier,
    TaskLabel,
    classify_question,
    fit_question_classifier,
    train_question_classifier,
)
from .negation import (
    NegationClassifier,
    classify_negation,
    train_negation_classifier,
    window_tokens,
)
from .benchmark import (
    BENCH_TOPICS,
    make_skewed_benchmark,
    qid_accuracy,
    run_mode_comparison,
)

__all__ = [
    "FilteringError", "NegExample", "QidExample", "negation_examples",
    "negation_windows", "question_examples", "text_tokens", "MODES",
    "QuestionClassifier", "TaskLabel", "classify_question", "fit_question_classifier",
    "train_question_classifier", "NegationClassifier", "classify_negation",
    "train_negation_classifier", "window_tokens", "BENCH_TOPICS",
    "make_skewed_benchmark", "qid_accuracy", "run_mode_comparison",
]
