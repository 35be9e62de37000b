import pytest

from claimlens.bundle import train_bundle
from claimlens.corpus import (
    NoiseConfig,
    default_kb,
    default_schema,
    default_standard_questions,
    generate_corpus,
)
from claimlens.linking import build_index
from claimlens.neural import TrainConfig
from claimlens.segmentation import StandardQuestionSet
from claimlens.tracker import PipelineConfig, Tracker

SEED = 42


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def kb():
    return default_kb()


@pytest.fixture(scope="session")
def sq(schema):
    return StandardQuestionSet.from_mapping(default_standard_questions(), schema)


@pytest.fixture(scope="session")
def kb_index(kb):
    return build_index(kb)


TRAIN_SEED = 77


@pytest.fixture(scope="session")
def train_corpus(schema, kb):
    return generate_corpus(schema, kb, 20, 0.5,
                           NoiseConfig(char_error_rate=0.05, seed=TRAIN_SEED),
                           seed=TRAIN_SEED)


@pytest.fixture(scope="session")
def seed42_corpus(schema, kb):
    """Evaluation corpus: disjoint from the training split by seed."""
    return generate_corpus(schema, kb, 10, 0.5,
                           NoiseConfig(char_error_rate=0.05, seed=SEED), seed=SEED)


@pytest.fixture(scope="session")
def bundle(train_corpus, kb, schema):
    cfg = TrainConfig(learning_rate=0.25, epochs=20, batch_size=16,
                      adversarial_lambda=1.0, seed=SEED)
    return train_bundle(train_corpus, kb, schema, cfg,
                        modes=("single", "mtl", "adv_mtl"),
                        tagger_backend="gazetteer")


@pytest.fixture(scope="session")
def tracker(bundle, sq, kb_index):
    return Tracker(sq=sq, tagger=bundle.tagger, qid=bundle.qid["adv_mtl"],
                   neg=bundle.neg, index=kb_index, config=PipelineConfig())


# a short interview whose phrasing matches the generator's templates, so
# the trained gates route it correctly; used by tracker and service tests
SCENARIO_TURNS = [
    ("Assessor", "Have you suffered any major illness in the past?"),
    ("Claimant", "I was treated for chronic anemia at Qilu Hospital. "
                 "They did a tissue biopsy on 2019-03-01."),
    ("Assessor", "And Mercy General Hospital, any visits on your side?"),
    ("Claimant", "No, never."),
    ("Assessor", "Noting Qilu Hospital into the file now."),
    ("Assessor", "What about Lakeshore Hospital, any stays in it?"),
    ("Claimant", "Yes, I did, on 2021-06-01."),
]


@pytest.fixture(scope="session")
def scenario_turns():
    return SCENARIO_TURNS
