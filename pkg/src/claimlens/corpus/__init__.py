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
from .dates import normalize_date
from .io import (
    load_corpus,
    load_gold_case,
    load_kb,
    load_schema,
    load_transcript,
    save_corpus,
    save_gold_case,
    save_kb,
    save_schema,
    save_transcript,
)
from .noise import corrupt_text, corrupt_with_spans
from .generate import (
    GeneratorConfig,
    default_kb,
    default_schema,
    default_standard_questions,
    generate_corpus,
    validate_generated_kb,
)

__all__ = [
    "CorpusError", "Dialogue", "EntityType", "FieldSpec", "GoldCase", "GoldSpan",
    "KbEntry", "NoiseConfig", "ReportSchema", "Speaker", "TopicSpec", "Utterance",
    "normalize_date", "load_corpus", "load_gold_case", "load_kb", "load_schema",
    "load_transcript", "save_corpus", "save_gold_case", "save_kb", "save_schema",
    "save_transcript", "corrupt_text", "corrupt_with_spans", "GeneratorConfig",
    "default_kb", "default_schema", "default_standard_questions", "generate_corpus",
    "validate_generated_kb",
]
