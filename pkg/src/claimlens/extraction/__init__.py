from .tokenizer import Token, TokenSequence, tokenize
from .bio import (
    LABELS,
    LABEL_INDEX,
    BioLabel,
    TaggedSpan,
    begin,
    decode_spans,
    inside,
    project_spans,
    split_label,
)
from .tagger import (
    GazetteerTagger,
    TrainableTagger,
    tag,
    token_features,
    train_tagger,
    training_rows,
)

__all__ = [
    "Token", "TokenSequence", "tokenize", "LABELS", "LABEL_INDEX", "BioLabel",
    "TaggedSpan", "begin", "decode_spans", "inside", "project_spans", "split_label",
    "GazetteerTagger", "TrainableTagger", "tag", "token_features", "train_tagger",
    "training_rows",
]
