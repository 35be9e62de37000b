from .store import NeuralError, ParameterStore, TrainConfig
from .ops import bce_loss, grad_reverse, sgd_step, sigmoid, softmax, softmax_ce
from .encoders import EncodedVector, MeanPoolEncoder, RecurrentEncoder
from .check import finite_diff_check
from .vocab import EMPTY, RESERVED, SEP, UNK, Vocabulary

__all__ = [
    "NeuralError", "ParameterStore", "TrainConfig", "bce_loss", "grad_reverse",
    "sgd_step", "sigmoid", "softmax", "softmax_ce", "EncodedVector",
    "MeanPoolEncoder", "RecurrentEncoder", "finite_diff_check", "Vocabulary",
    "UNK", "SEP", "EMPTY", "RESERVED",
]
