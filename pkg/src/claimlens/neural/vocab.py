"""Token vocabulary with reserved ids: 0=<unk>, 1=<sep>, 2=<empty>."""

from __future__ import annotations

import numpy as np

UNK = "<unk>"
SEP = "<sep>"
EMPTY = "<empty>"
RESERVED = (UNK, SEP, EMPTY)


class Vocabulary:
    def __init__(self, tokens: list[str] = ()):
        self._id: dict[str, int] = {}
        self._tokens: list[str] = []
        for tok in (*RESERVED, *tokens):
            if tok not in self._id:
                self._id[tok] = len(self._tokens)
                self._tokens.append(tok)

    @classmethod
    def from_token_lists(cls, token_lists) -> "Vocabulary":
        seen: dict[str, None] = {}
        for toks in token_lists:
            for t in toks:
                seen.setdefault(t, None)
        return cls(list(seen))

    def __len__(self) -> int:
        return len(self._tokens)

    def id(self, token: str) -> int:
        return self._id.get(token, 0)

    def encode(self, tokens: list[str]) -> np.ndarray:
        if not tokens:
            raise ValueError("cannot encode an empty token sequence")
        return np.array([self.id(t) for t in tokens], dtype=np.int64)

    def tokens(self) -> list[str]:
        return list(self._tokens)

    @classmethod
    def from_tokens(cls, tokens: list[str]) -> "Vocabulary":
        """Rebuild from a serialized full token list (reserved ids included)."""
        if list(tokens[: len(RESERVED)]) != list(RESERVED):
            raise ValueError("token list does not start with the reserved ids")
        return cls(list(tokens[len(RESERVED):]))
