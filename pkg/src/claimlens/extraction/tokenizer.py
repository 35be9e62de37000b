"""Offset-preserving tokenizer.

Splits on whitespace and punctuation boundaries, keeping punctuation as
tokens. Two carve-outs: ISO-style numeric dates (2019-03-01, 2019/3/1)
lex as a single token so the date grammar sees them whole, and runs of
spaceless-script characters (CJK) fall back to one token per character.
Tokens carry character offsets into the original text, so the text is
always reconstructible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"\d{4}[-/]\d{1,2}[-/]\d{1,2}|\w+|[^\w\s]")

# contiguous scripts that are written without spaces
_SPACELESS_RE = re.compile(r"[぀-ヿ㐀-䶿一-鿿豈-﫿]")


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[Token, ...]
    utterance_index: int
    text: str

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str, utterance_index: int = 0) -> TokenSequence:
    if not text:
        raise ValueError("cannot tokenize empty text")
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        piece = m.group(0)
        if _SPACELESS_RE.search(piece):
            for offset, ch in enumerate(piece):
                start = m.start() + offset
                tokens.append(Token(ch, start, start + 1))
        else:
            tokens.append(Token(piece, m.start(), m.end()))
    return TokenSequence(tokens=tuple(tokens), utterance_index=utterance_index, text=text)
