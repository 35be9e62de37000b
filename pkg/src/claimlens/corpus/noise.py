"""Character-level transcription-noise simulation.

The corruptor walks the text once, left to right. Every alphanumeric
character is independently hit with probability `char_error_rate`; a hit
draws one of the enabled operations:

  substitute  replace with a different character of the same class
              (letter -> lowercase letter, digit -> digit)
  delete      drop the character
  insert      emit the character followed by one extra same-class character

Whitespace and punctuation are never touched and never produced, so word
boundaries survive corruption and annotated spans can be mapped through it.
The RNG stream is derived from (seed, sha256(text)), making every call a
pure function of (text, config).
"""

from __future__ import annotations

import hashlib
import string

import numpy as np

from .model import NoiseConfig

_LETTERS = string.ascii_lowercase
_DIGITS = string.digits


def _rng_for(text: str, seed: int) -> np.random.Generator:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return np.random.default_rng([seed % (2**63), int.from_bytes(digest[:8], "big")])


def _pick_char(rng: np.random.Generator, original: str, must_differ: bool) -> str:
    pool = _DIGITS if original.isdigit() else _LETTERS
    idx = int(rng.integers(len(pool)))
    if must_differ and pool[idx] == original:
        idx = (idx + 1) % len(pool)
    return pool[idx]


def corrupt_with_spans(
    text: str,
    spans: list[tuple[int, int]],
    noise: NoiseConfig,
) -> tuple[str, list[tuple[int, int] | None]]:
    """Corrupt `text`, mapping each [start, end) span into the corrupted
    string. A span whose characters were all deleted maps to None. A
    character inserted after a span's last character grows the span."""
    rng = _rng_for(text, noise.seed)
    rate = noise.char_error_rate
    ops = noise.operations
    out: list[str] = []
    out_start = [0] * len(text)
    out_len = [0] * len(text)
    pos = 0
    for i, ch in enumerate(text):
        out_start[i] = pos
        if not ch.isalnum() or rate == 0.0 or rng.random() >= rate:
            out.append(ch)
            out_len[i] = 1
            pos += 1
            continue
        op = ops[int(rng.integers(len(ops)))]
        if op == "delete":
            out_len[i] = 0
        elif op == "substitute":
            out.append(_pick_char(rng, ch, must_differ=True))
            out_len[i] = 1
            pos += 1
        else:  # insert
            out.append(ch)
            out.append(_pick_char(rng, ch, must_differ=False))
            out_len[i] = 2
            pos += 2
    corrupted = "".join(out)
    mapped: list[tuple[int, int] | None] = []
    for start, end in spans:
        alive = [i for i in range(start, end) if out_len[i] > 0]
        if not alive:
            mapped.append(None)
        else:
            mapped.append((out_start[alive[0]], out_start[alive[-1]] + out_len[alive[-1]]))
    return corrupted, mapped


def corrupt_text(text: str, noise: NoiseConfig) -> str:
    if not text:
        raise ValueError("corrupt_text requires non-empty text")
    corrupted, _ = corrupt_with_spans(text, [], noise)
    return corrupted
