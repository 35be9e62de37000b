"""Small string primitives shared by segmentation, linking and the corpus
generator: Levenshtein distance, character n-gram profiles, trigram keys."""

from __future__ import annotations

from collections import Counter


def edit_distance(a: str, b: str) -> int:
    """Plain Levenshtein distance (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    # one-row DP; a indexes the row, b the columns
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def bigram_counts(s: str) -> Counter:
    """Multiset of character bigrams, no padding."""
    return Counter(s[i : i + 2] for i in range(len(s) - 1))


def cosine_counts(a: Counter, b: Counter) -> float:
    """Cosine between two count vectors; 0.0 when either is empty."""
    if not a or not b:
        return 0.0
    dot = sum(cnt * b[g] for g, cnt in a.items())
    if dot == 0:
        return 0.0
    na = sum(c * c for c in a.values()) ** 0.5
    nb = sum(c * c for c in b.values()) ** 0.5
    return dot / (na * nb)


def padded_trigrams(s: str) -> set[str]:
    """Character trigrams of a lowercased string padded with two leading and
    two trailing blanks. The padding keeps at least one trigram in common
    between a string and any single-edit corruption of it (length >= 4),
    which is what makes trigram candidate generation lossless for the
    fuzzy-linking guarantee."""
    p = "  " + s.lower() + "  "
    return {p[i : i + 3] for i in range(len(p) - 2)}
