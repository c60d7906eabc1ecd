"""Character-trigram similarity used wherever a lexical comparison is needed.

Strings are normalized (camelCase split, lowercased, punctuation stripped,
whitespace collapsed) and padded with one space on each side before the
trigram set is taken. Similarity is the set cosine |A & B| / sqrt(|A| |B|).
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from functools import lru_cache
from typing import Iterable, Optional

_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_NON_ALNUM = re.compile(r"[^0-9a-z]+")
_TOKEN = re.compile(r"[0-9a-z]+")


@lru_cache(maxsize=200_000)
def normalize(text: str) -> str:
    text = _CAMEL.sub(" ", text).lower()
    return _NON_ALNUM.sub(" ", text).strip()


@lru_cache(maxsize=200_000)
def trigrams(text: str) -> frozenset:
    norm = normalize(text)
    if not norm:
        return frozenset()
    padded = f" {norm} "
    return frozenset(padded[i:i + 3] for i in range(len(padded) - 2))


def trigram_similarity(a: str, b: str) -> float:
    ta, tb = trigrams(a), trigrams(b)
    if not ta or not tb:
        return 0.0
    if ta == tb:
        return 1.0
    return len(ta & tb) / math.sqrt(len(ta) * len(tb))


def tokens(text: str) -> set[str]:
    """Lowercase alphanumeric word tokens."""
    return set(_TOKEN.findall(text.lower()))


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


class LabelIndex:
    """Trigram inverted index answering best-label lookups.

    ``entries`` are (key, label) pairs; one key may carry several labels.
    Ties on the best score resolve to the smallest key.
    """

    def __init__(self, entries: Iterable[tuple[str, str]]):
        self._labels: list[tuple[str, frozenset]] = []
        self._postings: dict[str, list[int]] = defaultdict(list)
        for key, label in sorted(set(entries)):
            grams = trigrams(label)
            if not grams:
                continue
            idx = len(self._labels)
            self._labels.append((key, grams))
            for g in grams:
                self._postings[g].append(idx)

    def __len__(self) -> int:
        return len(self._labels)

    def scores(self, text: str) -> dict[str, float]:
        """Best similarity per key for every key sharing a trigram with ``text``."""
        grams = trigrams(text)
        if not grams:
            return {}
        overlap: dict[int, int] = defaultdict(int)
        for g in grams:
            for idx in self._postings.get(g, ()):
                overlap[idx] += 1
        best: dict[str, float] = {}
        for idx, shared in overlap.items():
            key, other = self._labels[idx]
            score = 1.0 if other == grams else shared / math.sqrt(len(grams) * len(other))
            if score > best.get(key, -1.0):
                best[key] = score
        return best

    def best(self, text: str, threshold: float = 0.0) -> Optional[tuple[str, float]]:
        scored = self.scores(text)
        if not scored:
            return None
        key, score = min(scored.items(), key=lambda kv: (-kv[1], kv[0]))
        if score < threshold:
            return None
        return key, score
