"""Word tokenization underlying all n-gram metrics.

The rule set is frozen: changing it silently changes every score, so any
revision must come with refreshed expected values in the test suite.
"""

from __future__ import annotations

import re

# A token is a run of Unicode word characters (minus underscore), optionally
# joined by internal apostrophes: "don't" stays one token, leading/trailing
# apostrophes are stripped, all punctuation is dropped.
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")

_APOSTROPHES = str.maketrans({"’": "'", "ʼ": "'"})


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens of ``text``; empty input gives an empty list."""
    normalized = text.lower().translate(_APOSTROPHES)
    return _TOKEN_RE.findall(normalized)


def ngrams(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    """All order-``n`` n-grams, in order; empty when fewer than ``n`` tokens."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]
