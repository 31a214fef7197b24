"""String similarity for category matching.

Implements the ISub metric: similarity is commonality minus difference
plus a Winkler-style prefix reward.  Commonality sums iteratively removed
longest common substrings; difference combines the unmatched fractions of
both strings through a Hamacher product; the prefix reward scales with
the unmatched commonality.  Scores live in [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

from .lexicon import normalize

# Substrings shorter than this carry no signal and are ignored, matching
# the reference implementation of the metric.
DEFAULT_MIN_SUBSTRING_LEN = 3


@dataclass(frozen=True)
class IsubParams:
    """Tuning constants for :func:`isub`."""

    min_substring_len: int = DEFAULT_MIN_SUBSTRING_LEN
    hamacher_p: float = 0.6
    winkler_scale: float = 0.1
    winkler_prefix_cap: int = 4

    def __post_init__(self) -> None:
        if self.min_substring_len < 1:
            raise ValueError("min_substring_len must be >= 1")
        if not 0.0 <= self.hamacher_p <= 1.0:
            raise ValueError(f"hamacher_p {self.hamacher_p} outside [0, 1]")
        if self.winkler_scale < 0.0 or self.winkler_prefix_cap < 0:
            raise ValueError("winkler constants must be non-negative")


DEFAULT_PARAMS = IsubParams()


def normalize_string(text: str) -> str:
    """Normalization used before scoring: lowercase, punctuation to
    spaces, spaces collapsed.  Mirrors the lexicon tokenizer."""
    return " ".join(normalize(text))


def _longest_common_substring(s1: str, s2: str) -> tuple[int, int, int]:
    """Length and start offsets of the longest common substring.

    Ties take the leftmost occurrence in s1, then in s2.  O(len1 * len2).
    """
    best_len = 0
    best_i = best_j = 0
    previous = [0] * (len(s2) + 1)
    for i in range(1, len(s1) + 1):
        current = [0] * (len(s2) + 1)
        c1 = s1[i - 1]
        for j in range(1, len(s2) + 1):
            if c1 == s2[j - 1]:
                length = previous[j - 1] + 1
                current[j] = length
                if length > best_len:
                    best_len = length
                    best_i = i - length
                    best_j = j - length
        previous = current
    return best_len, best_i, best_j


def _matched_total(s1: str, s2: str, min_len: int) -> int:
    """Total length of iteratively removed common substrings."""
    total = 0
    while s1 and s2:
        length, i, j = _longest_common_substring(s1, s2)
        if length < min_len:
            break
        total += length
        s1 = s1[:i] + s1[i + length :]
        s2 = s2[:j] + s2[j + length :]
    return total


def isub(s1: str, s2: str, params: IsubParams = DEFAULT_PARAMS) -> float:
    """ISub similarity of two strings, in [-1, 1].

    Both inputs are normalized first; equal normalized strings (including
    two empty ones) score exactly 1, and an empty string against a
    non-empty one scores -1.  The metric is symmetric: arguments are
    ordered canonically before scoring so ties in substring selection
    cannot depend on argument order.
    """
    a = normalize_string(s1)
    b = normalize_string(s2)
    if a == b:
        return 1.0
    if not a or not b:
        return -1.0
    if (len(a), a) > (len(b), b):
        a, b = b, a

    matched = _matched_total(a, b, params.min_substring_len)
    commonality = 2.0 * matched / (len(a) + len(b))

    unmatched_a = (len(a) - matched) / len(a)
    unmatched_b = (len(b) - matched) / len(b)
    product = unmatched_a * unmatched_b
    denom = params.hamacher_p + (1.0 - params.hamacher_p) * (
        unmatched_a + unmatched_b - product
    )
    # denom is 0 only when p is 0 and nothing went unmatched.
    difference = product / denom if denom > 0.0 else 0.0

    prefix = 0
    for ca, cb in zip(a, b):
        if ca != cb:
            break
        prefix += 1
    prefix = min(prefix, params.winkler_prefix_cap)
    winkler = prefix * params.winkler_scale * (1.0 - commonality)

    return commonality - difference + winkler


def clamp_cscore(value: float) -> float:
    """Map a similarity onto the category-score scale [0, 1]."""
    return max(0.0, value)
