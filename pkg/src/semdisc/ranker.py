"""Service ranking: two independent searches and a weighted combination.

A task reaches services along two routes.  The category route carries
the string-match score of each matched category onto every service
holding it; the concept route scores the cosine between the task's
semantic vector and each service vector sharing at least one concept.
The final score is the convex combination c_score * w1 + s_score * w2;
a service missed by one route contributes 0 on that side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotator import DEFAULT_THRESHOLD, SemanticVector, annotate
from .lexicon import Lexicon
from .registry import ServiceIndex
from .strsim import DEFAULT_PARAMS, IsubParams
from .taxonomy import (
    DEFAULT_MIN_CSCORE,
    DEFAULT_TOP_K_CATEGORIES,
    CategoryMatch,
    CategoryTaxonomy,
    match_categories,
)

DEFAULT_W1 = 0.2
DEFAULT_W2 = 0.8
DEFAULT_TOP_K = 10


@dataclass(frozen=True)
class Weights:
    """Combination weights; must be non-negative and sum to 1."""

    w1: float = DEFAULT_W1
    w2: float = DEFAULT_W2

    def __post_init__(self) -> None:
        if self.w1 < 0.0 or self.w2 < 0.0:
            raise ValueError(f"weights must be non-negative, got {self.w1}, {self.w2}")
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {self.w1} + {self.w2}")


def cosine(a: SemanticVector, b: SemanticVector) -> float:
    """Cosine similarity of two sparse vectors; 0 when either is empty.

    Shared concepts are accumulated in sorted order so equal inputs give
    bit-identical results.
    """
    shared = sorted(a.support() & b.support())
    if not shared:
        return 0.0
    dot = sum(a.weights[c] * b.weights[c] for c in shared)
    denom = a.norm() * b.norm()
    return dot / denom if denom > 0.0 else 0.0


def search_by_category(
    matches: Sequence[CategoryMatch],
    index: ServiceIndex,
) -> dict[int, float]:
    """Category-route scores: service position -> best matched c_score."""
    scores: dict[int, float] = {}
    for match in matches:
        for pos in index.category_postings.get(match.normalized, frozenset()):
            current = scores.get(pos)
            if current is None or match.c_score > current:
                scores[pos] = match.c_score
    return scores


def search_by_concepts(
    task_vector: SemanticVector,
    index: ServiceIndex,
) -> dict[int, float]:
    """Concept-route scores: service position -> cosine similarity.

    Only services sharing at least one concept with the task vector are
    scored; every returned score is > 0.
    """
    candidates: set[int] = set()
    for concept in task_vector.support():
        candidates |= index.concept_postings.get(concept, frozenset())
    return {
        pos: cosine(task_vector, index.services[pos].vector)
        for pos in sorted(candidates)
    }


def combine(c_score: float, s_score: float, weights: Weights) -> float:
    """Weighted combination of the two route scores."""
    return c_score * weights.w1 + s_score * weights.w2


@dataclass(frozen=True)
class RankedResult:
    """One discovered service with both route scores."""

    service: str
    shared_annotations: frozenset[str]
    c_score: float
    s_score: float
    score: float


def rank(
    task_vector: SemanticVector,
    category_matches: Sequence[CategoryMatch],
    index: ServiceIndex,
    weights: Weights = Weights(),
    *,
    top_k: int = DEFAULT_TOP_K,
) -> list[RankedResult]:
    """Rank every service reached by either route, best first.

    Ties break on s_score (descending), then service name.  At most
    ``top_k`` results are returned.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    c_scores = search_by_category(category_matches, index)
    s_scores = search_by_concepts(task_vector, index)
    results = []
    for pos in sorted(c_scores.keys() | s_scores.keys()):
        service = index.services[pos]
        c_score = c_scores.get(pos, 0.0)
        s_score = s_scores.get(pos, 0.0)
        results.append(
            RankedResult(
                service=service.name,
                shared_annotations=frozenset(
                    task_vector.support() & service.vector.support()
                ),
                c_score=c_score,
                s_score=s_score,
                score=combine(c_score, s_score, weights),
            )
        )
    results.sort(key=lambda r: (-r.score, -r.s_score, r.service))
    return results[:top_k]


def discover(
    task_text: str,
    lexicon: Lexicon,
    taxonomy: CategoryTaxonomy,
    index: ServiceIndex,
    weights: Weights = Weights(),
    *,
    threshold: float = DEFAULT_THRESHOLD,
    min_cscore: float = DEFAULT_MIN_CSCORE,
    top_k: int = DEFAULT_TOP_K,
    top_k_categories: int = DEFAULT_TOP_K_CATEGORIES,
    isub_params: IsubParams = DEFAULT_PARAMS,
) -> list[RankedResult]:
    """Full pipeline for one task: annotate, match categories, rank."""
    task_vector = annotate(task_text, lexicon, threshold=threshold)
    matches = match_categories(
        task_text,
        taxonomy,
        min_cscore=min_cscore,
        top_k=top_k_categories,
        params=isub_params,
    )
    return rank(task_vector, matches, index, weights, top_k=top_k)
