"""Category taxonomy and task-to-category matching.

A taxonomy is a flat list of category names.  Matching scores the full
task text against each category name with the ISub metric, keeps
categories at or above a minimum score, and returns the best ones first.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .strsim import DEFAULT_PARAMS, IsubParams, clamp_cscore, isub, normalize_string

DEFAULT_MIN_CSCORE = 0.4
DEFAULT_TOP_K_CATEGORIES = 3


class CategoryTaxonomy:
    """Immutable set of category names, unique after normalization."""

    def __init__(self, names: Iterable[str]) -> None:
        display: dict[str, str] = {}
        for name in names:
            key = normalize_string(name)
            if not key:
                raise ValueError(f"category {name!r} has no words")
            if key in display and display[key] != name.strip():
                raise ValueError(f"duplicate category after normalization: {name!r}")
            display.setdefault(key, name.strip())
        if not display:
            raise ValueError("empty taxonomy")
        self._display = display
        self._names = tuple(sorted(display.values()))

    @property
    def names(self) -> tuple[str, ...]:
        """Display names in sorted order."""
        return self._names

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return normalize_string(name) in self._display


def load_taxonomy(path: str | Path) -> CategoryTaxonomy:
    """Load one category name per line; ``#`` lines and blanks skipped."""
    path = Path(path)
    names = [
        line.strip()
        for line in path.read_text("utf-8").splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    if not names:
        raise ValueError(f"{path}: empty taxonomy")
    return CategoryTaxonomy(names)


@dataclass(frozen=True)
class CategoryMatch:
    """One matched category; c_score is the clamped ISub similarity."""

    category: str
    c_score: float

    @property
    def normalized(self) -> str:
        return normalize_string(self.category)


def match_categories(
    task_text: str,
    taxonomy: CategoryTaxonomy,
    *,
    min_cscore: float = DEFAULT_MIN_CSCORE,
    top_k: int = DEFAULT_TOP_K_CATEGORIES,
    params: IsubParams = DEFAULT_PARAMS,
) -> list[CategoryMatch]:
    """Best-matching categories for a task, highest score first.

    Scores below ``min_cscore`` are dropped; at most ``top_k`` results are
    returned.  Ties break on category name.
    """
    if not 0.0 <= min_cscore <= 1.0:
        raise ValueError(f"min_cscore {min_cscore} outside [0, 1]")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    matches = [
        CategoryMatch(name, clamp_cscore(isub(task_text, name, params)))
        for name in taxonomy.names
    ]
    matches = [m for m in matches if m.c_score >= min_cscore]
    matches.sort(key=lambda m: (-m.c_score, m.category))
    return matches[:top_k]
