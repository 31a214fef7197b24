"""Concept lexicon and information-content scoring.

A lexicon maps concept identifiers to their lexical forms and carries a
word-probability model estimated from those forms.  The information content
(idf) of a word collection is the sum of -log P(w) over its words, so rare
words weigh more than common ones.  Probabilities are estimated with
Laplace add-one smoothing over the corpus of lexical forms; words never
seen in any form fall back to a shared floor probability.

Instances are immutable after construction and safe to share across
threads.
"""
from __future__ import annotations

import hashlib
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Collection, Iterable, Mapping

log = logging.getLogger(__name__)

Tokenizer = Callable[[str], "list[str]"]

_NON_WORD = re.compile(r"[\W_]+", re.UNICODE)


def normalize(
    text: str,
    *,
    stopwords: Collection[str] | None = None,
    stemmer: Callable[[str], str] | None = None,
) -> list[str]:
    """Lowercase, replace punctuation with spaces, and split into words.

    Word order and multiplicity are preserved.  No stopword removal and no
    stemming happen by default; pass ``stopwords`` or a ``stemmer`` callable
    to opt in.  The function is idempotent on its own space-joined output.
    """
    words = _NON_WORD.sub(" ", text.lower()).split()
    if stopwords:
        words = [w for w in words if w not in stopwords]
    if stemmer is not None:
        words = [stemmer(w) for w in words]
    return words


@dataclass(frozen=True)
class Concept:
    """One ontology concept: an identifier plus its lexical forms."""

    id: str
    lexical_forms: frozenset[str]
    source: str = "umls"

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("concept id must be non-empty")
        if not self.lexical_forms:
            raise ValueError(f"concept {self.id}: at least one lexical form required")
        for form in self.lexical_forms:
            if not normalize(form):
                raise ValueError(f"concept {self.id}: form {form!r} has no words")


class Lexicon:
    """Immutable concept collection with a word-probability model.

    ``word_prob`` assigns each known word a probability in (0, 1];
    ``unseen_prob`` is the floor used for words outside the model.  Use
    :meth:`from_concepts` to estimate both from the lexical forms, or pass
    explicit probabilities (useful for fixtures with designed idf values).
    """

    def __init__(
        self,
        concepts: Iterable[Concept],
        word_prob: Mapping[str, float],
        unseen_prob: float,
        *,
        fingerprint: str | None = None,
        tokenizer: Tokenizer = normalize,
    ) -> None:
        by_id: dict[str, Concept] = {}
        for concept in concepts:
            if concept.id in by_id:
                raise ValueError(f"duplicate concept id {concept.id!r}")
            by_id[concept.id] = concept
        for word, prob in word_prob.items():
            if not 0.0 < prob <= 1.0:
                raise ValueError(f"word {word!r}: probability {prob} outside (0, 1]")
        if not 0.0 < unseen_prob <= 1.0:
            raise ValueError(f"unseen probability {unseen_prob} outside (0, 1]")
        self._by_id = by_id
        self._concepts = tuple(by_id[cid] for cid in sorted(by_id))
        self._word_prob = dict(word_prob)
        self.unseen_prob = unseen_prob
        self.tokenizer = tokenizer
        # Tokenize every form once; annotation is read-heavy.
        self._form_words: dict[tuple[str, str], frozenset[str]] = {}
        word_to_concepts: dict[str, set[str]] = {}
        for concept in self._concepts:
            for form in concept.lexical_forms:
                words = frozenset(tokenizer(form))
                self._form_words[concept.id, form] = words
                for word in words:
                    word_to_concepts.setdefault(word, set()).add(concept.id)
        self._word_to_concepts = {
            w: frozenset(cids) for w, cids in word_to_concepts.items()
        }
        self.fingerprint = fingerprint or self._content_fingerprint()

    def _content_fingerprint(self) -> str:
        digest = hashlib.sha256()
        for concept in self._concepts:
            for form in sorted(concept.lexical_forms):
                digest.update(f"{concept.id}\t{concept.source}\t{form}\n".encode())
        for word in sorted(self._word_prob):
            digest.update(f"{word}\t{self._word_prob[word]!r}\n".encode())
        digest.update(f"unseen\t{self.unseen_prob!r}\n".encode())
        return digest.hexdigest()

    @classmethod
    def from_concepts(
        cls,
        concepts: Iterable[Concept],
        *,
        fingerprint: str | None = None,
        tokenizer: Tokenizer = normalize,
    ) -> "Lexicon":
        """Build a lexicon estimating word probabilities from the forms.

        Laplace add-one smoothing: P(w) = (count(w) + 1) / (total + vocab + 1),
        where counts run over every lexical form of every concept, repeated
        words counting once per occurrence.  Unseen words get
        1 / (total + vocab + 1).
        """
        concepts = tuple(concepts)
        counts: Counter[str] = Counter()
        for concept in concepts:
            for form in concept.lexical_forms:
                counts.update(tokenizer(form))
        if not counts:
            raise ValueError("empty lexicon: no lexical forms to estimate from")
        total = sum(counts.values())
        denom = total + len(counts) + 1
        word_prob = {w: (c + 1) / denom for w, c in counts.items()}
        return cls(
            concepts,
            word_prob,
            1.0 / denom,
            fingerprint=fingerprint,
            tokenizer=tokenizer,
        )

    @property
    def concepts(self) -> tuple[Concept, ...]:
        """All concepts in ascending id order."""
        return self._concepts

    def concept(self, concept_id: str) -> Concept:
        return self._by_id[concept_id]

    def __len__(self) -> int:
        return len(self._concepts)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self._by_id

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self._word_prob)

    def probability(self, word: str) -> float:
        return self._word_prob.get(word, self.unseen_prob)

    def idf(self, words: Iterable[str]) -> float:
        """Information content of a word collection: sum of -log P(w).

        Additive over multiset union: a repeated word contributes once per
        occurrence.  Words are summed in sorted order so equal collections
        produce bit-identical floats.  Always >= 0.
        """
        return sum(-math.log(self.probability(w)) for w in sorted(words))

    def form_words(self, concept_id: str, form: str) -> frozenset[str]:
        """Distinct normalized words of one lexical form (precomputed)."""
        return self._form_words[concept_id, form]

    def concepts_with_word(self, word: str) -> frozenset[str]:
        """Ids of concepts having ``word`` in at least one form."""
        return self._word_to_concepts.get(word, frozenset())


def load_lexicon(path: str | Path, *, tokenizer: Tokenizer = normalize) -> Lexicon:
    """Load a tab-separated lexicon file.

    Each record line is ``concept_id<TAB>source<TAB>lexical form``; lines
    starting with ``#`` and blank lines are skipped.  Repeated concept_id
    lines accumulate lexical forms; the same id under two different sources
    is rejected.  The lexicon fingerprint is the SHA-256 of the file bytes.
    """
    path = Path(path)
    raw = path.read_bytes()
    sources: dict[str, str] = {}
    forms: dict[str, set[str]] = {}
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(
                f"{path}: line {lineno}: expected 3 tab-separated fields, "
                f"got {len(fields)}"
            )
        concept_id, source, form = (f.strip() for f in fields)
        if not concept_id or not source or not form:
            raise ValueError(f"{path}: line {lineno}: empty field")
        if not tokenizer(form):
            raise ValueError(f"{path}: line {lineno}: form {form!r} has no words")
        if concept_id in sources and sources[concept_id] != source:
            raise ValueError(
                f"{path}: line {lineno}: concept {concept_id} already declared "
                f"with source {sources[concept_id]!r}, got {source!r}"
            )
        sources[concept_id] = source
        forms.setdefault(concept_id, set()).add(form)
    if not forms:
        raise ValueError(f"{path}: empty lexicon")
    concepts = [
        Concept(cid, frozenset(forms[cid]), sources[cid]) for cid in sorted(forms)
    ]
    return Lexicon.from_concepts(
        concepts,
        fingerprint=hashlib.sha256(raw).hexdigest(),
        tokenizer=tokenizer,
    )
