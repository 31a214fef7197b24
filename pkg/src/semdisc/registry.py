"""Service registry ingestion and the annotated service index.

Registry dumps are JSON-lines files: one JSON object per line with the
fields ``name``, ``description``, ``documentation``, ``tags`` and
``categories``.  Absent fields stay absent (None) and are distinguished
from empty strings.

An index annotates every service once and stores the resulting vectors
with two posting tables (concept -> services, category -> services) so
queries never rescan raw text.  On disk the index is a small binary
envelope: ``SDIX`` magic, format version, the fingerprint of the lexicon
it was built from, a JSON payload in canonical service order, and a
trailing SHA-256 checksum.

Index instances are immutable after construction; build, save and load
are pure functions of their inputs, so concurrent readers need no
locking.
"""
from __future__ import annotations

import hashlib
import json
import logging
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .annotator import DEFAULT_THRESHOLD, Annotation, SemanticVector, annotate
from .lexicon import Lexicon
from .strsim import normalize_string

log = logging.getLogger(__name__)

MAGIC = b"SDIX"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ServiceRecord:
    """One registry entry as ingested, field presence preserved."""

    name: str
    description: str | None = None
    documentation: str | None = None
    tags: tuple[str, ...] = ()
    categories: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise ValueError("service name must be non-empty")


def annotation_text(record: ServiceRecord) -> str:
    """Text a service is annotated from.

    The description when available, otherwise the documentation, followed
    by the tags and the category names.  A present-but-blank description
    counts as unavailable.  Empty result means nothing to annotate.
    """
    primary = (record.description or "").strip()
    if not primary:
        primary = (record.documentation or "").strip()
    parts = [primary, *record.tags, *record.categories]
    return " ".join(p for p in parts if p).strip()


def ingest_registry(path: str | Path) -> list[ServiceRecord]:
    """Parse a JSON-lines registry dump.

    Raises on malformed JSON or wrong field types (naming the line) and
    on duplicate service names (naming every duplicate).  Records missing
    both description and documentation are accepted but logged.
    """
    path = Path(path)
    records: list[ServiceRecord] = []
    for lineno, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ValueError(f"{path}: line {lineno}: record must be an object")
        try:
            record = _record_from_object(obj)
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from exc
        if record.description is None and record.documentation is None:
            log.warning(
                "%s: line %d: service %r has no description or documentation",
                path, lineno, record.name,
            )
        records.append(record)
    duplicates = _duplicate_names(records)
    if duplicates:
        raise ValueError(f"{path}: duplicate service names: {', '.join(duplicates)}")
    return records


def _record_from_object(obj: dict) -> ServiceRecord:
    name = obj.get("name")
    if not isinstance(name, str):
        raise ValueError("field 'name' must be a string")
    for key in ("description", "documentation"):
        if key in obj and obj[key] is not None and not isinstance(obj[key], str):
            raise ValueError(f"field {key!r} must be a string")
    lists: dict[str, tuple[str, ...]] = {}
    for key in ("tags", "categories"):
        value = obj.get(key, [])
        if value is None:
            value = []
        if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
            raise ValueError(f"field {key!r} must be a list of strings")
        lists[key] = tuple(value)
    return ServiceRecord(
        name=name,
        description=obj.get("description"),
        documentation=obj.get("documentation"),
        tags=lists["tags"],
        categories=lists["categories"],
    )


def _duplicate_names(records: Iterable[ServiceRecord]) -> list[str]:
    seen: set[str] = set()
    duplicates: list[str] = []
    for record in records:
        if record.name in seen and record.name not in duplicates:
            duplicates.append(record.name)
        seen.add(record.name)
    return duplicates


@dataclass(frozen=True)
class AnnotatedService:
    """A service record plus its semantic vector."""

    record: ServiceRecord
    vector: SemanticVector

    @property
    def name(self) -> str:
        return self.record.name

    def normalized_categories(self) -> tuple[str, ...]:
        return tuple(normalize_string(c) for c in self.record.categories)


@dataclass(frozen=True)
class ServiceIndex:
    """Annotated services in canonical (name) order plus posting tables.

    Postings map concept ids and normalized category names to positions
    in :attr:`services`.
    """

    services: tuple[AnnotatedService, ...]
    concept_postings: Mapping[str, frozenset[int]]
    category_postings: Mapping[str, frozenset[int]]
    lexicon_fingerprint: str

    def __len__(self) -> int:
        return len(self.services)

    def check_consistency(self) -> None:
        """Verify postings and vectors agree in both directions."""
        for concept, positions in self.concept_postings.items():
            for pos in positions:
                if concept not in self.services[pos].vector.weights:
                    raise AssertionError(
                        f"posting {concept} -> {pos} has no matching vector entry"
                    )
        for pos, service in enumerate(self.services):
            for concept in service.vector.support():
                if pos not in self.concept_postings.get(concept, frozenset()):
                    raise AssertionError(
                        f"vector entry {concept} of {service.name} not in postings"
                    )
            for category in service.normalized_categories():
                if pos not in self.category_postings.get(category, frozenset()):
                    raise AssertionError(
                        f"category {category!r} of {service.name} not in postings"
                    )
        for category, positions in self.category_postings.items():
            for pos in positions:
                if category not in self.services[pos].normalized_categories():
                    raise AssertionError(
                        f"posting {category!r} -> {pos} has no matching service category"
                    )


def build_index(
    records: Iterable[ServiceRecord],
    lexicon: Lexicon,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> ServiceIndex:
    """Annotate every record and assemble the posting tables.

    Records are sorted by name before positions are assigned, so the
    result does not depend on input order or on how work is split across
    ``workers`` threads.
    """
    ordered = sorted(records, key=lambda r: r.name)
    duplicates = _duplicate_names(ordered)
    if duplicates:
        raise ValueError(f"duplicate service names: {', '.join(duplicates)}")
    texts = [annotation_text(r) for r in ordered]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(
                pool.map(lambda t: annotate(t, lexicon, threshold=threshold), texts)
            )
    else:
        vectors = [annotate(t, lexicon, threshold=threshold) for t in texts]
    services = tuple(
        AnnotatedService(record=r, vector=v) for r, v in zip(ordered, vectors)
    )
    concept_postings: dict[str, set[int]] = {}
    category_postings: dict[str, set[int]] = {}
    for pos, service in enumerate(services):
        for concept in service.vector.support():
            concept_postings.setdefault(concept, set()).add(pos)
        for category in service.normalized_categories():
            category_postings.setdefault(category, set()).add(pos)
    return ServiceIndex(
        services=services,
        concept_postings={c: frozenset(p) for c, p in concept_postings.items()},
        category_postings={c: frozenset(p) for c, p in category_postings.items()},
        lexicon_fingerprint=lexicon.fingerprint,
    )


def _index_payload(index: ServiceIndex) -> bytes:
    services = []
    for service in index.services:
        record = service.record
        vector = service.vector
        services.append(
            {
                "name": record.name,
                "description": record.description,
                "documentation": record.documentation,
                "tags": list(record.tags),
                "categories": list(record.categories),
                "weights": {c: vector.weights[c] for c in sorted(vector.weights)},
                "provenance": {
                    c: {
                        "lexical_form": a.lexical_form,
                        "similarity": a.similarity,
                        "tf": a.tf,
                        "idf_value": a.idf_value,
                        "matched_words": sorted(a.matched_words),
                    }
                    for c, a in sorted(vector.provenance.items())
                },
            }
        )
    payload = {
        "services": services,
        "concept_postings": {
            c: sorted(p) for c, p in sorted(index.concept_postings.items())
        },
        "category_postings": {
            c: sorted(p) for c, p in sorted(index.category_postings.items())
        },
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_index(index: ServiceIndex, path: str | Path) -> None:
    """Write the binary index file; byte-identical for equal indexes."""
    payload = _index_payload(index)
    fingerprint = index.lexicon_fingerprint.encode("ascii")
    body = (
        MAGIC
        + struct.pack(">I", FORMAT_VERSION)
        + struct.pack(">H", len(fingerprint))
        + fingerprint
        + struct.pack(">Q", len(payload))
        + payload
    )
    Path(path).write_bytes(body + hashlib.sha256(body).digest())


def load_index(path: str | Path) -> ServiceIndex:
    """Read an index file, verifying magic, version and checksum."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise ValueError(f"{path}: not a service index file")
    if len(raw) < 32 or hashlib.sha256(raw[:-32]).digest() != raw[-32:]:
        raise ValueError(f"{path}: checksum mismatch, file corrupt or truncated")
    offset = 4
    (version,) = struct.unpack_from(">I", raw, offset)
    offset += 4
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported index format version {version}")
    (fp_len,) = struct.unpack_from(">H", raw, offset)
    offset += 2
    fingerprint = raw[offset : offset + fp_len].decode("ascii")
    offset += fp_len
    (payload_len,) = struct.unpack_from(">Q", raw, offset)
    offset += 8
    payload = json.loads(raw[offset : offset + payload_len].decode("utf-8"))
    services = []
    for entry in payload["services"]:
        provenance = {
            c: Annotation(
                concept_id=c,
                lexical_form=p["lexical_form"],
                similarity=p["similarity"],
                tf=p["tf"],
                idf_value=p["idf_value"],
                matched_words=frozenset(p["matched_words"]),
            )
            for c, p in entry["provenance"].items()
        }
        services.append(
            AnnotatedService(
                record=ServiceRecord(
                    name=entry["name"],
                    description=entry["description"],
                    documentation=entry["documentation"],
                    tags=tuple(entry["tags"]),
                    categories=tuple(entry["categories"]),
                ),
                vector=SemanticVector(
                    weights=dict(entry["weights"]), provenance=provenance
                ),
            )
        )
    return ServiceIndex(
        services=tuple(services),
        concept_postings={
            c: frozenset(p) for c, p in payload["concept_postings"].items()
        },
        category_postings={
            c: frozenset(p) for c, p in payload["category_postings"].items()
        },
        lexicon_fingerprint=fingerprint,
    )
