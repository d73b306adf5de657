"""In-memory property graph with typed adjacency and provenance.

Entities are canonical: identity is (normalized name, category), and ids are
content hashes of that pair, so two stores holding the same facts assign the
same ids no matter the insertion order. Triples likewise: one StoredTriple
per distinct (subject, relation, object); duplicate insertions append to its
provenance list instead of creating a second edge, which is how mention
counts stay separable from distinct-edge counts.

Writes are serialized by a lock and ordered so that lock-free readers never
follow an adjacency entry to a missing triple. Nothing is ever removed.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import DomainRangeError, EntityNameError, UnknownEntityError
from ..relations import (
    EntityCategory,
    RelationType,
    object_categories,
    relation_sort_key,
    subject_categories,
)
from .normalize import normalize_entity_name

_ID_SEP = "\x1f"
DIRECTIONS = ("out", "in", "both")


def entity_id_for(name: str, category: EntityCategory) -> str:
    """Content-hash id of a canonical (name, category) pair."""
    digest = hashlib.sha256(f"{category.value}{_ID_SEP}{name}".encode("utf-8"))
    return digest.hexdigest()[:16]


def triple_id_for(subject_id: str, relation: RelationType, object_id: str) -> str:
    digest = hashlib.sha256(
        f"{subject_id}{_ID_SEP}{relation.value}{_ID_SEP}{object_id}".encode("utf-8")
    )
    return digest.hexdigest()[:16]


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    name: str
    category: EntityCategory


@dataclass
class StoredTriple:
    """One distinct edge. ``provenance`` lists every chunk that asserted it,
    duplicates included (it is a multiset, not a set)."""

    triple_id: str
    subject_id: str
    relation: RelationType
    object_id: str
    provenance: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class ChunkRef:
    """Chunk metadata kept for citation rendering."""

    chunk_id: str
    book_title: str
    section_title: str
    chapter_title: str
    chunk_index: int


@dataclass(frozen=True)
class QuarantineRecord:
    subject: str
    relation: str
    object: str
    chunk_id: str
    reason: str


@dataclass
class GraphStats:
    entities_by_category: dict[EntityCategory, int]
    triples_by_relation: dict[RelationType, int]
    entity_total: int
    triple_total: int
    mention_total: int

    def as_dict(self) -> dict:
        return {
            "entities_by_category": {
                c.value: self.entities_by_category[c] for c in EntityCategory
            },
            "triples_by_relation": {
                r.value: self.triples_by_relation[r]
                for r in sorted(RelationType, key=relation_sort_key)
            },
            "entity_total": self.entity_total,
            "triple_total": self.triple_total,
            "mention_total": self.mention_total,
        }


@dataclass
class Subgraph:
    entities: list[EntityRecord]
    triples: list[StoredTriple]


class GraphStore:
    def __init__(self) -> None:
        self._entities: dict[str, EntityRecord] = {}
        self._triples: dict[str, StoredTriple] = {}
        self._out: dict[str, list[str]] = {}
        self._in: dict[str, list[str]] = {}
        self._chunks: dict[str, ChunkRef] = {}
        self.quarantine: list[QuarantineRecord] = []
        self._write_lock = threading.Lock()

    # -- chunks ------------------------------------------------------------

    def register_chunk(self, ref: ChunkRef) -> None:
        with self._write_lock:
            existing = self._chunks.get(ref.chunk_id)
            if existing is not None and existing != ref:
                raise ValueError(
                    f"chunk {ref.chunk_id!r} re-registered with different metadata"
                )
            self._chunks[ref.chunk_id] = ref

    def chunk(self, chunk_id: str) -> ChunkRef | None:
        return self._chunks.get(chunk_id)

    def chunks(self) -> list[ChunkRef]:
        return sorted(self._chunks.values(), key=lambda c: c.chunk_id)

    # -- entities ----------------------------------------------------------

    def find_entity(self, name: str, category: EntityCategory) -> EntityRecord | None:
        return self._entities.get(entity_id_for(normalize_entity_name(name), category))

    def ensure_entity(self, name: str, category: EntityCategory) -> EntityRecord:
        canonical = normalize_entity_name(name)
        eid = entity_id_for(canonical, category)
        record = self._entities.get(eid)
        if record is not None:
            return record
        with self._write_lock:
            record = self._entities.get(eid)
            if record is None:
                record = EntityRecord(entity_id=eid, name=canonical, category=category)
                self._entities[eid] = record
        return record

    def entity(self, entity_id: str) -> EntityRecord:
        record = self._entities.get(entity_id)
        if record is None:
            raise UnknownEntityError(f"no entity with id {entity_id!r}")
        return record

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def entities(self) -> list[EntityRecord]:
        return sorted(self._entities.values(), key=lambda e: (e.category.value, e.name))

    def entities_named(self, name: str) -> list[EntityRecord]:
        """Every entity carrying this canonical name, across categories."""
        try:
            canonical = normalize_entity_name(name)
        except EntityNameError:
            return []
        found = []
        for category in EntityCategory:
            record = self._entities.get(entity_id_for(canonical, category))
            if record is not None:
                found.append(record)
        return found

    # -- triples -----------------------------------------------------------

    def triple(self, triple_id: str) -> StoredTriple:
        stored = self._triples.get(triple_id)
        if stored is None:
            raise UnknownEntityError(f"no triple with id {triple_id!r}")
        return stored

    def triples(self) -> list[StoredTriple]:
        return sorted(
            self._triples.values(),
            key=lambda t: (relation_sort_key(t.relation), t.subject_id, t.object_id),
        )

    def _quarantined(
        self, subject: str, relation: RelationType, obj: str, chunk_id: str, reason: str
    ) -> None:
        self.quarantine.append(
            QuarantineRecord(
                subject=subject,
                relation=relation.value,
                object=obj,
                chunk_id=chunk_id,
                reason=reason,
            )
        )

    def upsert_triple_ids(
        self, subject_id: str, relation: RelationType, object_id: str, chunk_id: str
    ) -> tuple[str, bool]:
        """Insert (or re-assert) an edge between existing entities.

        Returns (triple_id, created). Domain/range violations are recorded in
        the quarantine log and raised as DomainRangeError.
        """
        subject = self.entity(subject_id)
        obj = self.entity(object_id)
        if subject.category not in subject_categories(relation):
            self._quarantined(
                subject.name,
                relation,
                obj.name,
                chunk_id,
                f"subject category {subject.category.value} not allowed for {relation.value}",
            )
            raise DomainRangeError(
                f"{relation.value}: subject {subject.name!r} has category "
                f"{subject.category.value}, which the relation does not allow"
            )
        if obj.category not in object_categories(relation):
            self._quarantined(
                subject.name,
                relation,
                obj.name,
                chunk_id,
                f"object category {obj.category.value} not allowed for {relation.value}",
            )
            raise DomainRangeError(
                f"{relation.value}: object {obj.name!r} has category "
                f"{obj.category.value}, which the relation does not allow"
            )

        tid = triple_id_for(subject_id, relation, object_id)
        with self._write_lock:
            stored = self._triples.get(tid)
            if stored is not None:
                stored.provenance.append(chunk_id)
                return tid, False
            stored = StoredTriple(
                triple_id=tid,
                subject_id=subject_id,
                relation=relation,
                object_id=object_id,
                provenance=[chunk_id],
            )
            # Triple first, adjacency after: readers reach triples via
            # adjacency, so this order keeps them from dangling.
            self._triples[tid] = stored
            self._out.setdefault(subject_id, []).append(tid)
            self._in.setdefault(object_id, []).append(tid)
        return tid, True

    def _assign_position(
        self,
        name: str,
        allowed: frozenset[EntityCategory],
        relation: RelationType,
        other: str,
        chunk_id: str,
        position: str,
    ) -> EntityRecord:
        if len(allowed) == 1:
            (category,) = allowed
            return self.ensure_entity(name, category)
        # Multi-category positions (IncludeChapter subject, BelongToCategory
        # subject) never create: the name must resolve to exactly one
        # existing entity among the allowed categories.
        matches = [e for e in self.entities_named(name) if e.category in allowed]
        if len(matches) == 1:
            return matches[0]
        if position == "subject":
            triple = (name, relation, other)
        else:
            triple = (other, relation, name)
        if not matches:
            self._quarantined(
                triple[0], relation, triple[2], chunk_id, f"{position} {name!r} matches no entity"
            )
            raise UnknownEntityError(
                f"{relation.value}: {position} {name!r} does not resolve to an existing entity"
            )
        cats = ", ".join(sorted(e.category.value for e in matches))
        self._quarantined(
            triple[0], relation, triple[2], chunk_id, f"{position} {name!r} ambiguous ({cats})"
        )
        raise DomainRangeError(
            f"{relation.value}: {position} {name!r} is ambiguous across categories ({cats})"
        )

    def upsert_triple(
        self, subject: str, relation: RelationType, obj: str, chunk_id: str
    ) -> tuple[str, bool]:
        """Insert a triple by entity names, assigning categories from the
        relation signature. Single-category positions create missing
        entities; multi-category positions must resolve to an existing one.
        """
        subject_record = self._assign_position(
            subject, subject_categories(relation), relation, obj, chunk_id, "subject"
        )
        object_record = self._assign_position(
            obj, object_categories(relation), relation, subject, chunk_id, "object"
        )
        return self.upsert_triple_ids(
            subject_record.entity_id, relation, object_record.entity_id, chunk_id
        )

    # -- queries -----------------------------------------------------------

    def out_edges(
        self, entity_id: str, relations: Iterable[RelationType] | None = None
    ) -> list[StoredTriple]:
        return self._edges(self._out, entity_id, relations)

    def in_edges(
        self, entity_id: str, relations: Iterable[RelationType] | None = None
    ) -> list[StoredTriple]:
        return self._edges(self._in, entity_id, relations)

    def _edges(
        self,
        index: dict[str, list[str]],
        entity_id: str,
        relations: Iterable[RelationType] | None,
    ) -> list[StoredTriple]:
        allowed = frozenset(relations) if relations is not None else None
        edges = [self._triples[tid] for tid in index.get(entity_id, ())]
        if allowed is not None:
            edges = [t for t in edges if t.relation in allowed]
        edges.sort(key=lambda t: t.triple_id)
        return edges

    def neighborhood(
        self,
        entity_id: str,
        depth: int,
        relation_filter: Iterable[RelationType] | None = None,
        direction: str = "both",
    ) -> Subgraph:
        """Entities and triples reachable from the seed within ``depth`` hops.

        BFS over directed edges: an edge is included when the endpoint it is
        traversed from lies within depth-1 hops, whether or not the far
        endpoint was already visited.
        """
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
        if depth < 0:
            raise ValueError(f"depth must be non-negative, got {depth}")
        seed = self.entity(entity_id)
        allowed = frozenset(relation_filter) if relation_filter is not None else None

        visited: set[str] = {seed.entity_id}
        included: dict[str, StoredTriple] = {}
        frontier = [seed.entity_id]
        for _ in range(depth):
            if not frontier:
                break
            next_frontier: list[str] = []
            for eid in frontier:
                steps: list[tuple[StoredTriple, str]] = []
                if direction in ("out", "both"):
                    steps += [(t, t.object_id) for t in self.out_edges(eid, allowed)]
                if direction in ("in", "both"):
                    steps += [(t, t.subject_id) for t in self.in_edges(eid, allowed)]
                for triple, far in steps:
                    included[triple.triple_id] = triple
                    if far not in visited:
                        visited.add(far)
                        next_frontier.append(far)
            frontier = next_frontier

        entities = sorted(
            (self._entities[eid] for eid in visited), key=lambda e: (e.category.value, e.name)
        )
        triples = sorted(
            included.values(),
            key=lambda t: (relation_sort_key(t.relation), t.subject_id, t.object_id),
        )
        return Subgraph(entities=entities, triples=triples)

    def relation_stats(self) -> GraphStats:
        by_category = {c: 0 for c in EntityCategory}
        for record in self._entities.values():
            by_category[record.category] += 1
        by_relation = {r: 0 for r in RelationType}
        mentions = 0
        for stored in self._triples.values():
            by_relation[stored.relation] += 1
            mentions += len(stored.provenance)
        return GraphStats(
            entities_by_category=by_category,
            triples_by_relation=by_relation,
            entity_total=len(self._entities),
            triple_total=len(self._triples),
            mention_total=mentions,
        )
