"""Graph assembly: structural triples from corpus metadata, content triples
from extraction, and one Belong to Category edge per entity.

Structural relations (Belong to Book, Include Chapter, Include Section,
Belong to Category) are deterministic functions of the corpus hierarchy and
are generated here rather than asked of the LLM. Content triples arrive
pre-validated from the extraction report; anything the store still rejects
lands in its quarantine log and the build continues.

Provenance conventions: hierarchy edges cite the first chunk of the chapter
they hang off (for a section or book, the first chunk of its first chapter);
category edges cite the chunk where the entity was first seen.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..corpus import BookSource, Chunk
from ..errors import DomainRangeError, UnknownEntityError
from ..extraction.pipeline import ProvenancedTriple
from ..relations import (
    CONTENT_RELATIONS,
    EntityCategory,
    RelationType,
    default_object_category,
    default_subject_category,
)
from .store import ChunkRef, EntityRecord, GraphStore, QuarantineRecord


def _first_chunk_id(chapter_id: str) -> str:
    return f"{chapter_id}#0000"


def build_graph(
    books: Sequence[BookSource],
    chunks: Iterable[Chunk],
    content_triples: Sequence[ProvenancedTriple],
    *,
    store: GraphStore | None = None,
) -> GraphStore:
    """Assemble a graph store from a chunked corpus and its extracted triples."""
    store = store if store is not None else GraphStore()

    for chunk in chunks:
        store.register_chunk(
            ChunkRef(
                chunk_id=chunk.chunk_id,
                book_title=chunk.book_title,
                section_title=chunk.section_title,
                chapter_title=chunk.chapter_title,
                chunk_index=chunk.chunk_index,
            )
        )

    # entity_id -> chunk cited by that entity's category edge
    first_seen: dict[str, str] = {}

    def seen(record: EntityRecord, chunk_id: str) -> EntityRecord:
        first_seen.setdefault(record.entity_id, chunk_id)
        return record

    for book in books:
        if not book.chapters:
            continue
        book_anchor = _first_chunk_id(book.chapters[0].chapter_id)
        book_entity = seen(store.ensure_entity(book.title, EntityCategory.BOOK), book_anchor)
        for section in book.sections:
            if not section.chapters:
                continue
            section_anchor = _first_chunk_id(section.chapters[0].chapter_id)
            if section.explicit:
                parent = seen(
                    store.ensure_entity(section.title, EntityCategory.SECTION), section_anchor
                )
                store.upsert_triple_ids(
                    book_entity.entity_id,
                    RelationType.INCLUDE_SECTION,
                    parent.entity_id,
                    section_anchor,
                )
            else:
                parent = book_entity
            for chapter in section.chapters:
                anchor = _first_chunk_id(chapter.chapter_id)
                chapter_entity = seen(
                    store.ensure_entity(chapter.title, EntityCategory.CHAPTER), anchor
                )
                store.upsert_triple_ids(
                    parent.entity_id, RelationType.INCLUDE_CHAPTER, chapter_entity.entity_id, anchor
                )
                store.upsert_triple_ids(
                    chapter_entity.entity_id, RelationType.BELONG_TO_BOOK, book_entity.entity_id, anchor
                )

    for item in content_triples:
        chunk_id = item.chunk.chunk_id
        if item.relation not in CONTENT_RELATIONS:
            store.quarantine.append(
                QuarantineRecord(
                    subject=item.subject,
                    relation=item.relation.value,
                    object=item.object,
                    chunk_id=chunk_id,
                    reason="structural relation not accepted from extraction",
                )
            )
            continue
        try:
            subject = seen(
                store.ensure_entity(item.subject, default_subject_category(item.relation)),
                chunk_id,
            )
            obj = seen(
                store.ensure_entity(item.object, default_object_category(item.relation)),
                chunk_id,
            )
            store.upsert_triple_ids(subject.entity_id, item.relation, obj.entity_id, chunk_id)
        except (DomainRangeError, UnknownEntityError):
            continue  # recorded in store.quarantine

    for record in store.entities():
        if record.category is EntityCategory.CATEGORY:
            continue
        category_node = store.ensure_entity(record.category.value, EntityCategory.CATEGORY)
        store.upsert_triple_ids(
            record.entity_id,
            RelationType.BELONG_TO_CATEGORY,
            category_node.entity_id,
            first_seen[record.entity_id],
        )
    return store
