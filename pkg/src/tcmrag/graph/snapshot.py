"""Canonical snapshot serialization for the graph store.

A snapshot is UTF-8, line-delimited JSON: a versioned header carrying record
counts, then chunk records sorted by id, entity records sorted by category
and name, and triple records sorted by relation, subject and object with
their provenance lists sorted. Record layout is documented in
docs/formats.md. Because every section is sorted and ids are content
hashes, stores holding the same facts serialize to identical bytes.

Loading validates everything it reads and raises SnapshotError naming the
offending line; a failed load never returns a partial store.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO

from ..errors import DomainRangeError, SnapshotError
from ..relations import EntityCategory, RelationType
from .store import ChunkRef, GraphStore, entity_id_for, triple_id_for

FORMAT_NAME = "tcm-graph-snapshot"
FORMAT_VERSION = 1

_SURFACE_TO_RELATION = {r.value: r for r in RelationType}
_SURFACE_TO_CATEGORY = {c.value: c for c in EntityCategory}


def _dump(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def snapshot_text(store: GraphStore) -> str:
    """Render the canonical snapshot as one string."""
    chunks = store.chunks()
    entities = store.entities()
    triples = store.triples()
    lines = [
        _dump(
            {
                "format": FORMAT_NAME,
                "version": FORMAT_VERSION,
                "chunks": len(chunks),
                "entities": len(entities),
                "triples": len(triples),
            }
        )
    ]
    for ref in chunks:
        lines.append(
            _dump(
                {
                    "kind": "chunk",
                    "chunk_id": ref.chunk_id,
                    "book": ref.book_title,
                    "section": ref.section_title,
                    "chapter": ref.chapter_title,
                    "index": ref.chunk_index,
                }
            )
        )
    for entity in entities:
        lines.append(
            _dump(
                {
                    "kind": "entity",
                    "id": entity.entity_id,
                    "name": entity.name,
                    "category": entity.category.value,
                }
            )
        )
    for triple in triples:
        lines.append(
            _dump(
                {
                    "kind": "triple",
                    "id": triple.triple_id,
                    "subject": triple.subject_id,
                    "relation": triple.relation.value,
                    "object": triple.object_id,
                    "provenance": sorted(triple.provenance),
                }
            )
        )
    return "\n".join(lines) + "\n"


def save_snapshot(store: GraphStore, sink: str | Path | IO[str]) -> None:
    text = snapshot_text(store)
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text, encoding="utf-8")
    else:
        sink.write(text)


def _require(record: dict, key: str, kind: type, line_no: int):
    value = record.get(key)
    if not isinstance(value, kind):
        raise SnapshotError(f"line {line_no}: field {key!r} missing or not {kind.__name__}")
    return value


def load_snapshot(source: str | Path | IO[str]) -> GraphStore:
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise SnapshotError(f"cannot read snapshot: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise SnapshotError(f"snapshot is not valid UTF-8: {exc}") from exc
    else:
        text = source.read()

    lines = text.splitlines()
    if not lines:
        raise SnapshotError("snapshot is empty (missing header)")

    def parse_line(line_no: int) -> dict:
        try:
            record = json.loads(lines[line_no - 1])
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"line {line_no}: not valid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise SnapshotError(f"line {line_no}: record is not an object")
        return record

    header = parse_line(1)
    if header.get("format") != FORMAT_NAME:
        raise SnapshotError(f"line 1: unrecognized snapshot format {header.get('format')!r}")
    if header.get("version") != FORMAT_VERSION:
        raise SnapshotError(f"line 1: unsupported snapshot version {header.get('version')!r}")
    counts = {key: _require(header, key, int, 1) for key in ("chunks", "entities", "triples")}
    expected_lines = 1 + counts["chunks"] + counts["entities"] + counts["triples"]
    if len(lines) != expected_lines:
        raise SnapshotError(
            f"snapshot truncated or padded: header promises {expected_lines} lines, found {len(lines)}"
        )

    store = GraphStore()
    line_no = 1

    for _ in range(counts["chunks"]):
        line_no += 1
        record = parse_line(line_no)
        if record.get("kind") != "chunk":
            raise SnapshotError(f"line {line_no}: expected a chunk record, got {record.get('kind')!r}")
        store.register_chunk(
            ChunkRef(
                chunk_id=_require(record, "chunk_id", str, line_no),
                book_title=_require(record, "book", str, line_no),
                section_title=_require(record, "section", str, line_no),
                chapter_title=_require(record, "chapter", str, line_no),
                chunk_index=_require(record, "index", int, line_no),
            )
        )

    for _ in range(counts["entities"]):
        line_no += 1
        record = parse_line(line_no)
        if record.get("kind") != "entity":
            raise SnapshotError(f"line {line_no}: expected an entity record, got {record.get('kind')!r}")
        name = _require(record, "name", str, line_no)
        category = _SURFACE_TO_CATEGORY.get(_require(record, "category", str, line_no))
        if category is None:
            raise SnapshotError(f"line {line_no}: unknown entity category {record['category']!r}")
        declared = _require(record, "id", str, line_no)
        if declared != entity_id_for(name, category):
            raise SnapshotError(
                f"line {line_no}: entity id {declared!r} does not match its name and category"
            )
        store.ensure_entity(name, category)

    for _ in range(counts["triples"]):
        line_no += 1
        record = parse_line(line_no)
        if record.get("kind") != "triple":
            raise SnapshotError(f"line {line_no}: expected a triple record, got {record.get('kind')!r}")
        relation = _SURFACE_TO_RELATION.get(_require(record, "relation", str, line_no))
        if relation is None:
            raise SnapshotError(f"line {line_no}: unknown relation {record['relation']!r}")
        subject_id = _require(record, "subject", str, line_no)
        object_id = _require(record, "object", str, line_no)
        if not store.has_entity(subject_id) or not store.has_entity(object_id):
            raise SnapshotError(f"line {line_no}: triple references an undeclared entity")
        declared = _require(record, "id", str, line_no)
        if declared != triple_id_for(subject_id, relation, object_id):
            raise SnapshotError(
                f"line {line_no}: triple id {declared!r} does not match its endpoints"
            )
        provenance = _require(record, "provenance", list, line_no)
        if not provenance or not all(isinstance(p, str) for p in provenance):
            raise SnapshotError(f"line {line_no}: provenance must be a non-empty list of chunk ids")
        try:
            for chunk_id in provenance:
                store.upsert_triple_ids(subject_id, relation, object_id, chunk_id)
        except DomainRangeError as exc:
            raise SnapshotError(f"line {line_no}: {exc}") from exc
    return store
