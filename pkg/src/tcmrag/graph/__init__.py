"""Multi-relational property graph: store, canonical snapshots, graph build."""

from .build import build_graph
from .snapshot import load_snapshot, save_snapshot, snapshot_text
from .store import (
    ChunkRef,
    EntityRecord,
    GraphStats,
    GraphStore,
    QuarantineRecord,
    StoredTriple,
    Subgraph,
    entity_id_for,
    normalize_entity_name,
    triple_id_for,
)

__all__ = [
    "ChunkRef",
    "EntityRecord",
    "GraphStats",
    "GraphStore",
    "QuarantineRecord",
    "StoredTriple",
    "Subgraph",
    "entity_id_for",
    "normalize_entity_name",
    "triple_id_for",
    "build_graph",
    "load_snapshot",
    "save_snapshot",
    "snapshot_text",
]
