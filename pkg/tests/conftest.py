"""Shared fixtures and random-graph helpers for the test suite."""

from __future__ import annotations

import random

import pytest

from tcmrag.demo import build_demo_report, build_demo_store, demo_client
from tcmrag.graph import GraphStore
from tcmrag.relations import (
    CONTENT_RELATIONS,
    EntityCategory,
    RelationType,
    default_object_category,
    default_subject_category,
)


@pytest.fixture(scope="session")
def demo_store() -> GraphStore:
    return build_demo_store()


@pytest.fixture(scope="session")
def demo_extraction_report():
    return build_demo_report()


@pytest.fixture()
def mock_client():
    return demo_client()


def make_random_content_graph(rng: random.Random, max_entities: int = 50, max_edges: int = 300):
    """Random store of content triples plus the matching oracle edge list.

    Entities are typed so every inserted edge satisfies its relation
    signature. Returns (store, edges) where edges are oracle tuples
    (triple_id, subject_id, relation, object_id).
    """
    store = GraphStore()
    relations = list(CONTENT_RELATIONS)
    by_category: dict[EntityCategory, list[str]] = {}
    n_entities = rng.randint(2, max_entities)
    for i in range(n_entities):
        relation = rng.choice(relations)
        category = rng.choice(
            [default_subject_category(relation), default_object_category(relation)]
        )
        entity_id = store.ensure_entity(f"e{i:03d}", category).entity_id
        by_category.setdefault(category, []).append(entity_id)

    edges = []
    seen = set()
    for _ in range(rng.randint(0, max_edges)):
        relation = rng.choice(relations)
        subjects = by_category.get(default_subject_category(relation))
        objects = by_category.get(default_object_category(relation))
        if not subjects or not objects:
            continue
        subject_id = rng.choice(subjects)
        object_id = rng.choice(objects)
        if subject_id == object_id:
            continue
        triple_id, created = store.upsert_triple_ids(
            subject_id, relation, object_id, f"chunk#{rng.randint(0, 9):04d}"
        )
        if created and (subject_id, relation, object_id) not in seen:
            seen.add((subject_id, relation, object_id))
            edges.append((triple_id, subject_id, relation, object_id))
    return store, edges


def store_edge_list(store: GraphStore):
    """Oracle-format edge list for an existing store."""
    return [
        (t.triple_id, t.subject_id, t.relation, t.object_id)
        for t in store.triples()
    ]


RELATION_BY_VALUE = {r.value: r for r in RelationType}
