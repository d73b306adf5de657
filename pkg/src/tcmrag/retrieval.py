"""Query grounding: entity linking, typed path traversal, evidence ranking,
and budgeted context assembly with provenance citations.

Linking is lexical and deterministic. Traversal instantiates small typed
path patterns (symptom to treatment to ingredient and the like) rooted at
the linked entities; every prefix of a pattern counts as evidence, so a
triple's best score is the score of the shortest path that reaches it.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import PatternError
from .graph.store import ChunkRef, GraphStore, StoredTriple
from .relations import RelationType, object_categories, subject_categories

MATCH_KINDS = ("exact", "substring", "alias")
ALIAS_SCORE = 0.9
DEFAULT_LINK_LIMIT = 8
DEFAULT_DECAY = 0.8
DEFAULT_CONTEXT_BUDGET = 2000


@dataclass(frozen=True)
class EntityMatch:
    entity_id: str
    matched_surface: str
    match_kind: str
    score: float


@dataclass(frozen=True)
class PathStep:
    relation: RelationType
    direction: str  # "out" follows subject->object, "in" the reverse

    def near_categories(self):
        if self.direction == "out":
            return subject_categories(self.relation)
        return object_categories(self.relation)

    def far_categories(self):
        if self.direction == "out":
            return object_categories(self.relation)
        return subject_categories(self.relation)


@dataclass(frozen=True)
class PathPattern:
    """A named chain of 1..4 typed steps; adjacent steps must be
    category-compatible under the relation signatures."""

    name: str
    steps: tuple[PathStep, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.steps) <= 4:
            raise PatternError(
                f"pattern {self.name!r} has {len(self.steps)} steps, expected 1..4"
            )
        for step in self.steps:
            if step.direction not in ("out", "in"):
                raise PatternError(
                    f"pattern {self.name!r}: direction must be 'out' or 'in', "
                    f"got {step.direction!r}"
                )
        for i in range(len(self.steps) - 1):
            shared = self.steps[i].far_categories() & self.steps[i + 1].near_categories()
            if not shared:
                raise PatternError(
                    f"pattern {self.name!r}: step {i + 1} ({self.steps[i].relation.value}) "
                    f"cannot chain into step {i + 2} ({self.steps[i + 1].relation.value})"
                )


DEFAULT_PATTERNS: tuple[PathPattern, ...] = (
    PathPattern(
        "symptom_treatment_ingredient",
        (
            PathStep(RelationType.TREATMENT_SYMPTOM, "in"),
            PathStep(RelationType.INGREDIENT_USE, "out"),
        ),
    ),
    PathPattern(
        "disease_treatment_ingredient",
        (
            PathStep(RelationType.TREAT_DISEASE, "in"),
            PathStep(RelationType.INGREDIENT_USE, "out"),
        ),
    ),
    PathPattern(
        "ingredient_treatment_disease",
        (
            PathStep(RelationType.INGREDIENT_USE, "in"),
            PathStep(RelationType.TREAT_DISEASE, "out"),
        ),
    ),
    PathPattern("disease_symptoms", (PathStep(RelationType.SYMPTOMS_PRESENT, "out"),)),
    PathPattern("symptom_diseases", (PathStep(RelationType.SYMPTOMS_PRESENT, "in"),)),
    PathPattern(
        "treatment_source",
        (
            PathStep(RelationType.TREATMENT_PLAN, "in"),
            PathStep(RelationType.BELONG_TO_BOOK, "out"),
        ),
    ),
)


@dataclass(frozen=True)
class EvidencePath:
    """A concrete instantiation of a pattern prefix: the visited entity
    chain (seed first) and the triples stepped through."""

    entities: tuple[str, ...]
    triples: tuple[StoredTriple, ...]
    score: float = 0.0


def _normalize_query(query: str) -> str:
    return " ".join(unicodedata.normalize("NFC", query).split())


def link_entities(
    store: GraphStore,
    query: str,
    limit: int = DEFAULT_LINK_LIMIT,
    *,
    aliases: Mapping[str, str] | None = None,
) -> list[EntityMatch]:
    """Ground a query in the store's entities, best matches first.

    Match kinds: the entity name occurring inside the query is ``exact``
    (score 1.0); the query occurring inside a longer entity name is
    ``substring`` (scored by length ratio); an alias surface found in the
    query maps to its canonical name at a fixed score.
    """
    if limit <= 0:
        raise ValueError(f"limit must be positive, got {limit}")
    text = _normalize_query(query)
    if not text:
        raise ValueError("query is empty")

    best: dict[str, EntityMatch] = {}

    def offer(entity_id: str, surface: str, kind: str, score: float) -> None:
        current = best.get(entity_id)
        if current is None or (score, -MATCH_KINDS.index(kind)) > (
            current.score,
            -MATCH_KINDS.index(current.match_kind),
        ):
            best[entity_id] = EntityMatch(entity_id, surface, kind, score)

    for entity in store.entities():
        if entity.name in text:
            offer(entity.entity_id, entity.name, "exact", 1.0)
        elif text in entity.name:
            offer(entity.entity_id, text, "substring", len(text) / len(entity.name))
    for surface, canonical in (aliases or {}).items():
        if surface and surface in text:
            for entity in store.entities_named(canonical):
                offer(entity.entity_id, surface, "alias", ALIAS_SCORE)

    ranked = sorted(
        best.values(),
        key=lambda m: (-m.score, -len(m.matched_surface), m.matched_surface, m.entity_id),
    )
    return ranked[:limit]


def traverse(
    store: GraphStore,
    seeds: Sequence[str],
    max_hops: int,
    patterns: Sequence[PathPattern] = DEFAULT_PATTERNS,
) -> list[EvidencePath]:
    """Instantiate every pattern prefix rooted at every seed.

    A path never revisits an entity. Identical instantiations reached
    through different patterns are reported once.
    """
    if not 1 <= max_hops <= 4:
        raise ValueError(f"max_hops must be in 1..4, got {max_hops}")
    for seed in seeds:
        store.entity(seed)  # raises UnknownEntityError

    found: dict[tuple[str, ...], EvidencePath] = {}

    def extend(chain: list[str], triples: list[StoredTriple], steps: tuple[PathStep, ...]) -> None:
        if not steps:
            return
        step, rest = steps[0], steps[1:]
        node = chain[-1]
        if step.direction == "out":
            edges = store.out_edges(node, (step.relation,))
        else:
            edges = store.in_edges(node, (step.relation,))
        for triple in edges:
            far = triple.object_id if step.direction == "out" else triple.subject_id
            if far in chain:
                continue
            new_chain = chain + [far]
            new_triples = triples + [triple]
            key = (new_chain[0], *(t.triple_id for t in new_triples))
            if key not in found:
                found[key] = EvidencePath(
                    entities=tuple(new_chain), triples=tuple(new_triples)
                )
            extend(new_chain, new_triples, rest)

    for seed in seeds:
        for pattern in patterns:
            extend([seed], [], pattern.steps[:max_hops])

    return sorted(found.values(), key=lambda p: (p.entities[0], tuple(t.triple_id for t in p.triples)))


def score_paths(
    paths: Iterable[EvidencePath],
    decay: float = DEFAULT_DECAY,
    relation_weights: Mapping[RelationType, float] | None = None,
) -> list[EvidencePath]:
    """Multiplicative scoring: each step contributes relation_weight * decay.

    Returns new paths sorted by descending score, ties broken by the triple
    id sequence.
    """
    if not 0 < decay <= 1:
        raise ValueError(f"decay must be in (0, 1], got {decay}")
    weights = dict(relation_weights or {})
    for relation, weight in weights.items():
        if weight <= 0:
            raise ValueError(f"weight for {relation.value} must be positive, got {weight}")

    scored = []
    for path in paths:
        score = 1.0
        for triple in path.triples:
            score *= weights.get(triple.relation, 1.0) * decay
        scored.append(replace(path, score=score))
    scored.sort(key=lambda p: (-p.score, tuple(t.triple_id for t in p.triples)))
    return scored


@dataclass(frozen=True)
class Citation:
    book: str
    chapter: str
    chunk_index: int
    chunk_id: str


@dataclass(frozen=True)
class ContextLine:
    text: str
    score: float
    triple_id: str
    subject_id: str
    subject_name: str
    subject_category: str
    relation: RelationType
    object_id: str
    object_name: str
    object_category: str
    citation: Citation


@dataclass
class ContextBundle:
    lines: list[ContextLine] = field(default_factory=list)
    total_size: int = 0
    budget: int = DEFAULT_CONTEXT_BUDGET
    truncated: bool = False

    @property
    def provenance_chunk_ids(self) -> set[str]:
        return {line.citation.chunk_id for line in self.lines}

    def rendered(self) -> str:
        return "\n".join(line.text for line in self.lines)


def _citation_for(store: GraphStore, triple: StoredTriple) -> Citation:
    chunk_id = sorted(triple.provenance)[0]
    ref = store.chunk(chunk_id) or ChunkRef(
        chunk_id=chunk_id, book_title="", section_title="", chapter_title="", chunk_index=0
    )
    return Citation(
        book=ref.book_title,
        chapter=ref.chapter_title,
        chunk_index=ref.chunk_index,
        chunk_id=chunk_id,
    )


def render_evidence_line(store: GraphStore, triple: StoredTriple, citation: Citation) -> str:
    subject = store.entity(triple.subject_id)
    obj = store.entity(triple.object_id)
    return (
        f"{subject.name} -[{triple.relation.value}]-> {obj.name} "
        f"(书: {citation.book}, 章: {citation.chapter}, 块: {citation.chunk_index})"
    )


def assemble_context(
    store: GraphStore,
    scored_paths: Sequence[EvidencePath],
    budget: int = DEFAULT_CONTEXT_BUDGET,
) -> ContextBundle:
    """Greedily admit rendered triples in score order until the budget is
    spent. A triple shared by several paths appears once, at the score of
    the best path that carries it.
    """
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    bundle = ContextBundle(budget=budget)
    seen: set[str] = set()
    for path in scored_paths:
        for triple in path.triples:
            if triple.triple_id in seen:
                continue
            seen.add(triple.triple_id)
            citation = _citation_for(store, triple)
            text = render_evidence_line(store, triple, citation)
            if bundle.total_size + len(text) > budget:
                bundle.truncated = True
                return bundle
            subject = store.entity(triple.subject_id)
            obj = store.entity(triple.object_id)
            bundle.lines.append(
                ContextLine(
                    text=text,
                    score=path.score,
                    triple_id=triple.triple_id,
                    subject_id=subject.entity_id,
                    subject_name=subject.name,
                    subject_category=subject.category.value,
                    relation=triple.relation,
                    object_id=obj.entity_id,
                    object_name=obj.name,
                    object_category=obj.category.value,
                    citation=citation,
                )
            )
            bundle.total_size += len(text)
    return bundle
