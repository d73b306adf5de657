"""Relation vocabulary: the 10 typed predicates and their entity signatures.

Every predicate a triple may carry is one of the closed ``RelationType``
enumeration below. Each value's canonical surface string is what prompts,
snapshots, and rendered evidence use. Parsing is tolerant (case, spacing,
CamelCase, a few natural aliases) but never accepts a predicate outside
the closed set.
"""

from __future__ import annotations

import re
from enum import Enum


class EntityCategory(str, Enum):
    """Closed set of node categories in the knowledge graph."""

    INGREDIENT = "Ingredient"
    DISEASE = "Disease"
    SYMPTOM = "Symptom"
    TREATMENT = "Treatment"
    BOOK = "Book"
    SECTION = "Section"
    CHAPTER = "Chapter"
    CATEGORY = "Category"


class RelationType(str, Enum):
    """Closed set of 10 relation types. Values are the canonical surface strings."""

    BELONG_TO_CATEGORY = "Belong to Category"
    INCLUDE_SECTION = "Include Section"
    INCLUDE_CHAPTER = "Include Chapter"
    BELONG_TO_BOOK = "Belong to Book"
    TREATMENT_PLAN = "Treatment Plan"
    TREAT_DISEASE = "Treat Disease"
    DESCRIBE_DISEASE = "Describe Disease"
    TREATMENT_SYMPTOM = "Treatment Symptom"
    SYMPTOMS_PRESENT = "Symptoms Present"
    INGREDIENT_USE = "Ingredient Use"

    @property
    def surface(self) -> str:
        return self.value


_ANY_CATEGORY = frozenset(EntityCategory)

# (allowed subject categories, allowed object categories) per relation.
# The first entry of each tuple is the default used when a category has to
# be assigned from relation position alone.
RELATION_SIGNATURES: dict[RelationType, tuple[tuple[EntityCategory, ...], tuple[EntityCategory, ...]]] = {
    RelationType.BELONG_TO_CATEGORY: (tuple(EntityCategory), (EntityCategory.CATEGORY,)),
    RelationType.INCLUDE_SECTION: ((EntityCategory.BOOK,), (EntityCategory.SECTION,)),
    RelationType.INCLUDE_CHAPTER: ((EntityCategory.BOOK, EntityCategory.SECTION), (EntityCategory.CHAPTER,)),
    RelationType.BELONG_TO_BOOK: ((EntityCategory.CHAPTER,), (EntityCategory.BOOK,)),
    RelationType.TREATMENT_PLAN: ((EntityCategory.CHAPTER,), (EntityCategory.TREATMENT,)),
    RelationType.TREAT_DISEASE: ((EntityCategory.TREATMENT,), (EntityCategory.DISEASE,)),
    RelationType.DESCRIBE_DISEASE: ((EntityCategory.CHAPTER,), (EntityCategory.DISEASE,)),
    RelationType.TREATMENT_SYMPTOM: ((EntityCategory.TREATMENT,), (EntityCategory.SYMPTOM,)),
    RelationType.SYMPTOMS_PRESENT: ((EntityCategory.DISEASE,), (EntityCategory.SYMPTOM,)),
    RelationType.INGREDIENT_USE: ((EntityCategory.TREATMENT,), (EntityCategory.INGREDIENT,)),
}

# Structural relations are generated mechanically from corpus metadata at
# ingest; content relations are what LLM extraction is asked for.
STRUCTURAL_RELATIONS = frozenset(
    {
        RelationType.BELONG_TO_CATEGORY,
        RelationType.INCLUDE_SECTION,
        RelationType.INCLUDE_CHAPTER,
        RelationType.BELONG_TO_BOOK,
    }
)
CONTENT_RELATIONS = frozenset(RelationType) - STRUCTURAL_RELATIONS


def subject_categories(relation: RelationType) -> frozenset[EntityCategory]:
    return frozenset(RELATION_SIGNATURES[relation][0])


def object_categories(relation: RelationType) -> frozenset[EntityCategory]:
    return frozenset(RELATION_SIGNATURES[relation][1])


def default_subject_category(relation: RelationType) -> EntityCategory:
    return RELATION_SIGNATURES[relation][0][0]


def default_object_category(relation: RelationType) -> EntityCategory:
    return RELATION_SIGNATURES[relation][1][0]


def _fold(text: str) -> str:
    """Fold a predicate string for matching: lowercase, alphanumerics only."""
    return re.sub(r"[^0-9a-z]+", "", text.lower())


# Natural spelling variants seen in the wild ("Use Ingredient" etc.).
_ALIASES: dict[str, RelationType] = {
    "useingredient": RelationType.INGREDIENT_USE,
    "belongstobook": RelationType.BELONG_TO_BOOK,
    "belongstocategory": RelationType.BELONG_TO_CATEGORY,
    "includeschapter": RelationType.INCLUDE_CHAPTER,
    "includessection": RelationType.INCLUDE_SECTION,
    "treatsdisease": RelationType.TREAT_DISEASE,
    "describesdisease": RelationType.DESCRIBE_DISEASE,
}

_FOLDED: dict[str, RelationType] = {_fold(r.value): r for r in RelationType}
_FOLDED.update(_ALIASES)


def parse_relation(text: str) -> RelationType | None:
    """Resolve a predicate string to a RelationType, or None if unknown.

    Matching is case-insensitive and ignores spacing/punctuation, so
    "Treat Disease", "TreatDisease" and "treat_disease" all resolve. A small
    alias table covers natural variants such as "Use Ingredient".
    """
    if not text:
        return None
    return _FOLDED.get(_fold(text))


def relation_sort_key(relation: RelationType) -> str:
    """Canonical ordering key for snapshots and stats tables."""
    return relation.value
