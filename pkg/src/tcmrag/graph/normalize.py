"""Entity name canonicalization."""

from __future__ import annotations

import unicodedata

from ..errors import EntityNameError


def normalize_entity_name(raw: str) -> str:
    """Unicode-compose, trim, and collapse internal whitespace to one space.

    Idempotent. Raises EntityNameError when nothing is left after trimming.
    """
    composed = unicodedata.normalize("NFC", raw)
    canonical = " ".join(composed.split())
    if not canonical:
        raise EntityNameError(f"entity name is empty after normalization: {raw!r}")
    return canonical
