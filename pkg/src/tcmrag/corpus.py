"""Corpus loading and chunking.

Input is a UTF-8 line-delimited stream where each line is one chapter record
(see docs/formats.md for the exact field names). Books and sections are
reconstructed from the records in document order; chapters are split into
fixed-size, overlapping character chunks that carry their provenance
metadata everywhere downstream.

Characters are counted as Unicode scalar values (``len`` of a Python str),
punctuation included.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .errors import ChunkingError, CorpusFormatError

DEFAULT_CHUNK_SIZE = 1000
DEFAULT_CHUNK_OVERLAP = 100


class Specialty(str, Enum):
    OBSTETRICS = "Obstetrics"
    GYNECOLOGY = "Gynecology"
    FERTILITY = "Fertility"
    OTHER = "Other"


@dataclass(frozen=True)
class ChapterSource:
    """One chapter of one book; ``character_count`` is len(body)."""

    chapter_id: str
    title: str
    body: str
    character_count: int


@dataclass(frozen=True)
class SectionSource:
    """A section grouping chapters. ``explicit`` is False for the implicit
    section synthesized for books whose records carry no section field."""

    title: str
    chapters: tuple[ChapterSource, ...]
    explicit: bool = True


@dataclass(frozen=True)
class BookSource:
    book_id: str
    title: str
    specialty: Specialty
    sections: tuple[SectionSource, ...]

    @property
    def chapters(self) -> tuple[ChapterSource, ...]:
        return tuple(ch for sec in self.sections for ch in sec.chapters)


@dataclass(frozen=True)
class Chunk:
    """A contiguous span of chapter text; the unit sent to extraction."""

    chunk_id: str
    book_title: str
    section_title: str
    chapter_title: str
    chunk_index: int
    text: str
    char_span: tuple[int, int]


@dataclass
class SpecialtyCount:
    books: int = 0
    chapters: int = 0
    characters: int = 0


@dataclass
class CorpusStats:
    by_specialty: dict[Specialty, SpecialtyCount] = field(default_factory=dict)
    total: SpecialtyCount = field(default_factory=SpecialtyCount)

    def as_dict(self) -> dict:
        return {
            "by_specialty": {
                sp.value: {"books": c.books, "chapters": c.chapters, "characters": c.characters}
                for sp, c in sorted(self.by_specialty.items(), key=lambda kv: kv[0].value)
            },
            "total": {
                "books": self.total.books,
                "chapters": self.total.chapters,
                "characters": self.total.characters,
            },
        }


_REQUIRED_FIELDS = ("book", "chapter", "text")
_ALLOWED_FIELDS = {"book", "book_id", "specialty", "section", "chapter", "text"}


def _parse_specialty(raw: str, line_no: int) -> Specialty:
    folded = raw.strip().lower()
    for sp in Specialty:
        if sp.value.lower() == folded:
            return sp
    raise CorpusFormatError(
        f"line {line_no}: field 'specialty' has unknown value {raw!r} "
        f"(expected one of {[s.value for s in Specialty]})"
    )


def parse_corpus(stream: IO[bytes] | IO[str], format: str = "jsonl") -> list[BookSource]:
    """Parse a chapter-record stream into books in document order.

    Raises CorpusFormatError naming the line and field for any malformed
    record, and for conflicting metadata under one book_id. An empty stream
    yields an empty list.
    """
    if format != "jsonl":
        raise CorpusFormatError(f"unknown corpus format {format!r} (supported: 'jsonl')")

    data = stream.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusFormatError(f"corpus stream is not valid UTF-8: {exc}") from exc
    text_iter: Iterable[str] = data.splitlines()

    # book_id -> mutable book shell; section order and chapter order follow
    # first appearance in the stream.
    order: list[str] = []
    titles: dict[str, str] = {}
    specialties: dict[str, Specialty] = {}
    # book_id -> list of (section_title | None, chapter_title, body)
    chapters: dict[str, list[tuple[str | None, str, str]]] = {}

    for line_no, line in enumerate(text_iter, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line {line_no}: not valid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise CorpusFormatError(f"line {line_no}: record is not an object")

        unknown = set(record) - _ALLOWED_FIELDS
        if unknown:
            raise CorpusFormatError(
                f"line {line_no}: unknown field(s) {sorted(unknown)} (allowed: {sorted(_ALLOWED_FIELDS)})"
            )
        for name in _REQUIRED_FIELDS:
            value = record.get(name)
            if not isinstance(value, str) or not value.strip():
                raise CorpusFormatError(f"line {line_no}: field {name!r} is missing or empty")

        book_title = record["book"].strip()
        book_id = str(record.get("book_id") or book_title).strip()
        specialty = (
            _parse_specialty(record["specialty"], line_no)
            if "specialty" in record
            else Specialty.OTHER
        )
        section = record.get("section")
        if section is not None:
            if not isinstance(section, str) or not section.strip():
                raise CorpusFormatError(f"line {line_no}: field 'section' is present but empty")
            section = section.strip()

        if book_id not in chapters:
            order.append(book_id)
            titles[book_id] = book_title
            specialties[book_id] = specialty
            chapters[book_id] = []
        else:
            if titles[book_id] != book_title:
                raise CorpusFormatError(
                    f"line {line_no}: duplicate book_id {book_id!r} with conflicting "
                    f"title {book_title!r} (previously {titles[book_id]!r})"
                )
            if "specialty" in record and specialties[book_id] != specialty:
                raise CorpusFormatError(
                    f"line {line_no}: book {book_id!r} declared with conflicting "
                    f"specialty {specialty.value!r} (previously {specialties[book_id].value!r})"
                )
        chapters[book_id].append((section, record["chapter"].strip(), record["text"]))

    books: list[BookSource] = []
    for book_id in order:
        books.append(
            _assemble_book(book_id, titles[book_id], specialties[book_id], chapters[book_id])
        )
    return books


def _assemble_book(
    book_id: str,
    title: str,
    specialty: Specialty,
    records: list[tuple[str | None, str, str]],
) -> BookSource:
    # Sections in first-appearance order. Chapters without a section field go
    # into one implicit section titled like the book.
    section_order: list[tuple[str, bool]] = []
    grouped: dict[tuple[str, bool], list[tuple[str, str]]] = {}
    for sec, chapter_title, body in records:
        key = (sec, True) if sec is not None else (title, False)
        if key not in grouped:
            section_order.append(key)
            grouped[key] = []
        grouped[key].append((chapter_title, body))

    sections: list[SectionSource] = []
    ordinal = 0
    for sec_title, explicit in section_order:
        chs: list[ChapterSource] = []
        for chapter_title, body in grouped[(sec_title, explicit)]:
            chs.append(
                ChapterSource(
                    chapter_id=f"{book_id}#{ordinal:04d}",
                    title=chapter_title,
                    body=body,
                    character_count=len(body),
                )
            )
            ordinal += 1
        sections.append(SectionSource(title=sec_title, chapters=tuple(chs), explicit=explicit))
    return BookSource(book_id=book_id, title=title, specialty=specialty, sections=tuple(sections))


def load_corpus_path(path: str | Path, format: str = "jsonl") -> list[BookSource]:
    """Load a corpus from a single file, or from a directory with one file
    per book (files read in sorted name order)."""
    p = Path(path)
    if p.is_dir():
        books: list[BookSource] = []
        seen: dict[str, str] = {}
        for child in sorted(p.iterdir()):
            if child.is_dir() or child.name.startswith("."):
                continue
            with child.open("rb") as fh:
                file_books = parse_corpus(fh, format=format)
            if len(file_books) > 1:
                raise CorpusFormatError(
                    f"{child.name}: directory corpora expect one book per file, found "
                    f"{len(file_books)} ({[b.book_id for b in file_books]})"
                )
            for book in file_books:
                if book.book_id in seen:
                    raise CorpusFormatError(
                        f"{child.name}: duplicate book_id {book.book_id!r} (already loaded "
                        f"from {seen[book.book_id]})"
                    )
                seen[book.book_id] = child.name
                books.append(book)
        return books
    with p.open("rb") as fh:
        return parse_corpus(fh, format=format)


def chunk_chapter(
    chapter: ChapterSource,
    size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_CHUNK_OVERLAP,
    *,
    book_title: str = "",
    section_title: str = "",
) -> list[Chunk]:
    """Split a chapter body into chunks of ``size`` chars overlapping by
    ``overlap``. The final chunk may be shorter; spans cover the body.
    """
    if size <= 0:
        raise ChunkingError(f"chunk size must be positive, got {size}")
    if overlap < 0:
        raise ChunkingError(f"chunk overlap must be non-negative, got {overlap}")
    if overlap >= size:
        raise ChunkingError(f"chunk overlap ({overlap}) must be smaller than size ({size})")
    body = chapter.body
    if not body:
        raise ChunkingError(f"chapter {chapter.chapter_id!r} has an empty body")

    stride = size - overlap
    length = len(body)
    if length <= size:
        count = 1
    else:
        count = math.ceil((length - size) / stride) + 1

    chunks: list[Chunk] = []
    for index in range(count):
        start = index * stride
        end = min(start + size, length)
        chunks.append(
            Chunk(
                chunk_id=f"{chapter.chapter_id}#{index:04d}",
                book_title=book_title,
                section_title=section_title,
                chapter_title=chapter.title,
                chunk_index=index,
                text=body[start:end],
                char_span=(start, end),
            )
        )
    return chunks


def chunk_books(
    books: Iterable[BookSource],
    size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_CHUNK_OVERLAP,
) -> list[Chunk]:
    """Chunk every chapter of every book, preserving document order."""
    chunks: list[Chunk] = []
    for book in books:
        for section in book.sections:
            for chapter in section.chapters:
                chunks.extend(
                    chunk_chapter(
                        chapter,
                        size,
                        overlap,
                        book_title=book.title,
                        section_title=section.title,
                    )
                )
    return chunks


def corpus_stats(books: Iterable[BookSource]) -> CorpusStats:
    """Count books, chapters and characters per specialty and in total."""
    stats = CorpusStats()
    for book in books:
        per = stats.by_specialty.setdefault(book.specialty, SpecialtyCount())
        per.books += 1
        stats.total.books += 1
        for chapter in book.chapters:
            per.chapters += 1
            per.characters += chapter.character_count
            stats.total.chapters += 1
            stats.total.characters += chapter.character_count
    return stats
