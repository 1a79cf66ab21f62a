"""Core domain types: poems, the whitespace typology, and annotations.

Everything here is an immutable value object.  Corpus and annotation files
are JSON Lines, one record per line, with poem bodies holding literal
newline-separated text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional


class Source(str, Enum):
    PUBLISHED = "published"
    UNPUBLISHED = "unpublished"
    GENERATED = "generated"


class Category(str, Enum):
    LINE_BREAK = "LINE_BREAK"
    PREFIX = "PREFIX"
    INTERNAL = "INTERNAL"
    VERTICAL = "VERTICAL"
    LINE_LENGTH = "LINE_LENGTH"


#: Valid subcategories per category.  ``enjambed_unknown`` is emitted only
#: when no syntax information is available to refine an enjambed break.
SUBCATEGORIES = {
    Category.LINE_BREAK: frozenset(
        {"standard", "lexical", "clausal", "phrasal", "enjambed_unknown"}
    ),
    Category.PREFIX: frozenset({"standard", "standard_indent", "non_standard"}),
    Category.INTERNAL: frozenset({"standard", "non_standard"}),
    Category.VERTICAL: frozenset({"standard", "standard_stanza", "non_standard"}),
    Category.LINE_LENGTH: frozenset({"standard", "non_standard"}),
}


class ModelError(ValueError):
    """Raised on malformed records or invalid category combinations."""


@dataclass(frozen=True)
class WispCategory:
    category: Category
    subcategory: str

    def __post_init__(self):
        if self.subcategory not in SUBCATEGORIES[self.category]:
            raise ModelError(
                f"invalid subcategory {self.subcategory!r} for {self.category.value}"
            )


@dataclass(frozen=True)
class WhitespaceEvent:
    """One classified whitespace occurrence inside a poem.

    ``char_span`` is a half-open (start, end) offset pair within the line and
    is absent for LINE_BREAK / VERTICAL / LINE_LENGTH events.  ``length``
    counts spaces (PREFIX / INTERNAL) or blank lines (VERTICAL) and is absent
    for LINE_BREAK and LINE_LENGTH.
    """

    category: WispCategory
    line_index: int
    char_span: Optional[tuple[int, int]] = None
    length: Optional[int] = None
    detail: Optional[str] = None

    def sort_key(self):
        start = self.char_span[0] if self.char_span is not None else -1
        return (self.line_index, start, self.category.category.value)


@dataclass(frozen=True)
class Poem:
    id: str
    body: str
    title: str = ""
    poet: str = ""
    poet_birth_year: Optional[int] = None
    form: Optional[str] = None
    tags: frozenset[str] = frozenset()
    source: Optional[Source] = None

    def __post_init__(self):
        if "\r" in self.body:
            raise ModelError(f"poem {self.id!r}: body contains carriage returns")
        if "\t" in self.body:
            raise ModelError(f"poem {self.id!r}: body contains tabs")

    @property
    def lines(self) -> list[str]:
        return self.body.split("\n")

    @property
    def birth_decade(self) -> Optional[int]:
        if self.poet_birth_year is None:
            return None
        return (self.poet_birth_year // 10) * 10


def normalize_body(text: str) -> str:
    """Normalize raw body text to the canonical whitespace alphabet."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    text = text.replace("\t", "    ")
    return text


@dataclass(frozen=True)
class WispAnnotation:
    poem_id: str
    events: tuple[WhitespaceEvent, ...]
    line_count: int
    summary: dict = field(default_factory=dict, compare=False)

    @staticmethod
    def build(poem_id: str, events: Iterable[WhitespaceEvent], line_count: int) -> "WispAnnotation":
        ordered = tuple(sorted(events, key=WhitespaceEvent.sort_key))
        return WispAnnotation(poem_id, ordered, line_count, summarize(ordered))

    def events_of(self, category: Category) -> list[WhitespaceEvent]:
        return [e for e in self.events if e.category.category is category]


def summarize(events: Iterable[WhitespaceEvent]) -> dict:
    """Per-category event counts and mean lengths (None when lengths absent)."""
    out = {}
    for cat in Category:
        evs = [e for e in events if e.category.category is cat]
        lengths = [e.length for e in evs if e.length is not None]
        out[cat.value] = {
            "count": len(evs),
            "mean_length": (sum(lengths) / len(lengths)) if lengths else None,
        }
    return out


# ---------------------------------------------------------------------------
# JSON Lines serialization


def poem_to_dict(p: Poem) -> dict:
    d = {"id": p.id, "title": p.title, "poet": p.poet, "body": p.body}
    if p.poet_birth_year is not None:
        d["poet_birth_year"] = p.poet_birth_year
    if p.form is not None:
        d["form"] = p.form
    if p.tags:
        d["tags"] = sorted(p.tags)
    if p.source is not None:
        d["source"] = p.source.value
    return d


def poem_from_dict(d: dict, index: int = -1) -> Poem:
    where = f"record {index}" if index >= 0 else "record"
    if not isinstance(d, dict):
        raise ModelError(f"{where}: not an object")
    if "id" not in d or not isinstance(d["id"], str):
        raise ModelError(f"{where}: missing or non-string field 'id'")
    if "body" not in d or not isinstance(d["body"], str):
        raise ModelError(f"{where}: missing or non-string field 'body'")
    year = d.get("poet_birth_year")
    if year is not None and not isinstance(year, int):
        raise ModelError(f"{where}: field 'poet_birth_year' must be an integer")
    source = d.get("source")
    if source is not None:
        try:
            source = Source(source)
        except ValueError:
            raise ModelError(f"{where}: field 'source' has unknown value {source!r}")
    tags = d.get("tags", [])
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise ModelError(f"{where}: field 'tags' must be a list of strings")
    try:
        return Poem(
            id=d["id"],
            body=normalize_body(d["body"]),
            title=d.get("title", ""),
            poet=d.get("poet", ""),
            poet_birth_year=year,
            form=d.get("form"),
            tags=frozenset(tags),
            source=source,
        )
    except ModelError as exc:
        raise ModelError(f"{where}: {exc}")


def load_corpus(path) -> list[Poem]:
    """Load a JSON Lines corpus file; one Poem per non-empty line."""
    poems = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ModelError(f"record {i}: invalid JSON ({exc})")
            poem = poem_from_dict(record, i)
            if poem.id in seen:
                raise ModelError(f"record {i}: duplicate poem id {poem.id!r}")
            seen.add(poem.id)
            poems.append(poem)
    return poems


def save_corpus(path, poems: Iterable[Poem]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in poems:
            fh.write(json.dumps(poem_to_dict(p), ensure_ascii=False) + "\n")


def event_to_dict(e: WhitespaceEvent) -> dict:
    d = {
        "category": e.category.category.value,
        "subcategory": e.category.subcategory,
        "line_index": e.line_index,
    }
    if e.char_span is not None:
        d["char_span"] = list(e.char_span)
    if e.length is not None:
        d["length"] = e.length
    if e.detail is not None:
        d["detail"] = e.detail
    return d


def event_from_dict(d: dict) -> WhitespaceEvent:
    cat = WispCategory(Category(d["category"]), d["subcategory"])
    span = tuple(d["char_span"]) if "char_span" in d else None
    return WhitespaceEvent(
        category=cat,
        line_index=d["line_index"],
        char_span=span,
        length=d.get("length"),
        detail=d.get("detail"),
    )


def annotation_to_dict(a: WispAnnotation) -> dict:
    return {
        "poem_id": a.poem_id,
        "line_count": a.line_count,
        "events": [event_to_dict(e) for e in a.events],
        "summary": a.summary,
    }


def annotation_from_dict(d: dict) -> WispAnnotation:
    events = tuple(event_from_dict(e) for e in d["events"])
    return WispAnnotation(d["poem_id"], events, d["line_count"], d.get("summary", {}))


def load_annotations(path) -> list[WispAnnotation]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                out.append(annotation_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ModelError(f"annotation record {i}: {exc}")
    return out


def save_annotations(path, annotations: Iterable[WispAnnotation]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in annotations:
            fh.write(json.dumps(annotation_to_dict(a), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Validation


def validate_annotation(a: WispAnnotation, p: Poem) -> list[str]:
    """Check an annotation against its poem; returns invariant violations.

    Violations are data, not failures: an empty list means fully consistent.
    """
    problems = []
    if a.poem_id != p.id:
        problems.append(f"poem_id {a.poem_id!r} does not match poem {p.id!r}")
        return problems
    lines = p.lines
    if a.line_count != len(lines):
        problems.append(f"line_count {a.line_count} != actual {len(lines)}")

    prev_key = None
    for n, e in enumerate(a.events):
        key = e.sort_key()
        if prev_key is not None and key[:2] < prev_key[:2]:
            problems.append(f"event {n}: out of order")
        prev_key = key

        if not (0 <= e.line_index < len(lines)):
            problems.append(f"event {n}: line_index {e.line_index} out of range")
            continue
        cat = e.category.category
        if cat in (Category.LINE_BREAK, Category.LINE_LENGTH):
            if e.length is not None:
                problems.append(f"event {n}: {cat.value} must not carry a length")
        else:
            if e.length is None or e.length < 1:
                problems.append(f"event {n}: {cat.value} requires length >= 1")
        if cat in (Category.LINE_BREAK, Category.VERTICAL, Category.LINE_LENGTH):
            if e.char_span is not None:
                problems.append(f"event {n}: {cat.value} must not carry a char_span")
        if e.char_span is not None:
            start, end = e.char_span
            line = lines[e.line_index]
            if not (0 <= start <= end <= len(line)):
                problems.append(f"event {n}: char_span {e.char_span} outside line bounds")
            elif e.length is not None and end - start != e.length:
                problems.append(f"event {n}: char_span width != length")
            elif line[start:end] != " " * (end - start):
                problems.append(f"event {n}: char_span does not cover spaces")

    recounted = summarize(a.events)
    for cat, vals in recounted.items():
        got = a.summary.get(cat, {}) if a.summary else {}
        if got.get("count") != vals["count"]:
            problems.append(f"summary count for {cat} is {got.get('count')}, expected {vals['count']}")
    return problems
