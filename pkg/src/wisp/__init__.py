"""Whitespace-faithful poem linearization, annotation, and benchmarking."""

from .model import (  # noqa: F401
    Category,
    Poem,
    Source,
    WhitespaceEvent,
    WispAnnotation,
    WispCategory,
    load_corpus,
    validate_annotation,
)

__version__ = "0.1.0"
