"""Classification of every whitespace event in a plain-text poem.

Each classifier is a pure function over normalized poem lines; ``annotate``
composes them into a full WispAnnotation.  Syntax information (when
available) refines enjambed line breaks into lexical / clausal / phrasal;
without it enjambed breaks are labeled ``enjambed_unknown``, except for
hyphen-split words which are lexical on purely orthographic evidence.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .linearize import visible_length
from .model import (
    Category,
    Poem,
    WhitespaceEvent,
    WispAnnotation,
    WispCategory,
)

#: Characters that may close a sentence-final token without being terminal
#: punctuation themselves (closing quotes / parens after a period etc.).
CLOSERS = "\"'”’)]}»"


@dataclass(frozen=True)
class AnnotatorConfig:
    sentence_end_punct: frozenset[str] = frozenset({".", "!", "?", "…"})
    stanza_gap_lines: int = 1
    indent_period_max: int = 8
    indent_coverage: float = 0.8
    line_length_cv_threshold: float = 0.25
    length_unit: str = "characters"  # or "words"

    def __post_init__(self):
        if not self.sentence_end_punct:
            raise ValueError("sentence_end_punct must be nonempty")
        if self.stanza_gap_lines < 1 or self.indent_period_max < 1:
            raise ValueError("thresholds must be strictly positive")
        if self.line_length_cv_threshold < 0:
            raise ValueError("line_length_cv_threshold must be nonnegative")


def _leading_spaces(line: str) -> int:
    return len(line) - len(line.lstrip(" "))


def _is_blank(line: str) -> bool:
    return visible_length(line) == 0


def ends_sentence(line: str, cfg: AnnotatorConfig) -> bool:
    """True when the line's last visible character ends a sentence.

    Closing quotes/parens immediately after terminal punctuation count too.
    """
    stripped = line.rstrip(" ")
    while stripped and stripped[-1] in CLOSERS:
        stripped = stripped[:-1]
    return bool(stripped) and stripped[-1] in cfg.sentence_end_punct


# ---------------------------------------------------------------------------
# Per-category classifiers


def classify_prefix(lines: list[str], cfg: Optional[AnnotatorConfig] = None) -> list[WhitespaceEvent]:
    """Leading-space events; periodic indents get standard_indent.

    An indent pattern qualifies when some period p <= indent_period_max has a
    per-residue template (mode of observed indents) matching at least
    ``indent_coverage`` of the indented lines; matched indented lines are
    standard_indent, the rest non_standard.
    """
    cfg = cfg or AnnotatorConfig()
    indents = [_leading_spaces(ln) for ln in lines]
    indented = [i for i, ind in enumerate(indents) if ind >= 1 and not _is_blank(lines[i])]
    if not indented:
        return []

    matched: set[int] = set()
    for period in range(1, min(cfg.indent_period_max, len(lines)) + 1):
        residue_counts = []
        template = []
        for residue in range(period):
            values = Counter(indents[i] for i in range(residue, len(lines), period))
            residue_counts.append(values)
            template.append(values.most_common(1)[0][0])
        # a line only counts as periodic if its indent value actually
        # repeats within its residue class (rules out trivial matches at
        # large periods)
        hits = {
            i
            for i in indented
            if indents[i] == template[i % period]
            and residue_counts[i % period][indents[i]] >= 2
        }
        if len(hits) / len(indented) >= cfg.indent_coverage:
            matched = hits
            break

    events = []
    for i in indented:
        sub = "standard_indent" if i in matched else "non_standard"
        events.append(
            WhitespaceEvent(
                category=WispCategory(Category.PREFIX, sub),
                line_index=i,
                char_span=(0, indents[i]),
                length=indents[i],
            )
        )
    return events


def classify_internal(line: str, line_index: int = 0) -> list[WhitespaceEvent]:
    """Maximal runs of >=2 spaces strictly between visible characters."""
    events = []
    first = len(line) - len(line.lstrip(" "))
    last = len(line.rstrip(" "))
    i = first
    while i < last:
        if line[i] == " ":
            j = i
            while j < last and line[j] == " ":
                j += 1
            if j - i >= 2:
                events.append(
                    WhitespaceEvent(
                        category=WispCategory(Category.INTERNAL, "non_standard"),
                        line_index=line_index,
                        char_span=(i, j),
                        length=j - i,
                    )
                )
            i = j
        else:
            i += 1
    return events


def classify_vertical(lines: list[str], cfg: Optional[AnnotatorConfig] = None) -> list[WhitespaceEvent]:
    """One event per maximal blank-line run; stanza-sized runs are standard."""
    cfg = cfg or AnnotatorConfig()
    events = []
    i = 0
    while i < len(lines):
        if _is_blank(lines[i]):
            j = i
            while j < len(lines) and _is_blank(lines[j]):
                j += 1
            # leading/trailing blank runs are still events; interior runs are
            # the common case
            run = j - i
            sub = "standard_stanza" if run == cfg.stanza_gap_lines else "non_standard"
            events.append(
                WhitespaceEvent(
                    category=WispCategory(Category.VERTICAL, sub),
                    line_index=i,
                    length=run,
                )
            )
            i = j
        else:
            i += 1
    return events


def _hyphen_split(line: str, next_line: Optional[str]) -> bool:
    stripped = line.rstrip(" ")
    if not stripped.endswith("-") or len(stripped) < 2 or not stripped[-2].isalpha():
        return False
    if next_line is None:
        return False
    nxt = next_line.lstrip(" ")
    return bool(nxt) and nxt[0].isalpha() and nxt[0].islower()


def classify_line_breaks(
    lines: list[str],
    cfg: Optional[AnnotatorConfig] = None,
    syntax=None,
    alignment=None,
) -> list[WhitespaceEvent]:
    """One event per nonblank line except the last nonblank line."""
    cfg = cfg or AnnotatorConfig()
    nonblank = [i for i, ln in enumerate(lines) if not _is_blank(ln)]
    events = []
    for pos, i in enumerate(nonblank[:-1]):
        line = lines[i]
        detail = None
        if ends_sentence(line, cfg):
            sub = "standard"
        elif _hyphen_split(line, lines[nonblank[pos + 1]]):
            sub = "lexical"
        elif syntax is not None and alignment is not None:
            from .syntax import classify_enjambment

            sub, detail = classify_enjambment(i, syntax, alignment)
        else:
            sub = "enjambed_unknown"
        events.append(
            WhitespaceEvent(
                category=WispCategory(Category.LINE_BREAK, sub),
                line_index=i,
                detail=detail,
            )
        )
    return events


def classify_line_length(lines: list[str], cfg: Optional[AnnotatorConfig] = None) -> WhitespaceEvent:
    """Single poem-level uniformity verdict via coefficient of variation."""
    cfg = cfg or AnnotatorConfig()
    if cfg.length_unit == "words":
        lengths = [len(ln.split()) for ln in lines if not _is_blank(ln)]
    else:
        lengths = [visible_length(ln) for ln in lines if not _is_blank(ln)]
    if len(lengths) < 2:
        return WhitespaceEvent(
            category=WispCategory(Category.LINE_LENGTH, "standard"),
            line_index=0,
            detail="degenerate: fewer than 2 nonblank lines",
        )
    mean = statistics.fmean(lengths)
    stdev = statistics.pstdev(lengths)
    cv = stdev / mean if mean else 0.0
    sub = "standard" if cv <= cfg.line_length_cv_threshold else "non_standard"
    detail = f"mean={mean:.2f} stddev={stdev:.2f} cv={cv:.4f} unit={cfg.length_unit}"
    return WhitespaceEvent(
        category=WispCategory(Category.LINE_LENGTH, sub),
        line_index=0,
        detail=detail,
    )


def annotate(
    poem: Poem,
    syntax=None,
    cfg: Optional[AnnotatorConfig] = None,
) -> WispAnnotation:
    """Full WISP annotation of a poem; composes all classifiers."""
    cfg = cfg or AnnotatorConfig()
    lines = poem.lines
    alignment = None
    if syntax is not None:
        from .syntax import align_tokens_to_lines

        alignment = align_tokens_to_lines(syntax, poem)
    events = []
    events.extend(classify_prefix(lines, cfg))
    for i, line in enumerate(lines):
        events.extend(classify_internal(line, i))
    events.extend(classify_vertical(lines, cfg))
    events.extend(classify_line_breaks(lines, cfg, syntax, alignment))
    events.append(classify_line_length(lines, cfg))
    return WispAnnotation.build(poem.id, events, len(lines))
