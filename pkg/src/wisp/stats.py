"""Corpus-level whitespace analyses over annotated poems.

Grouped means of prefix/internal space lengths, line-final punctuation
tables, per-birth-decade trends, and high-usage tag rankings.  All outputs
are plain data (tables / dicts) suitable for JSON emission and external
plotting; no rendering happens here.
"""

from __future__ import annotations

import json
import math
import statistics
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional

from .annotate import _is_blank
from .model import Category, Poem, WispAnnotation

MODES = ("per_line", "per_nonstandard_event")
DIMENSIONS = ("source", "form", "tag", "birth_decade", "method")


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class StatRow:
    dimension: str
    value: object
    n_poems: int
    mean_prefix_len: Optional[float]
    mean_internal_len: Optional[float]
    nonstandard_event_count: int
    ci95_prefix: Optional[tuple[float, float]] = None
    ci95_internal: Optional[tuple[float, float]] = None

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "value": self.value,
            "n_poems": self.n_poems,
            "mean_prefix_len": self.mean_prefix_len,
            "mean_internal_len": self.mean_internal_len,
            "nonstandard_event_count": self.nonstandard_event_count,
            "ci95_prefix": list(self.ci95_prefix) if self.ci95_prefix else None,
            "ci95_internal": list(self.ci95_internal) if self.ci95_internal else None,
        }


def _event_lengths(ann: WispAnnotation, category: Category, nonstandard_only: bool) -> list[int]:
    out = []
    for e in ann.events_of(category):
        if nonstandard_only and e.category.subcategory != "non_standard":
            continue
        if e.length is not None:
            out.append(e.length)
    return out


def _group_values(poem: Poem, dimension: str) -> list:
    if dimension == "source":
        return [poem.source.value] if poem.source else []
    if dimension == "form":
        return [poem.form] if poem.form else []
    if dimension == "tag":
        return sorted(poem.tags)
    if dimension == "birth_decade":
        return [poem.birth_decade] if poem.birth_decade is not None else []
    raise StatsError(f"unknown dimension {dimension!r}")


def _ci95(samples: list[int]) -> Optional[tuple[float, float]]:
    if len(samples) < 30:
        return None
    mean = statistics.fmean(samples)
    stderr = statistics.pstdev(samples) / math.sqrt(len(samples))
    return (mean - 1.96 * stderr, mean + 1.96 * stderr)


def mean_whitespace_by_group(
    annotations: Iterable[WispAnnotation],
    poems: Iterable[Poem],
    dimension: str,
    mode: str,
) -> list[StatRow]:
    """Mean prefix/internal space lengths per group.

    per_nonstandard_event averages over non-standard events only; per_line
    divides total event length by the group's total line count.
    """
    if mode not in MODES:
        raise StatsError(f"unknown mode {mode!r}; expected one of {MODES}")
    if dimension not in DIMENSIONS or dimension == "method":
        raise StatsError(f"unknown dimension {dimension!r}")
    by_id = {p.id: p for p in poems}
    nonstandard_only = mode == "per_nonstandard_event"

    groups: dict[object, dict] = defaultdict(
        lambda: {"poems": 0, "lines": 0, "prefix": [], "internal": [], "events": 0}
    )
    for ann in annotations:
        poem = by_id.get(ann.poem_id)
        if poem is None:
            continue
        prefix = _event_lengths(ann, Category.PREFIX, nonstandard_only)
        internal = _event_lengths(ann, Category.INTERNAL, nonstandard_only)
        nonstd = sum(1 for e in ann.events if e.category.subcategory == "non_standard")
        for value in _group_values(poem, dimension):
            g = groups[value]
            g["poems"] += 1
            g["lines"] += ann.line_count
            g["prefix"].extend(prefix)
            g["internal"].extend(internal)
            g["events"] += nonstd

    rows = []
    for value in sorted(groups, key=lambda v: (str(type(v)), v)):
        g = groups[value]

        def mean_of(samples):
            if mode == "per_line":
                return (sum(samples) / g["lines"]) if g["lines"] else None
            return statistics.fmean(samples) if samples else None

        rows.append(
            StatRow(
                dimension=dimension,
                value=value,
                n_poems=g["poems"],
                mean_prefix_len=mean_of(g["prefix"]),
                mean_internal_len=mean_of(g["internal"]),
                nonstandard_event_count=g["events"],
                ci95_prefix=_ci95(g["prefix"]) if nonstandard_only else None,
                ci95_internal=_ci95(g["internal"]) if nonstandard_only else None,
            )
        )
    return rows


def temporal_trend(
    annotations: Iterable[WispAnnotation], poems: Iterable[Poem]
) -> tuple[list[StatRow], dict]:
    """Per-birth-decade means of non-standard prefix/internal lengths.

    Poems without a poet birth year are excluded; the coverage note reports
    how many.
    """
    poems = list(poems)
    with_year = [p for p in poems if p.poet_birth_year is not None]
    coverage = {
        "total_poems": len(poems),
        "with_birth_year": len(with_year),
        "excluded": len(poems) - len(with_year),
    }
    ids = {p.id for p in with_year}
    anns = [a for a in annotations if a.poem_id in ids]
    rows = mean_whitespace_by_group(anns, with_year, "birth_decade", "per_nonstandard_event")
    return rows, coverage


# ---------------------------------------------------------------------------
# Punctuation at line end


def _final_punct(line: str) -> Optional[str]:
    stripped = line.rstrip(" ")
    if not stripped:
        return None
    ch = stripped[-1]
    return ch if unicodedata.category(ch).startswith("P") else None


def punctuation_line_end_table(
    poems: Iterable[Poem], forms: Optional[list[str]] = None, punct_min_count: int = 100, top_k: int = 10
) -> dict:
    """Two per-form rankings of line-final punctuation.

    per_total_lines: lines ending in the token / total lines.
    per_token_usage: line-final occurrences / all occurrences of the token,
    tokens with fewer than punct_min_count total occurrences excluded.
    """
    line_end: dict[str, Counter] = defaultdict(Counter)
    anywhere: dict[str, Counter] = defaultdict(Counter)
    total_lines: Counter = Counter()
    n_poems: Counter = Counter()

    for poem in poems:
        form = poem.form
        if form is None or (forms and form not in forms):
            continue
        n_poems[form] += 1
        for line in poem.lines:
            if _is_blank(line):
                continue
            total_lines[form] += 1
            final = _final_punct(line)
            if final:
                line_end[form][final] += 1
            for ch in line:
                if unicodedata.category(ch).startswith("P"):
                    anywhere[form][ch] += 1

    out = {}
    for form in sorted(total_lines):
        per_lines = [
            (tok, count / total_lines[form])
            for tok, count in line_end[form].items()
        ]
        per_lines.sort(key=lambda kv: (-kv[1], kv[0]))
        per_usage = [
            (tok, line_end[form][tok] / anywhere[form][tok])
            for tok in anywhere[form]
            if anywhere[form][tok] >= punct_min_count
        ]
        per_usage.sort(key=lambda kv: (-kv[1], kv[0]))
        out[form] = {
            "n_poems": n_poems[form],
            "total_lines": total_lines[form],
            "per_total_lines": per_lines[:top_k],
            "per_token_usage": per_usage[:top_k],
        }
    return out


# ---------------------------------------------------------------------------
# High-usage tags


def nearest_rank_percentile(samples: list[int], pct: float) -> int:
    """Smallest value with at least pct% of samples less than or equal."""
    if not samples:
        raise StatsError("percentile of empty sample")
    ordered = sorted(samples)
    rank = math.ceil(pct / 100 * len(ordered))
    return ordered[max(rank, 1) - 1]


def high_usage_tags(
    annotations: Iterable[WispAnnotation],
    poems: Iterable[Poem],
    ws_type: str,
    tag_min: int = 100,
    pct: float = 75.0,
) -> dict:
    """Per-tag proportion of poems with an event above the global percentile.

    The percentile is computed over all event lengths of the given type from
    every poem; tags with fewer than tag_min poems are excluded.  Returns the
    threshold plus rankings from both ends (ties broken by tag name).
    """
    category = {"PREFIX": Category.PREFIX, "INTERNAL": Category.INTERNAL}.get(ws_type)
    if category is None:
        raise StatsError(f"ws_type must be PREFIX or INTERNAL, got {ws_type!r}")
    by_id = {p.id: p for p in poems}

    all_lengths: list[int] = []
    poem_max: dict[str, int] = {}
    for ann in annotations:
        lengths = _event_lengths(ann, category, nonstandard_only=False)
        all_lengths.extend(lengths)
        poem_max[ann.poem_id] = max(lengths) if lengths else 0
    if not all_lengths:
        raise StatsError(f"no {ws_type} events in the corpus")
    threshold = nearest_rank_percentile(all_lengths, pct)

    tag_total: Counter = Counter()
    tag_high: Counter = Counter()
    for poem_id, highest in poem_max.items():
        poem = by_id.get(poem_id)
        if poem is None:
            continue
        for tag in poem.tags:
            tag_total[tag] += 1
            if highest > threshold:
                tag_high[tag] += 1

    rows = [
        {"tag": tag, "n": tag_total[tag], "proportion": tag_high[tag] / tag_total[tag]}
        for tag in tag_total
        if tag_total[tag] >= tag_min
    ]
    rows.sort(key=lambda r: (-r["proportion"], r["tag"]))
    return {
        "ws_type": ws_type,
        "percentile": pct,
        "threshold": threshold,
        "descending": rows,
        "ascending": sorted(rows, key=lambda r: (r["proportion"], r["tag"])),
    }


def rows_to_json(rows: list[StatRow]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2)


def rows_to_table(rows: list[StatRow]) -> str:
    header = f"{'VALUE':>14} {'N':>6} {'PREFIX':>8} {'INTERNAL':>9} {'EVENTS':>7}"
    lines = [header]
    for r in rows:
        pf = "-" if r.mean_prefix_len is None else f"{r.mean_prefix_len:.3f}"
        il = "-" if r.mean_internal_len is None else f"{r.mean_internal_len:.3f}"
        lines.append(f"{str(r.value):>14} {r.n_poems:>6} {pf:>8} {il:>9} {r.nonstandard_event_count:>7}")
    return "\n".join(lines) + "\n"
