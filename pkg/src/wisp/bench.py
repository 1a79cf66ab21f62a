"""Tiered whitespace-fidelity unit tests, verdict adjudication, and scores.

Ten pass/fail unit tests probe whether a linearized candidate text preserves
the whitespace of a ground-truth poem at three tiers: presence (the element
exists at all), fuzzy (relative magnitudes keep their ordering), and exact
(magnitudes match within tolerance; no tolerance for blank-line counts).

Verdicts can come from human annotators or from the automated checker
(annotator_id "auto"); both share one record format and one scoring path.
Scores are computed in exact rational arithmetic and rendered to 2 decimals.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from .annotate import classify_internal
from .linearize import visible_length

PASS = "pass"
FAIL = "fail"
NA = "not_applicable"


class Tier(str, Enum):
    PRESENCE = "presence"
    FUZZY = "fuzzy"
    EXACT = "exact"


class WispType(str, Enum):
    LINE_BREAKS = "LINE_BREAKS"
    PREFIX = "PREFIX"
    INTERNAL = "INTERNAL"
    VERTICAL = "VERTICAL"


class UnitTestId(str, Enum):
    LB_PRESENCE = "1"
    PREFIX_PRESENCE = "2a"
    PREFIX_FUZZY = "2b"
    PREFIX_EXACT = "2c"
    INTERNAL_PRESENCE = "3a"
    INTERNAL_FUZZY = "3b"
    INTERNAL_EXACT = "3c"
    VERTICAL_PRESENCE = "4a"
    VERTICAL_FUZZY = "4b"
    VERTICAL_EXACT = "4c"

    @property
    def tier(self) -> Tier:
        if self.value in ("1", "2a", "3a", "4a"):
            return Tier.PRESENCE
        if self.value in ("2b", "3b", "4b"):
            return Tier.FUZZY
        return Tier.EXACT

    @property
    def wisp_type(self) -> WispType:
        return {
            "1": WispType.LINE_BREAKS,
            "2": WispType.PREFIX,
            "3": WispType.INTERNAL,
            "4": WispType.VERTICAL,
        }[self.value[0]]


ALL_TESTS = tuple(UnitTestId)


class VerdictError(ValueError):
    """Malformed verdict record."""


@dataclass(frozen=True)
class VerdictRecord:
    poem_id: str
    method_id: str
    annotator_id: str
    answers: dict  # UnitTestId -> PASS | FAIL | NA
    ocr_error: bool = False

    def __post_init__(self):
        for test, answer in self.answers.items():
            if not isinstance(test, UnitTestId):
                raise VerdictError(f"unknown unit test {test!r}")
            if answer not in (PASS, FAIL, NA):
                raise VerdictError(f"invalid answer {answer!r} for test {test.value}")
        if all(a == NA for a in self.answers.values()):
            raise VerdictError("record has no applicable test")

    @property
    def applicable(self) -> list[UnitTestId]:
        return [t for t, a in self.answers.items() if a != NA]

    @property
    def passes(self) -> int:
        return sum(1 for a in self.answers.values() if a == PASS)


def record_to_dict(r: VerdictRecord) -> dict:
    return {
        "poem_id": r.poem_id,
        "method_id": r.method_id,
        "annotator_id": r.annotator_id,
        "answers": {t.value: a for t, a in r.answers.items()},
        "ocr_error": r.ocr_error,
    }


def record_from_dict(d: dict) -> VerdictRecord:
    try:
        answers = {UnitTestId(k): v for k, v in d["answers"].items()}
        return VerdictRecord(
            poem_id=d["poem_id"],
            method_id=d["method_id"],
            annotator_id=d["annotator_id"],
            answers=answers,
            ocr_error=bool(d.get("ocr_error", False)),
        )
    except (KeyError, ValueError) as exc:
        raise VerdictError(f"malformed verdict record: {exc}")


def load_verdicts(path) -> list[VerdictRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                out.append(record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, VerdictError) as exc:
                raise VerdictError(f"verdict record {i}: {exc}")
    return out


def save_verdicts(path, records: Iterable[VerdictRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(record_to_dict(r)) + "\n")


# ---------------------------------------------------------------------------
# Adjudication


def adjudicate(records: list[VerdictRecord], policy: str = "prefer_mistakes") -> VerdictRecord:
    """Resolve multiple annotators' verdicts for one (poem, method) pair.

    prefer_mistakes: any fail wins; pass requires no fail and at least one
    pass; not_applicable only when unanimous.  majority: most common answer,
    fail winning ties.
    """
    if not records:
        raise VerdictError("no records to adjudicate")
    first = records[0]
    if any((r.poem_id, r.method_id) != (first.poem_id, first.method_id) for r in records):
        raise VerdictError("adjudicate called across different (poem, method) pairs")

    tests = sorted({t for r in records for t in r.answers}, key=lambda t: t.value)
    answers = {}
    for test in tests:
        got = [r.answers[test] for r in records if test in r.answers]
        if policy == "prefer_mistakes":
            if FAIL in got:
                answers[test] = FAIL
            elif PASS in got:
                answers[test] = PASS
            else:
                answers[test] = NA
        elif policy == "majority":
            counts = Counter(got)
            top = max(counts.values())
            winners = [a for a, c in counts.items() if c == top]
            answers[test] = FAIL if FAIL in winners else (PASS if PASS in winners else NA)
        else:
            raise VerdictError(f"unknown adjudication policy {policy!r}")
    return VerdictRecord(
        poem_id=first.poem_id,
        method_id=first.method_id,
        annotator_id="adjudicated",
        answers=answers,
        ocr_error=any(r.ocr_error for r in records),
    )


def adjudicate_all(records: list[VerdictRecord], policy: str = "prefer_mistakes") -> list[VerdictRecord]:
    groups: dict[tuple[str, str], list[VerdictRecord]] = {}
    for r in records:
        groups.setdefault((r.poem_id, r.method_id), []).append(r)
    return [adjudicate(group, policy) for _, group in sorted(groups.items())]


# ---------------------------------------------------------------------------
# Annotation sets and scores


@dataclass
class AnnotationSet:
    records: list[VerdictRecord]

    def partitions(self):
        """(catastrophic, mixed, pure) record lists."""
        cat, mixed, pure = [], [], []
        for r in self.records:
            if not r.ocr_error:
                pure.append(r)
            elif r.passes == 0:
                cat.append(r)
            else:
                mixed.append(r)
        return cat, mixed, pure


class ScoringError(ValueError):
    pass


def reliability(aset: AnnotationSet) -> Fraction:
    if not aset.records:
        raise ScoringError("cannot score an empty annotation set")
    cat, mixed, _ = aset.partitions()
    n = len(aset.records)
    return 1 - (Fraction(len(cat), n) + Fraction(1, 2) * Fraction(len(mixed), n))


def _test_counts(records, tests=ALL_TESTS):
    """Per test: (true accepts, applicable annotations)."""
    out = {}
    for t in tests:
        applicable = [r for r in records if r.answers.get(t, NA) != NA]
        passed = [r for r in applicable if r.answers[t] == PASS]
        out[t] = (len(passed), len(applicable))
    return out


def _scored_tests(aset: AnnotationSet, warnings: Optional[list] = None):
    counts = _test_counts(aset.records)
    kept = {t: c for t, c in counts.items() if c[1] > 0}
    if warnings is not None:
        for t, c in counts.items():
            if c[1] == 0:
                warnings.append(f"test {t.value} has zero applicable annotations; dropped")
    if not kept:
        raise ScoringError("no unit test has any applicable annotation")
    return kept


def macro_score(aset: AnnotationSet, warnings: Optional[list] = None) -> Fraction:
    kept = _scored_tests(aset, warnings)
    return sum(Fraction(tp, ap) for tp, ap in kept.values()) / len(kept) * 100


def weighted_score(aset: AnnotationSet, warnings: Optional[list] = None) -> Fraction:
    kept = _scored_tests(aset, warnings)
    total_t = sum(tp for tp, _ in kept.values())
    total_a = sum(ap for _, ap in kept.values())
    return Fraction(total_t, total_a) * 100


def composite_score(aset: AnnotationSet, warnings: Optional[list] = None) -> Fraction:
    return macro_score(aset, warnings) * reliability(aset)


def pure_score(aset: AnnotationSet, warnings: Optional[list] = None) -> Fraction:
    _, _, pure = aset.partitions()
    kept = _scored_tests(aset, None)
    rates = []
    for t in kept:
        counts = _test_counts(pure, tests=(t,))[t]
        if counts[1] == 0:
            if warnings is not None:
                warnings.append(f"test {t.value} has no pure annotations; dropped from Pure")
            continue
        rates.append(Fraction(counts[0], counts[1]))
    if not rates:
        raise ScoringError("no unit test has pure annotations")
    return sum(rates) / len(rates) * 100


def type_pass_rates(aset: AnnotationSet) -> dict:
    """Micro pass rate per WISP type over that type's tests (None if empty)."""
    out = {}
    counts = _test_counts(aset.records)
    for wt in WispType:
        tp = sum(counts[t][0] for t in ALL_TESTS if t.wisp_type is wt)
        ap = sum(counts[t][1] for t in ALL_TESTS if t.wisp_type is wt)
        out[wt.value] = Fraction(tp, ap) * 100 if ap else None
    return out


def ocr_error_rate(aset: AnnotationSet) -> Fraction:
    if not aset.records:
        raise ScoringError("cannot score an empty annotation set")
    return Fraction(sum(1 for r in aset.records if r.ocr_error), len(aset.records)) * 100


# ---------------------------------------------------------------------------
# Automated checks


def _nonblank_lines(text: str) -> list[str]:
    return [ln for ln in text.split("\n") if visible_length(ln) > 0]


def prefix_magnitudes(text: str) -> list[int]:
    out = []
    for ln in _nonblank_lines(text):
        lead = len(ln) - len(ln.lstrip(" "))
        if lead >= 1:
            out.append(lead)
    return out


def internal_magnitudes(text: str) -> list[int]:
    out = []
    for i, ln in enumerate(text.split("\n")):
        out.extend(e.length for e in classify_internal(ln, i))
    return out


def vertical_magnitudes(text: str) -> list[int]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    out = []
    run = 0
    seen_text = False
    for ln in lines:
        if visible_length(ln) == 0:
            if seen_text:
                run += 1
        else:
            if run:
                out.append(run)
            run = 0
            seen_text = True
    return out


def _edge_words(text: str) -> list[tuple[str, str]]:
    out = []
    for ln in _nonblank_lines(text):
        words = ln.split()
        out.append((words[0], words[-1]))
    return out


def _magnitudes(wisp_type: WispType, text: str) -> list[int]:
    if wisp_type is WispType.PREFIX:
        return prefix_magnitudes(text)
    if wisp_type is WispType.INTERNAL:
        return internal_magnitudes(text)
    return vertical_magnitudes(text)


def _weak_order_preserved(truth: list[int], cand: list[int]) -> bool:
    for i in range(len(truth)):
        for j in range(i + 1, len(truth)):
            dt = (truth[i] > truth[j]) - (truth[i] < truth[j])
            dc = (cand[i] > cand[j]) - (cand[i] < cand[j])
            if dt != dc:
                return False
    return True


def auto_check(test: UnitTestId, truth: str, candidate: str) -> str:
    """Run one unit test automatically; returns pass/fail/not_applicable.

    Truth and candidate events are paired by ordinal among events of the
    same type; fuzzy and exact tiers fail when the candidate's event count
    differs from the truth's.
    """
    if test is UnitTestId.LB_PRESENCE:
        return PASS if _edge_words(truth) == _edge_words(candidate) else FAIL

    t_mags = _magnitudes(test.wisp_type, truth)
    c_mags = _magnitudes(test.wisp_type, candidate)

    if test.tier is Tier.PRESENCE:
        if not t_mags:
            return NA
        return PASS if c_mags else FAIL
    if test.tier is Tier.FUZZY:
        if len(t_mags) <= 1:
            return NA
        if len(c_mags) != len(t_mags):
            return FAIL
        return PASS if _weak_order_preserved(t_mags, c_mags) else FAIL
    # exact tier
    if not t_mags:
        return NA
    if len(c_mags) != len(t_mags):
        return FAIL
    tolerance = 0 if test.wisp_type is WispType.VERTICAL else 1
    return PASS if all(abs(t - c) <= tolerance for t, c in zip(t_mags, c_mags)) else FAIL


def auto_ocr_error(truth: str, candidate: str) -> bool:
    """True iff visible-character streams differ (whitespace ignored)."""
    strip = lambda s: "".join(ch for ch in s if not ch.isspace())
    return strip(truth) != strip(candidate)


def auto_verdict(poem_id: str, method_id: str, truth: str, candidate: str) -> VerdictRecord:
    answers = {t: auto_check(t, truth, candidate) for t in ALL_TESTS}
    return VerdictRecord(
        poem_id=poem_id,
        method_id=method_id,
        annotator_id="auto",
        answers=answers,
        ocr_error=auto_ocr_error(truth, candidate),
    )


def applicable_tests(truth: str) -> list[UnitTestId]:
    """Tests whose whitespace type the ground truth actually exhibits."""
    out = [UnitTestId.LB_PRESENCE]
    for wt, presence, fuzzy, exact in (
        (WispType.PREFIX, UnitTestId.PREFIX_PRESENCE, UnitTestId.PREFIX_FUZZY, UnitTestId.PREFIX_EXACT),
        (WispType.INTERNAL, UnitTestId.INTERNAL_PRESENCE, UnitTestId.INTERNAL_FUZZY, UnitTestId.INTERNAL_EXACT),
        (WispType.VERTICAL, UnitTestId.VERTICAL_PRESENCE, UnitTestId.VERTICAL_FUZZY, UnitTestId.VERTICAL_EXACT),
    ):
        mags = _magnitudes(wt, truth)
        if mags:
            out.extend([presence, exact])
            if len(mags) > 1:
                out.append(fuzzy)
    return sorted(out, key=lambda t: t.value)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class BenchReport:
    method_id: str
    macro: Fraction
    weighted: Fraction
    composite: Fraction
    pure: Fraction
    rel: Fraction
    type_rates: dict
    ocr_rate: Fraction
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def f(x):
            return None if x is None else round(float(x), 2)

        return {
            "method": self.method_id,
            "macro": f(self.macro),
            "weighted": f(self.weighted),
            "composite": f(self.composite),
            "pure": f(self.pure),
            "reliability": None if self.rel is None else round(float(self.rel), 4),
            **{wt.value: f(self.type_rates.get(wt.value)) for wt in WispType},
            "ocr_error_rate": f(self.ocr_rate),
            "warnings": self.warnings,
        }


def score_method(method_id: str, aset: AnnotationSet) -> BenchReport:
    warnings: list[str] = []
    return BenchReport(
        method_id=method_id,
        macro=macro_score(aset, warnings),
        weighted=weighted_score(aset),
        composite=composite_score(aset),
        pure=pure_score(aset, warnings),
        rel=reliability(aset),
        type_rates=type_pass_rates(aset),
        ocr_rate=ocr_error_rate(aset),
        warnings=warnings,
    )


_COLUMNS = ["macro", "weighted", "composite", "pure", "PREFIX", "INTERNAL", "LINE_BREAKS", "VERTICAL", "ocr_error_rate"]


def bench_report(sets_per_method: dict[str, AnnotationSet]) -> list[BenchReport]:
    if not sets_per_method:
        raise ScoringError("no methods to report")
    return [score_method(m, s) for m, s in sorted(sets_per_method.items())]


def best_flags(reports: list[BenchReport]) -> dict[str, set[str]]:
    """Per column, methods within 0.1 of the best (lowest wins for OCR)."""
    flags: dict[str, set[str]] = {c: set() for c in _COLUMNS}
    for col in _COLUMNS:
        values = {r.method_id: r.to_dict()[col] for r in reports}
        values = {m: v for m, v in values.items() if v is not None}
        if not values:
            continue
        best = min(values.values()) if col == "ocr_error_rate" else max(values.values())
        flags[col] = {m for m, v in values.items() if abs(v - best) <= 0.1}
    return flags


def report_table(reports: list[BenchReport]) -> str:
    flags = best_flags(reports)
    header = ["Method", "Macro", "Weighted", "Composite", "Pure", "PREFIX", "INTERNAL", "LINE_BREAKS", "VERTICAL", "OCR-ERROR"]
    rows = [header]
    for r in reports:
        d = r.to_dict()
        row = [r.method_id]
        for col in _COLUMNS:
            v = d[col]
            cell = "-" if v is None else f"{v:.2f}"
            if v is not None and r.method_id in flags[col]:
                cell += "*"
            row.append(cell)
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def report_json(reports: list[BenchReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)
