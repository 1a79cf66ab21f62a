"""Declarative config file shared by the linearizer, annotator, and bench.

A single JSON document with optional sections; anything omitted falls back
to defaults, and CLI flags override file values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .annotate import AnnotatorConfig
from .linearize import DEFAULT_SPACE_WIDTHS, IndentRule


@dataclass
class ToolConfig:
    indent_rule: IndentRule = field(default_factory=IndentRule)
    annotator: AnnotatorConfig = field(default_factory=AnnotatorConfig)
    bench_policy: str = "prefer_mistakes"
    service: dict = field(default_factory=dict)

    def provenance(self) -> dict:
        """Config values recorded alongside linearizer output."""
        return {
            "px_per_space": self.indent_rule.px_per_space,
            "em_per_space": self.indent_rule.em_per_space,
            "max_indent_spaces": self.indent_rule.max_indent_spaces,
            "centered_width": self.indent_rule.centered_width,
            "space_widths": {hex(cp): n for cp, n in self.indent_rule.space_widths.items()},
        }


def load_config(path=None) -> ToolConfig:
    if path is None:
        return ToolConfig()
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)

    lin = raw.get("linearizer", {})
    widths = dict(DEFAULT_SPACE_WIDTHS)
    for key, n in lin.get("space_widths", {}).items():
        widths[int(key, 0)] = int(n)
    indent_rule = IndentRule(
        px_per_space=lin.get("px_per_space", 10.0),
        em_per_space=lin.get("em_per_space", 0.5),
        max_indent_spaces=lin.get("max_indent_spaces", 64),
        centered_width=lin.get("centered_width", 64),
        space_widths=widths,
    )

    ann = raw.get("annotator", {})
    annotator = AnnotatorConfig(
        sentence_end_punct=frozenset(ann.get("sentence_end_punct", [".", "!", "?", "…"])),
        stanza_gap_lines=ann.get("stanza_gap_lines", 1),
        indent_period_max=ann.get("indent_period_max", 8),
        indent_coverage=ann.get("indent_coverage", 0.8),
        line_length_cv_threshold=ann.get("line_length_cv_threshold", 0.25),
        length_unit=ann.get("length_unit", "characters"),
    )

    return ToolConfig(
        indent_rule=indent_rule,
        annotator=annotator,
        bench_policy=raw.get("bench", {}).get("policy", "prefer_mistakes"),
        service=raw.get("service", {}),
    )
