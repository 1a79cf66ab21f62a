import os
import random

import pytest

from wisp.linearize import (
    IndentRule,
    LayoutStyle,
    MarginParseError,
    UnsupportedLayout,
    detect_layout_style,
    linearize,
    margin_to_indent,
    normalize_typography,
    visible_length,
)

HTML_DIR = os.path.join(os.path.dirname(__file__), "fixtures", "html")
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "fixtures", "golden")

FIXTURE_STYLES = {
    "line_divs_basic": LayoutStyle.LINE_DIVS,
    "line_divs_margins": LayoutStyle.LINE_DIVS,
    "line_divs_typography": LayoutStyle.LINE_DIVS,
    "br_paragraph_basic": LayoutStyle.BR_PARAGRAPH,
    "br_paragraph_nbsp": LayoutStyle.BR_PARAGRAPH,
    "br_paragraph_margin": LayoutStyle.BR_PARAGRAPH,
    "p_stanzas_basic": LayoutStyle.P_STANZAS,
    "p_stanzas_br": LayoutStyle.P_STANZAS,
    "p_stanzas_unicode": LayoutStyle.P_STANZAS,
    "centered_basic": LayoutStyle.CENTERED,
    "centered_span": LayoutStyle.CENTERED,
    "centered_stanzas": LayoutStyle.CENTERED,
}


def read_html(name):
    with open(os.path.join(HTML_DIR, name + ".html"), encoding="utf-8") as fh:
        return fh.read()


def read_golden(name):
    with open(os.path.join(GOLDEN_DIR, name + ".txt"), encoding="utf-8") as fh:
        return fh.read()


class TestDetectLayoutStyle:
    def test_div_per_line(self):
        assert detect_layout_style("<div><div>a</div><div>b</div></div>") == LayoutStyle.LINE_DIVS

    def test_single_paragraph_with_breaks(self):
        assert detect_layout_style("<p>a<br>b</p>") == LayoutStyle.BR_PARAGRAPH

    def test_multiple_paragraphs(self):
        assert detect_layout_style("<div><p>a</p><p>b</p></div>") == LayoutStyle.P_STANZAS

    def test_centered(self):
        assert detect_layout_style("<center>a<br>b</center>") == LayoutStyle.CENTERED

    def test_empty_fragment(self):
        with pytest.raises(UnsupportedLayout):
            detect_layout_style("")

    def test_unrecognized_structure_names_element(self):
        with pytest.raises(UnsupportedLayout, match="table"):
            detect_layout_style("<table><tr><td>a</td></tr></table>")

    @pytest.mark.parametrize("name,style", sorted(FIXTURE_STYLES.items()))
    def test_fixture_styles(self, name, style):
        assert detect_layout_style(read_html(name)) == style

    def test_mixed_precedence_line_divs_beats_p(self):
        html = "<div><div>a</div><p>x</p><p>y</p></div>"
        assert detect_layout_style(html) == LayoutStyle.LINE_DIVS


class TestMarginToIndent:
    def test_zero(self):
        assert margin_to_indent("0px", IndentRule()) == 0
        assert margin_to_indent("0", IndentRule()) == 0

    def test_px_arithmetic(self):
        # oracle: round(80 / 10)
        assert margin_to_indent("80px", IndentRule(px_per_space=10)) == round(80 / 10)
        assert margin_to_indent("25px", IndentRule(px_per_space=10)) == round(25 / 10)

    def test_em_arithmetic(self):
        assert margin_to_indent("2em", IndentRule(em_per_space=0.5)) == 4

    def test_negative_rejected(self):
        with pytest.raises(MarginParseError):
            margin_to_indent("-5px", IndentRule())

    def test_unparseable_rejected(self):
        for bad in ("wide", "5pt", "10%", ""):
            with pytest.raises(MarginParseError):
                margin_to_indent(bad, IndentRule())

    def test_cap(self):
        assert margin_to_indent("9999px", IndentRule(max_indent_spaces=64)) == 64

    def test_negative_margin_degrades_to_zero_indent(self):
        html = '<div><div style="margin-left: -5px">text</div></div>'
        result = linearize(html)
        assert result.text == "text\n"
        assert any("negative" in w for w in result.warnings)


class TestNormalizeTypography:
    def test_fi_ligature(self):
        assert normalize_typography("ﬁre") == "fire"

    def test_em_space_width_table(self):
        # oracle: width-table lookup for U+2003
        rule = IndentRule()
        assert normalize_typography("a b") == "a" + " " * rule.space_widths[0x2003] + "b"

    def test_ascii_identity(self):
        assert normalize_typography("abc") == "abc"

    def test_nbsp(self):
        assert normalize_typography("a b") == "a b"

    def test_custom_width_table(self):
        assert normalize_typography("a b", {0x2003: 5}) == "a     b"

    def test_idempotent_on_plain_text(self):
        text = "already   plain text\nwith lines"
        assert normalize_typography(text) == text


class TestLinearize:
    @pytest.mark.parametrize("name", sorted(FIXTURE_STYLES))
    def test_golden_files_byte_exact(self, name):
        result = linearize(read_html(name))
        assert result.text == read_golden(name)

    def test_two_stanza_fixture_is_five_lines(self):
        text = linearize(read_html("line_divs_basic")).text
        assert len(text.rstrip("\n").split("\n")) == 5
        assert text.split("\n")[2] == ""

    def test_margin_80px_gives_8_spaces(self):
        html = '<div><div>plain</div><div style="margin-left: 80px">in</div></div>'
        text = linearize(html, IndentRule(px_per_space=10)).text
        assert text.split("\n")[1] == " " * round(80 / 10) + "in"

    def test_centered_prefix_formula(self):
        width = 30
        html = "<center>abcde<br>xyz</center>"
        text = linearize(html, IndentRule(centered_width=width)).text
        for line in text.rstrip("\n").split("\n"):
            visible = line.strip(" ")
            lead = len(line) - len(line.lstrip(" "))
            assert lead == (width - len(visible)) // 2

    def test_ends_with_exactly_one_newline(self):
        for name in FIXTURE_STYLES:
            text = linearize(read_html(name)).text
            assert text.endswith("\n") and not text.endswith("\n\n")

    def test_deterministic(self):
        html = read_html("line_divs_margins")
        assert linearize(html).text == linearize(html).text

    def test_unsupported_layout_propagates(self):
        with pytest.raises(UnsupportedLayout):
            linearize("<table><tr><td>x</td></tr></table>")


WORDS = ["night", "river", "stone", "lamp", "sparrow", "salt", "door", "ember"]


def random_poem_html(rng):
    """Random fixture; returns (html, expected visible characters)."""
    style = rng.choice(["line_divs", "br_paragraph", "p_stanzas"])
    lines = []
    for _ in range(rng.randint(2, 8)):
        words = [rng.choice(WORDS) for _ in range(rng.randint(1, 5))]
        sep = rng.choice([" ", "  ", "  ", " "])
        lines.append(sep.join(words))
    visible = "".join(ch for ln in lines for ch in ln if not ch.isspace() and ch != " ")

    def attr(rng):
        if rng.random() < 0.3:
            return f' style="margin-left: {rng.choice([0, 20, 40, 80])}px"'
        return ""

    if style == "line_divs":
        body = "".join(f"<div{attr(rng)}>{ln}</div>" for ln in lines)
        html = f"<div>{body}</div>"
    elif style == "br_paragraph":
        html = f"<p{attr(rng)}>" + "<br>".join(lines) + "</p>"
    else:
        mid = max(1, len(lines) // 2)
        html = (
            "<div><p>" + "<br>".join(lines[:mid]) + "</p><p>" + "<br>".join(lines[mid:]) + "</p></div>"
        )
    return html, visible


class TestVisibleCharacterPreservation:
    def test_100_randomized_fixtures(self):
        rng = random.Random(20240817)
        for _ in range(100):
            html, visible = random_poem_html(rng)
            text = linearize(html).text
            got = "".join(ch for ch in text if ch not in (" ", "\n"))
            assert got == visible, html


class TestVisibleLength:
    def test_zero_width_and_combining_ignored(self):
        assert visible_length("áb​c") == 3

    def test_spaces_ignored(self):
        assert visible_length("  a  b  ") == 2
