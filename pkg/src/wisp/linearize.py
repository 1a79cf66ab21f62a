"""Whitespace-faithful HTML-to-text conversion for poem pages.

Handles four markup styles seen in the wild: per-line <div> elements
(optionally grouped into stanza divs), a single <p> with <br> breaks,
multiple <p> elements as stanzas, and center-aligned lines.  Inline CSS
left margins become leading spaces; typography (ligatures, exotic space
codepoints, small caps) is normalized so output uses only ASCII spaces
and LF newlines.

Only inline styles and element conventions are read; external stylesheets
and scripts are never evaluated.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from html.parser import HTMLParser
from typing import Optional


class LayoutStyle(Enum):
    LINE_DIVS = "line_divs"
    BR_PARAGRAPH = "br_paragraph"
    P_STANZAS = "p_stanzas"
    CENTERED = "centered"


class UnsupportedLayout(Exception):
    """No recognizable poem structure in the fragment."""


class MarginParseError(ValueError):
    """Unparseable or negative CSS margin value."""


#: Spaces emitted per exotic Unicode space codepoint; anything in Zs not
#: listed maps to a single space.
DEFAULT_SPACE_WIDTHS = {
    0x2002: 1,  # en space
    0x2003: 2,  # em space
    0x2009: 1,  # thin space
    0x200A: 1,  # hair space
    0x3000: 2,  # ideographic space
}

#: Single-codepoint ligatures decomposed into their constituent letters.
LIGATURES = {
    "ﬀ": "ff",
    "ﬁ": "fi",
    "ﬂ": "fl",
    "ﬃ": "ffi",
    "ﬄ": "ffl",
    "ﬅ": "st",
    "ﬆ": "st",
    "æ": "ae",
    "Æ": "AE",
    "œ": "oe",
    "Œ": "OE",
}


@dataclass(frozen=True)
class IndentRule:
    px_per_space: float = 10.0
    em_per_space: float = 0.5
    max_indent_spaces: int = 64
    centered_width: int = 64
    space_widths: dict = field(default_factory=lambda: dict(DEFAULT_SPACE_WIDTHS))


@dataclass
class LinearizeResult:
    text: str
    style: LayoutStyle
    warnings: list[str]


# ---------------------------------------------------------------------------
# Typography


def normalize_typography(text: str, space_widths: Optional[dict] = None) -> str:
    """Decompose ligatures, map Unicode spaces to ASCII, lower small caps.

    Each Zs-category codepoint (incl. no-break space) becomes a fixed number
    of ASCII spaces per the width table; everything else is left alone.
    """
    widths = DEFAULT_SPACE_WIDTHS if space_widths is None else space_widths
    out = []
    for ch in text:
        if ch in LIGATURES:
            out.append(LIGATURES[ch])
        elif ch != "\n" and unicodedata.category(ch) == "Zs":
            out.append(" " * widths.get(ord(ch), 1))
        elif 0x1D00 <= ord(ch) <= 0x1D2B:  # Latin small-capital codepoints
            decomposed = unicodedata.normalize("NFKD", ch)
            out.append(decomposed.lower() if decomposed != ch else ch)
        else:
            out.append(ch)
    return "".join(out)


def visible_length(text: str) -> int:
    """Count of visible characters; zero-width and combining marks count 0."""
    n = 0
    for ch in text:
        if ch in (" ", "\n"):
            continue
        cat = unicodedata.category(ch)
        if cat in ("Mn", "Cf"):
            continue
        n += 1
    return n


# ---------------------------------------------------------------------------
# CSS margins

_LENGTH_RE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*(px|em)?\s*$")


def parse_css_length(value: str) -> tuple[float, str]:
    """Parse a CSS length into (number, unit); bare 0 is allowed unitless."""
    m = _LENGTH_RE.match(value)
    if not m:
        raise MarginParseError(f"unparseable CSS length {value!r}")
    number = float(m.group(1))
    unit = m.group(2)
    if unit is None:
        if number == 0:
            return 0.0, "px"
        raise MarginParseError(f"missing unit in CSS length {value!r}")
    return number, unit


def margin_to_indent(margin: str, rule: IndentRule) -> int:
    """Convert a CSS left margin to a space count per the indent rule."""
    number, unit = parse_css_length(margin)
    if number < 0:
        raise MarginParseError(f"negative margin {margin!r}")
    per = rule.px_per_space if unit == "px" else rule.em_per_space
    indent = round(number / per)
    return max(0, min(indent, rule.max_indent_spaces))


def _parse_style(style_attr: str) -> dict:
    props = {}
    for part in style_attr.split(";"):
        if ":" not in part:
            continue
        name, _, value = part.partition(":")
        props[name.strip().lower()] = value.strip()
    return props


# ---------------------------------------------------------------------------
# HTML tree

_VOID_TAGS = {"br", "hr", "img", "meta", "link", "input", "wbr"}


class _Element:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag, attrs, parent):
        self.tag = tag
        self.attrs = dict(attrs)
        self.children = []
        self.parent = parent

    @property
    def style(self) -> dict:
        return _parse_style(self.attrs.get("style", ""))

    def iter_elements(self):
        for child in self.children:
            if isinstance(child, _Element):
                yield child
                yield from child.iter_elements()

    def text_content(self) -> str:
        parts = []
        for child in self.children:
            if isinstance(child, _Element):
                parts.append(child.text_content())
            else:
                parts.append(child)
        return "".join(parts)


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Element("#root", {}, None)
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        el = _Element(tag, attrs, self.stack[-1])
        self.stack[-1].children.append(el)
        if tag not in _VOID_TAGS:
            self.stack.append(el)

    def handle_startendtag(self, tag, attrs):
        self.stack[-1].children.append(_Element(tag, attrs, self.stack[-1]))

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        self.stack[-1].children.append(data)


def parse_html(html: str) -> _Element:
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root


# ---------------------------------------------------------------------------
# Layout detection


def _has_visible_text(el: _Element) -> bool:
    return bool(el.text_content().strip())


def _is_centered(el: _Element) -> bool:
    if el.tag == "center":
        return True
    style = el.style
    if style.get("text-align") == "center":
        return True
    return "center" in el.attrs.get("class", "").split()


def detect_layout_style(html_or_root) -> LayoutStyle:
    """Classify the fragment's markup convention.

    Precedence when styles are mixed: LINE_DIVS > P_STANZAS > BR_PARAGRAPH
    > CENTERED (more structured markup is more reliable lineation evidence).
    """
    root = html_or_root if isinstance(html_or_root, _Element) else parse_html(html_or_root)
    divs = [el for el in root.iter_elements() if el.tag == "div"]
    text_divs = [
        el
        for el in divs
        if any(isinstance(c, str) and c.strip() for c in el.children)
    ]
    if text_divs:
        return LayoutStyle.LINE_DIVS
    paragraphs = [el for el in root.iter_elements() if el.tag == "p" and _has_visible_text(el)]
    if len(paragraphs) >= 2:
        return LayoutStyle.P_STANZAS
    if len(paragraphs) == 1:
        return LayoutStyle.BR_PARAGRAPH
    centered = [el for el in root.iter_elements() if _is_centered(el) and _has_visible_text(el)]
    if centered:
        return LayoutStyle.CENTERED
    for child in root.children:
        if isinstance(child, _Element):
            raise UnsupportedLayout(f"no recognizable poem structure (outermost element <{child.tag}>)")
    raise UnsupportedLayout("empty fragment")


# ---------------------------------------------------------------------------
# Linearization

_SOURCE_WS_RE = re.compile(r"[ \t]*\n[ \t\n]*")


@dataclass
class _Line:
    text: str
    indent: int
    centered: bool


class _Emitter:
    """Accumulates poem lines and stanza breaks during the tree walk."""

    def __init__(self, rule: IndentRule):
        self.rule = rule
        self.lines: list[_Line] = []
        self.warnings: list[str] = []
        self._pending_break = False

    def stanza_break(self):
        if self.lines and self.lines[-1].text.strip(" "):
            self._pending_break = True

    def blank_line(self):
        self.lines.append(_Line("", 0, False))
        self._pending_break = False

    def emit(self, raw: str, indent: int, centered: bool, small_caps: bool):
        text = _SOURCE_WS_RE.sub(" ", raw)
        text = text.strip(" ")
        text = text.replace("\t", "    ")
        text = normalize_typography(text, self.rule.space_widths)
        if small_caps:
            text = text.lower()
        if not text.strip(" "):
            self.blank_line()
            return
        if self._pending_break:
            self.lines.append(_Line("", 0, False))
            self._pending_break = False
        self.lines.append(_Line(text, indent, centered))

    def render(self) -> str:
        out = []
        for ln in self.lines:
            if not ln.text.strip(" "):
                out.append("")
                continue
            if ln.centered:
                pad = max(0, (self.rule.centered_width - visible_length(ln.text)) // 2)
                out.append((" " * pad + ln.text).rstrip(" "))
            else:
                out.append((" " * ln.indent + ln.text).rstrip(" "))
        # trim leading/trailing blanks, collapse runs of blanks introduced by
        # markup to at most what was explicitly encoded
        while out and out[0] == "":
            out.pop(0)
        while out and out[-1] == "":
            out.pop()
        return "\n".join(out) + "\n"


def _margin_spaces(el: _Element, rule: IndentRule, warnings: list[str]) -> int:
    total = 0
    style = el.style
    for prop in ("margin-left", "text-indent"):
        if prop in style:
            try:
                total += margin_to_indent(style[prop], rule)
            except MarginParseError as exc:
                warnings.append(f"<{el.tag}>: {exc}; using indent 0")
    return total


def _effective_indent(el: _Element, rule: IndentRule, warnings: list[str]) -> int:
    total = 0
    node = el
    while node is not None and node.tag != "#root":
        total += _margin_spaces(node, rule, warnings)
        node = node.parent
    return min(total, rule.max_indent_spaces)


def _effective_centered(el: _Element) -> bool:
    node = el
    while node is not None and node.tag != "#root":
        if _is_centered(node):
            return True
        node = node.parent
    return False


def _effective_small_caps(el: _Element) -> bool:
    node = el
    while node is not None and node.tag != "#root":
        if node.style.get("font-variant") == "small-caps":
            return True
        if "smallcaps" in node.attrs.get("class", "").split():
            return True
        node = node.parent
    return False


def _emit_inline_lines(el: _Element, emitter: _Emitter):
    """Emit the content of an element whose lines are separated by <br>."""
    indent = _effective_indent(el, emitter.rule, emitter.warnings)
    centered = _effective_centered(el)
    small_caps = _effective_small_caps(el)
    buf = []

    def flush(blank_ok):
        raw = "".join(buf)
        buf.clear()
        if raw.strip():
            emitter.emit(raw, indent, centered, small_caps)
        elif blank_ok:
            emitter.blank_line()

    def is_small_caps(node):
        return (
            node.style.get("font-variant") == "small-caps"
            or "smallcaps" in node.attrs.get("class", "").split()
        )

    def walk(node, sc):
        for child in node.children:
            if isinstance(child, str):
                buf.append(child.lower() if sc else child)
            elif child.tag == "br":
                flush(blank_ok=True)
            else:
                walk(child, sc or is_small_caps(child))

    walk(el, small_caps)
    raw = "".join(buf)
    if raw.strip():
        emitter.emit(raw, indent, centered, small_caps)
    buf.clear()


def _line_divs(root: _Element) -> list[_Element]:
    out = []
    for el in root.iter_elements():
        if el.tag == "div" and not any(
            c.tag == "div" for c in el.children if isinstance(c, _Element)
        ):
            out.append(el)
    return out


def _ancestor_chain(el: _Element) -> list[_Element]:
    chain = []
    node = el
    while node is not None:
        chain.append(node)
        node = node.parent
    chain.reverse()  # root first
    return chain


def _common_container(leaves: list[_Element]) -> _Element:
    chains = [_ancestor_chain(leaf) for leaf in leaves]
    container = chains[0][0]
    for nodes in zip(*chains):
        if all(n is nodes[0] for n in nodes):
            container = nodes[0]
        else:
            break
    return container


def _stanza_key(leaf: _Element, container: _Element):
    """Group line divs by their child-of-container ancestor.

    Line divs sitting directly under the container share one implicit
    stanza; divs wrapped in a stanza div group by that wrapper.
    """
    chain = _ancestor_chain(leaf)
    for i, node in enumerate(chain):
        if node is container:
            below = chain[i + 1] if i + 1 < len(chain) else leaf
            return "top" if below is leaf else id(below)
    return "top"


def linearize(html: str, rule: Optional[IndentRule] = None) -> LinearizeResult:
    """Convert a poem HTML fragment to whitespace-faithful plain text."""
    rule = rule or IndentRule()
    root = parse_html(html)
    style = detect_layout_style(root)
    emitter = _Emitter(rule)

    if style is LayoutStyle.LINE_DIVS:
        leaves = _line_divs(root)
        container = _common_container(leaves) if leaves else root
        prev_key = None
        for leaf in leaves:
            key = _stanza_key(leaf, container)
            if prev_key is not None and key != prev_key:
                emitter.stanza_break()
            prev_key = key
            if not _has_visible_text(leaf):
                # divs holding only whitespace are explicit blank lines;
                # fully empty divs are structural padding
                if any(isinstance(c, str) and c for c in leaf.children):
                    emitter.blank_line()
                continue
            _emit_inline_lines(leaf, emitter)
    elif style is LayoutStyle.P_STANZAS:
        paragraphs = [el for el in root.iter_elements() if el.tag == "p" and _has_visible_text(el)]
        for i, p in enumerate(paragraphs):
            if i:
                emitter.stanza_break()
            _emit_inline_lines(p, emitter)
    elif style is LayoutStyle.BR_PARAGRAPH:
        paragraph = next(el for el in root.iter_elements() if el.tag == "p" and _has_visible_text(el))
        _emit_inline_lines(paragraph, emitter)
    else:  # CENTERED
        containers = [el for el in root.iter_elements() if _is_centered(el) and _has_visible_text(el)]
        # use outermost centered containers only
        outer = [el for el in containers if not any(el in list(c.iter_elements()) for c in containers if c is not el)]
        for i, el in enumerate(outer):
            if i:
                emitter.stanza_break()
            _emit_inline_lines(el, emitter)

    return LinearizeResult(emitter.render(), style, emitter.warnings)
