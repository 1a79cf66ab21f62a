"""Dependency-parse ingestion (CoNLL-U) and enjambment syntax analysis.

Parses are produced offline by any universal-dependencies-compatible tagger
and ingested here; tokens are aligned to poem lines by greedy matching over
visible characters, enjambed breaks are refined into lexical / clausal /
phrasal, and dependency triples spanning enjambed breaks are counted.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .annotate import AnnotatorConfig, _is_blank, ends_sentence
from .model import Poem

#: Dependency relations whose arcs mark a clause split when they link a
#: nominal to a verb (universal scheme label families).
CLAUSAL_RELATIONS = frozenset(
    {"nsubj", "obj", "iobj", "csubj", "ccomp", "xcomp", "advcl", "acl"}
)
NOMINAL_POS = frozenset({"NOUN", "PROPN", "PRON"})
VERBAL_POS = frozenset({"VERB", "AUX"})


class ConlluError(ValueError):
    """Malformed CoNLL-U input."""


class AlignmentError(ValueError):
    """Token stream does not match the poem's visible characters."""


@dataclass(frozen=True)
class Token:
    form: str
    upos: str
    head: int  # 0 = root, else 1-based index within the sentence
    deprel: str
    sentence_id: int


@dataclass(frozen=True)
class SyntaxDoc:
    poem_id: str
    tokens: tuple[Token, ...]

    def sentences(self) -> list[list[tuple[int, Token]]]:
        """Tokens grouped by sentence, paired with their global indices."""
        out: dict[int, list[tuple[int, Token]]] = {}
        for i, tok in enumerate(self.tokens):
            out.setdefault(tok.sentence_id, []).append((i, tok))
        return [out[k] for k in sorted(out)]


@dataclass(frozen=True)
class SpanningTriple:
    head_pos: str
    dep_pos: str
    relation: str
    count: int


@dataclass(frozen=True)
class TokenAlignment:
    #: token index -> line index of the token's first character
    line_of: tuple[int, ...]
    #: token indices split across a line break by hyphenation/wrapping
    split: frozenset[int]


def parse_conllu(path, poem_id: Optional[str] = None) -> SyntaxDoc:
    """Read a CoNLL-U file; multiword ranges are expanded to word lines."""
    tokens = []
    sentence_id = 0
    in_sentence = False
    expected_next = 1
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if in_sentence:
                    sentence_id += 1
                    in_sentence = False
                    expected_next = 1
                continue
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ConlluError(f"{path}:{lineno}: expected 10 tab-separated fields, got {len(cols)}")
            tok_id = cols[0]
            if "-" in tok_id or "." in tok_id:
                # multiword range lines and empty nodes are skipped; the
                # word-level lines that follow carry the parse
                continue
            try:
                idx = int(tok_id)
                head = int(cols[6]) if cols[6] != "_" else 0
            except ValueError:
                raise ConlluError(f"{path}:{lineno}: non-integer token id or head")
            if idx != expected_next:
                raise ConlluError(f"{path}:{lineno}: token id {idx}, expected {expected_next}")
            expected_next = idx + 1
            in_sentence = True
            tokens.append(Token(form=cols[1], upos=cols[3], head=head, deprel=cols[7], sentence_id=sentence_id))
    sent_lens = Counter(t.sentence_id for t in tokens)
    for tok in tokens:
        if not (0 <= tok.head <= sent_lens[tok.sentence_id]):
            raise ConlluError(f"{path}: head {tok.head} out of range in sentence {tok.sentence_id}")
    return SyntaxDoc(poem_id=poem_id or "", tokens=tuple(tokens))


def _visible(text: str) -> str:
    return "".join(ch for ch in text if not ch.isspace())


def align_tokens_to_lines(doc: SyntaxDoc, poem: Poem) -> TokenAlignment:
    """Greedy left-to-right match of token characters onto poem lines."""
    lines = poem.lines
    # flat visible stream with the line index of every character
    stream = []
    for li, line in enumerate(lines):
        for ch in line:
            if not ch.isspace():
                stream.append((ch, li))

    pos = 0
    line_of = []
    split = set()
    for ti, tok in enumerate(doc.tokens):
        chars = _visible(tok.form)
        if not chars:  # SPACE-POS or purely-whitespace tokens attach to the
            line_of.append(stream[pos][1] if pos < len(stream) else (len(lines) - 1))
            continue
        token_lines = []
        for ch in chars:
            if pos >= len(stream):
                raise AlignmentError(
                    f"poem {poem.id!r}: token {ti} ({tok.form!r}) extends past poem end (offset {pos})"
                )
            got, li = stream[pos]
            if got != ch:
                # hyphenated wraps insert a '-' at line end that the parse
                # may not carry
                if got == "-" and pos + 1 < len(stream) and stream[pos + 1][0] == ch:
                    pos += 1
                    got, li = stream[pos]
                else:
                    raise AlignmentError(
                        f"poem {poem.id!r}: mismatch at visible offset {pos}: "
                        f"poem has {got!r}, token {ti} ({tok.form!r}) has {ch!r}"
                    )
            token_lines.append(li)
            pos += 1
        line_of.append(token_lines[0])
        if len(set(token_lines)) > 1:
            split.add(ti)
    if pos != len(stream):
        raise AlignmentError(
            f"poem {poem.id!r}: {len(stream) - pos} visible characters left unmatched at offset {pos}"
        )
    return TokenAlignment(line_of=tuple(line_of), split=frozenset(split))


def _arcs(doc: SyntaxDoc):
    """All (head_index, dep_index, relation) arcs with global token indices."""
    for sent in doc.sentences():
        base = {local + 1: gi for local, (gi, _) in enumerate(sent)}
        for local, (gi, tok) in enumerate(sent, start=1):
            if tok.head == 0:
                continue
            yield base[tok.head], gi, tok.deprel


def classify_enjambment(
    break_line: int, doc: SyntaxDoc, alignment: TokenAlignment
) -> tuple[str, Optional[str]]:
    """Refine an enjambed break into lexical / clausal / phrasal.

    Precedence: a token split across the break wins; then a clausal-relation
    arc linking a nominal and a verb across the break; then any crossing arc.
    Returns (subcategory, detail).
    """
    for ti in alignment.split:
        if alignment.line_of[ti] == break_line:
            return "lexical", f"split token {doc.tokens[ti].form!r}"

    crossing = []
    for hi, di, rel in _arcs(doc):
        lh, ld = alignment.line_of[hi], alignment.line_of[di]
        if min(lh, ld) <= break_line < max(lh, ld):
            crossing.append((hi, di, rel))
    for hi, di, rel in crossing:
        head, dep = doc.tokens[hi], doc.tokens[di]
        nominal_verb = (head.upos in VERBAL_POS and dep.upos in NOMINAL_POS) or (
            head.upos in NOMINAL_POS and dep.upos in VERBAL_POS
        )
        if rel.split(":")[0] in CLAUSAL_RELATIONS and nominal_verb:
            return "clausal", f"{head.upos}->{dep.upos} ({rel})"
    if crossing:
        hi, di, rel = crossing[0]
        return "phrasal", f"{doc.tokens[hi].upos}->{doc.tokens[di].upos} ({rel})"
    return "phrasal", "adjacency-only"


def enjambed_breaks(poem: Poem, cfg: Optional[AnnotatorConfig] = None) -> set[int]:
    """Line indices whose break is not sentence-final (last line excluded)."""
    cfg = cfg or AnnotatorConfig()
    lines = poem.lines
    nonblank = [i for i, ln in enumerate(lines) if not _is_blank(ln)]
    return {i for i in nonblank[:-1] if not ends_sentence(lines[i], cfg)}


def spanning_triples(
    poem: Poem,
    doc: SyntaxDoc,
    alignment: Optional[TokenAlignment] = None,
    cfg: Optional[AnnotatorConfig] = None,
) -> list[SpanningTriple]:
    """Count (head POS, dependent POS, relation) arcs crossing enjambed breaks.

    An arc is counted once when it crosses at least one enjambed break;
    sentence-final breaks are excluded.
    """
    alignment = alignment or align_tokens_to_lines(doc, poem)
    enjambed = enjambed_breaks(poem, cfg)
    counts: Counter = Counter()
    for hi, di, rel in _arcs(doc):
        lh, ld = alignment.line_of[hi], alignment.line_of[di]
        if lh == ld:
            continue
        if any(min(lh, ld) <= b < max(lh, ld) for b in enjambed):
            counts[(doc.tokens[hi].upos, doc.tokens[di].upos, rel)] += 1
    triples = [
        SpanningTriple(head_pos=h, dep_pos=d, relation=r, count=c)
        for (h, d, r), c in counts.items()
    ]
    triples.sort(key=lambda t: (-t.count, t.head_pos, t.dep_pos, t.relation))
    return triples


def merge_triples(per_poem: list[list[SpanningTriple]]) -> list[SpanningTriple]:
    counts: Counter = Counter()
    for triples in per_poem:
        for t in triples:
            counts[(t.head_pos, t.dep_pos, t.relation)] += t.count
    out = [SpanningTriple(h, d, r, c) for (h, d, r), c in counts.items()]
    out.sort(key=lambda t: (-t.count, t.head_pos, t.dep_pos, t.relation))
    return out


def triples_to_json(triples: list[SpanningTriple]) -> str:
    return json.dumps(
        [
            {"head_pos": t.head_pos, "dep_pos": t.dep_pos, "relation": t.relation, "count": t.count}
            for t in triples
        ],
        indent=2,
    )


def triples_to_table(triples: list[SpanningTriple]) -> str:
    lines = [f"{'HEAD':8} {'DEP':8} {'RELATION':12} {'COUNT':>6}"]
    for t in triples:
        lines.append(f"{t.head_pos:8} {t.dep_pos:8} {t.relation:12} {t.count:>6}")
    return "\n".join(lines) + "\n"
