"""CoNLL-U ingestion and surface realization.

Reads 10-column CoNLL-U streams into an immutable sentence model that keeps
document structure (``# newdoc id`` starts a document, ``# newpar`` starts a
section) and enough surface information (SpaceAfter flags, multiword-token
ranges) to reproduce the original text byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

# Legacy treebanks spell the passive-auxiliary relation differently; the rule
# engine only ever sees the canonical spelling.
_DEPREL_ALIASES = {"auxpass": "aux:pass", "nsubjpass": "nsubj:pass"}

_MWT_ID = re.compile(r"^(\d+)-(\d+)$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")


@dataclass(frozen=True, slots=True)
class Token:
    index: int
    form: str
    lemma: str
    upos: str
    feats: dict
    head: int
    deprel: str
    space_after: bool = True

    def feat(self, key, default=None):
        return self.feats.get(key, default)


@dataclass(frozen=True, slots=True)
class MultiwordRange:
    """Surface token covering a span of syntactic words (e.g. ``3-4 du``)."""

    start: int
    end: int
    form: str
    space_after: bool = True


@dataclass(frozen=True, slots=True)
class ParsedSentence:
    tokens: tuple
    doc_id: str = ""
    section_index: int = 0
    sent_index: int = 0
    raw_text: str | None = None
    mwt: tuple = ()

    @property
    def source(self):
        return (self.doc_id, self.section_index, self.sent_index)

    def token_at(self, index):
        """1-based lookup; indices are contiguous so this is a direct offset."""
        return self.tokens[index - 1]

    def root(self):
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        raise ValueError("sentence has no root")

    def children(self, index):
        return [t for t in self.tokens if t.head == index]

    def subtree_indices(self, index):
        """Indices of the token and all its descendants."""
        out = {index}
        frontier = [index]
        while frontier:
            nxt = [t.index for t in self.tokens if t.head in frontier and t.index not in out]
            out.update(nxt)
            frontier = nxt
        return out

    def with_source(self, doc_id, section_index, sent_index):
        return replace(self, doc_id=doc_id, section_index=section_index,
                       sent_index=sent_index)


@dataclass
class Diagnostic:
    source: str
    line: int
    message: str

    def __str__(self):
        return f"{self.source}:{self.line}: {self.message}"


class ConlluError(ValueError):
    pass


def parse_feats(feats_field):
    if feats_field in ("_", ""):
        return {}
    feats = {}
    for pair in feats_field.split("|"):
        key, _, value = pair.partition("=")
        if key and key not in feats:
            feats[key] = value
    return feats


def _space_after(misc_field):
    if misc_field in ("_", ""):
        return True
    return not any(p == "SpaceAfter=No" for p in misc_field.split("|"))


def _normalize_deprel(deprel):
    return _DEPREL_ALIASES.get(deprel, deprel)


def parse_conllu(stream, source="<stream>", diagnostics=None):
    """Yield ParsedSentence values from an iterable of text lines.

    Malformed token lines and sentences without a root are skipped; each skip
    appends one Diagnostic to ``diagnostics`` (when given a list). Document
    and section indices are assigned from ``# newdoc id`` / ``# newpar``
    comments in input order.
    """
    if diagnostics is None:
        diagnostics = []

    doc_id = ""
    doc_count = 0
    section_index = 0
    sent_index = 0
    sent_in_doc = 0
    pending_newpar = False

    lines = []  # (lineno, text) for the current sentence block
    raw_text = None
    block_bad = False

    def flush():
        nonlocal lines, raw_text, block_bad, section_index, sent_index
        nonlocal sent_in_doc, pending_newpar
        if not lines:
            # a marker before an empty block still applies to the next sentence
            raw_text = None
            block_bad = False
            return None
        if pending_newpar and sent_in_doc > 0:
            section_index += 1
            sent_index = 0
        pending_newpar = False
        sent = None
        if not block_bad:
            sent = _build_sentence(lines, raw_text, source, diagnostics)
        if sent is not None:
            sent = sent.with_source(doc_id, section_index, sent_index)
            sent_index += 1
        sent_in_doc += 1
        lines = []
        raw_text = None
        block_bad = False
        return sent

    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if line == "":
            sent = flush()
            if sent is not None:
                yield sent
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("newdoc"):
                sent = flush()
                if sent is not None:
                    yield sent
                doc_count += 1
                _, _, value = comment.partition("=")
                doc_id = value.strip() if "=" in comment else f"doc{doc_count}"
                section_index = 0
                sent_index = 0
                sent_in_doc = 0
                pending_newpar = False
            elif comment.startswith("newpar"):
                pending_newpar = True
            elif comment.startswith("text"):
                _, eq, value = comment.partition("=")
                if eq:
                    raw_text = value.strip()
            continue
        # token line
        cols = line.split("\t")
        if len(cols) != 10:
            diagnostics.append(Diagnostic(source, lineno,
                                          f"expected 10 tab-separated columns, got {len(cols)}"))
            block_bad = True
            continue
        lines.append((lineno, cols))

    sent = flush()
    if sent is not None:
        yield sent


def _build_sentence(lines, raw_text, source, diagnostics):
    tokens = []
    mwt = []
    first_line = lines[0][0]
    for lineno, cols in lines:
        tid = cols[0]
        if _EMPTY_ID.match(tid):
            continue  # enhanced-dependency empty nodes carry no surface form
        m = _MWT_ID.match(tid)
        if m:
            mwt.append(MultiwordRange(int(m.group(1)), int(m.group(2)),
                                      cols[1], _space_after(cols[9])))
            continue
        try:
            index = int(tid)
            head = int(cols[6]) if cols[6] != "_" else 0
        except ValueError:
            diagnostics.append(Diagnostic(source, lineno, f"malformed id/head field: {tid!r}/{cols[6]!r}"))
            return None
        tokens.append(Token(
            index=index,
            form=cols[1],
            lemma=cols[2],
            upos=cols[3],
            feats=parse_feats(cols[5]),
            head=head,
            deprel=_normalize_deprel(cols[7]),
            space_after=_space_after(cols[9]),
        ))

    if not tokens:
        diagnostics.append(Diagnostic(source, first_line, "sentence block contains no tokens"))
        return None
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            diagnostics.append(Diagnostic(source, first_line,
                                          f"non-contiguous token indices at {tok.index}"))
            return None
    n = len(tokens)
    roots = [t for t in tokens if t.head == 0]
    if len(roots) != 1:
        diagnostics.append(Diagnostic(source, first_line,
                                      f"expected exactly one root, found {len(roots)}"))
        return None
    if any(t.head < 0 or t.head > n for t in tokens):
        diagnostics.append(Diagnostic(source, first_line, "head index out of range"))
        return None
    return ParsedSentence(tokens=tuple(tokens), raw_text=raw_text, mwt=tuple(mwt))


def parse_conllu_file(path, diagnostics=None):
    with open(path, encoding="utf-8") as handle:
        yield from parse_conllu(handle, source=str(path), diagnostics=diagnostics)


def detokenize(sentence):
    """Reconstruct the surface string from forms and SpaceAfter flags.

    Multiword ranges take precedence over the words they cover, so contracted
    surface forms come back out exactly as they went in. The result never has
    a trailing space.
    """
    covered = {}
    for rng in sentence.mwt:
        covered[rng.start] = rng
    parts = []
    i = 1
    n = len(sentence.tokens)
    while i <= n:
        rng = covered.get(i)
        if rng is not None:
            parts.append((rng.form, rng.space_after))
            i = rng.end + 1
        else:
            tok = sentence.token_at(i)
            parts.append((tok.form, tok.space_after))
            i += 1
    out = []
    for pos, (form, space) in enumerate(parts):
        out.append(form)
        if space and pos != len(parts) - 1:
            out.append(" ")
    return "".join(out)


def to_conllu(sentence, include_meta=True):
    """Serialize one sentence back to CoNLL-U (used by tests and fixtures)."""
    lines = []
    if include_meta:
        lines.append(f"# text = {detokenize(sentence)}")
    mwt_at = {rng.start: rng for rng in sentence.mwt}
    for tok in sentence.tokens:
        rng = mwt_at.get(tok.index)
        if rng is not None:
            misc = "_" if rng.space_after else "SpaceAfter=No"
            lines.append(f"{rng.start}-{rng.end}\t{rng.form}\t_\t_\t_\t_\t_\t_\t_\t{misc}")
        feats = "|".join(f"{k}={v}" for k, v in sorted(tok.feats.items())) or "_"
        misc = "_" if tok.space_after else "SpaceAfter=No"
        lines.append("\t".join([str(tok.index), tok.form, tok.lemma, tok.upos, "_",
                                feats, str(tok.head), tok.deprel, "_", misc]))
    return "\n".join(lines) + "\n"
