"""Polarity reversal: add a negation cue to an affirmative sentence or strip
the cue from a negated one, with every side adjustment the grammar needs
(do-support, de-contraction, polarity-item swaps, but -> and).

All transformations are pure: they take a ParsedSentence and return a new one
together with an ordered edit trace that replays the surface change.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum

from .conllu import ParsedSentence, Token, detokenize
from .cues import (AUX_RELS, PREDICATE_RELS, VERBAL_UPOS, CueKind, CueLexicon,
                   RejectReason, clause_predicate, detect_cues, eligibility,
                   is_fused_cue, is_question, main_verb, normalize_form)
from . import morphology
from .morphology import MorphologyError, negate_aux

# Bare main verbs that take the cue directly after them, without do-support.
DIRECT_NEGATION_FORMS = {
    "were", "was", "is", "are", "do", "will", "would", "may", "might",
    "shall", "should", "can", "could", "must",
}

MODAL_FORMS = {"can", "could", "will", "would", "shall", "should", "must",
               "may", "might", "'ll"}
HAVE_FORMS = {"have", "has", "had", "'ve"}
DO_FORMS = {"do", "does", "did"}

ADD_NPI_SWAPS = (("already", "yet"), ("some", "any"))
REMOVE_NPI_SWAPS = (("yet", "already"), ("any", "some"))


class Direction(Enum):
    ADDED = "added"
    REMOVED = "removed"


class EditKind(Enum):
    INSERT_CUE = "InsertCue"
    DELETE_CUE = "DeleteCue"
    REPLACE_VERB_FORM = "ReplaceVerbForm"
    INSERT_AUX = "InsertAux"
    DELETE_AUX = "DeleteAux"
    SWAP_NPI = "SwapNPI"
    SWAP_CONJ = "SwapConj"


@dataclass(frozen=True)
class Edit:
    """One surface operation at a 0-based list position, applied in order.

    before=None inserts, after=None deletes, both set replaces. Replaying the
    trace over the input forms reproduces the output forms exactly.
    """

    position: int
    kind: EditKind
    before: str | None
    after: str | None


@dataclass(frozen=True)
class ReversalOutcome:
    sentence: ParsedSentence
    text: str
    direction: Direction
    cue_used: CueKind
    edits: tuple


class RejectionKind(Enum):
    NOT_AFFIRMATIVE = "NotAffirmative"
    NO_MAIN_VERB = "NoMainVerb"
    IS_QUESTION = "IsQuestion"
    UNSUPPORTED_CONSTRUCTION = "UnsupportedConstruction"
    NO_CUE = "NoCue"
    MULTIPLE_CUES = "MultipleCues"
    CUE_NOT_ON_MAIN_VERB = "CueNotOnMainVerb"
    UNSUPPORTED_CUE = "UnsupportedCue"


_REJECT_FROM_VERDICT = {
    RejectReason.NO_CUE: RejectionKind.NO_CUE,
    RejectReason.MULTIPLE_CUES: RejectionKind.MULTIPLE_CUES,
    RejectReason.CUE_NOT_ON_MAIN_VERB: RejectionKind.CUE_NOT_ON_MAIN_VERB,
    RejectReason.IS_QUESTION: RejectionKind.IS_QUESTION,
    RejectReason.UNSUPPORTED_CUE: RejectionKind.UNSUPPORTED_CUE,
    RejectReason.NO_MAIN_VERB: RejectionKind.NO_MAIN_VERB,
}


class ReversalRejected(Exception):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason.value)


@dataclass(frozen=True)
class CuePolicy:
    """Either a fixed cue kind or a seeded distribution over the three kinds."""

    fixed: CueKind | None = None
    weights: dict | None = None

    def __post_init__(self):
        if (self.fixed is None) == (self.weights is None):
            raise ValueError("exactly one of fixed/weights must be given")
        if self.weights is not None:
            total = sum(self.weights.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"cue weights must sum to 1, got {total}")

    def pick(self, rng):
        if self.fixed is not None:
            return self.fixed
        kinds = [CueKind.NOT, CueKind.NT, CueKind.NEVER]
        weights = [self.weights.get(k, 0.0) for k in kinds]
        return rng.choices(kinds, weights=weights, k=1)[0]


class _Tok:
    """Mutable working token; heads are object references so positions can
    shift freely during editing."""

    __slots__ = ("form", "lemma", "upos", "feats", "head", "deprel",
                 "space_after")

    def __init__(self, form, lemma, upos, feats, head, deprel, space_after):
        self.form = form
        self.lemma = lemma
        self.upos = upos
        self.feats = dict(feats)
        self.head = head  # _Tok or None for root
        self.deprel = deprel
        self.space_after = space_after


class _Workspace:
    def __init__(self, sentence):
        toks = [_Tok(t.form, t.lemma, t.upos, t.feats, None, t.deprel,
                     t.space_after) for t in sentence.tokens]
        for tok, src in zip(toks, sentence.tokens):
            tok.head = toks[src.head - 1] if src.head else None
        self.tokens = toks
        self._by_orig = dict(zip((t.index for t in sentence.tokens), toks))
        self.edits = []

    def by_orig(self, index):
        return self._by_orig[index]

    def pos(self, tok):
        for i, t in enumerate(self.tokens):
            if t is tok:
                return i
        raise ValueError("token not in workspace")

    def children(self, tok):
        return [t for t in self.tokens if t.head is tok]

    def subtree(self, tok):
        out = {id(tok)}
        members = [tok]
        changed = True
        while changed:
            changed = False
            for t in self.tokens:
                if t.head is not None and id(t.head) in out and id(t) not in out:
                    out.add(id(t))
                    members.append(t)
                    changed = True
        return members

    def insert_after(self, anchor, tok, kind):
        self._insert(self.pos(anchor) + 1, tok, kind)

    def insert_before(self, anchor, tok, kind):
        self._insert(self.pos(anchor), tok, kind)

    def _insert(self, position, tok, kind):
        if position > 0:
            prev = self.tokens[position - 1]
            tok.space_after = prev.space_after
            prev.space_after = True
        else:
            tok.space_after = True
        self.tokens.insert(position, tok)
        self.edits.append(Edit(position, kind, None, tok.form))

    def delete(self, tok, kind):
        position = self.pos(tok)
        if position > 0:
            self.tokens[position - 1].space_after = tok.space_after
        for child in self.children(tok):
            child.head = tok.head
        self.tokens.pop(position)
        self.edits.append(Edit(position, kind, tok.form, None))

    def replace_form(self, tok, new_form, kind, lemma=None, feats=None):
        old = tok.form
        if lemma is not None:
            tok.lemma = lemma
        if feats is not None:
            tok.feats = dict(feats)
        if new_form == old:
            return
        tok.form = new_form
        self.edits.append(Edit(self.pos(tok), kind, old, new_form))

    def to_sentence(self, template):
        order = {id(t): i + 1 for i, t in enumerate(self.tokens)}
        tokens = tuple(Token(
            index=order[id(t)],
            form=t.form,
            lemma=t.lemma,
            upos=t.upos,
            feats=dict(t.feats),
            head=order[id(t.head)] if t.head is not None else 0,
            deprel=t.deprel,
            space_after=t.space_after,
        ) for t in self.tokens)
        return ParsedSentence(tokens=tokens, doc_id=template.doc_id,
                              section_index=template.section_index,
                              sent_index=template.sent_index,
                              raw_text=None, mwt=())


def _cue_token(form, lemma, upos, head, feats=None):
    return _Tok(form, lemma, upos, feats or {}, head, "advmod", True)


def _match_case(template, result):
    if template[:1].isupper() and result[:1].islower():
        return result[:1].upper() + result[1:]
    return result


def _sentence_cased(form):
    return form[:1].isupper() and (len(form) == 1 or not form[1:].isupper())


def _fix_initial_capitalization(ws, original_first):
    """Keep sentence casing stable when edits changed the first position."""
    if not ws.tokens:
        return
    first = ws.tokens[0]
    if first is original_first:
        return
    if original_first in ws.tokens:
        # something was inserted in front of the old first token
        cased = _sentence_cased(original_first.form)
        if cased and original_first.upos != "PROPN":
            lowered = original_first.form[:1].lower() + original_first.form[1:]
            ws.replace_form(original_first, lowered, EditKind.REPLACE_VERB_FORM)
    else:
        cased = _sentence_cased(original_first.form)
    if cased and first.form[:1].islower():
        ws.replace_form(first, first.form[:1].upper() + first.form[1:],
                        EditKind.REPLACE_VERB_FORM)


def select_auxiliary(aux_chain):
    """Pick the auxiliary that carries the cue.

    A single auxiliary carries it. In longer chains a leading modal defers to
    the following form of "have"; otherwise the first auxiliary wins.
    """
    if not aux_chain:
        raise ValueError("empty auxiliary chain")
    if len(aux_chain) == 1:
        return aux_chain[0]
    first = aux_chain[0]
    if normalize_form(first.form) in MODAL_FORMS:
        for tok in aux_chain[1:]:
            if normalize_form(tok.form) in HAVE_FORMS or tok.lemma.lower() == "have":
                return tok
    return first


def _aux_chain(ws, root):
    rels = AUX_RELS if root.upos in VERBAL_UPOS else PREDICATE_RELS
    chain = [t for t in ws.children(root) if t.deprel in rels]
    chain.sort(key=ws.pos)
    return chain


def _place_cell(ws, sel, cell, cue):
    """Realize a table cell: the cue lands before or after the auxiliary as
    written, and n't cells fuse into the auxiliary token itself. Returns the
    token now carrying the cue."""
    sel_lower = sel.form.lower()
    word = "never" if cue is CueKind.NEVER else "not"
    upos = "ADV" if cue is CueKind.NEVER else "PART"
    if cell == f"{word} {sel_lower}":
        tok = _cue_token(word, word, upos, sel)
        ws.insert_before(sel, tok, EditKind.INSERT_CUE)
        return tok
    if cell == f"{sel_lower} {word}":
        tok = _cue_token(word, word, upos, sel)
        ws.insert_after(sel, tok, EditKind.INSERT_CUE)
        return tok
    ws.replace_form(sel, _match_case(sel.form, cell), EditKind.INSERT_CUE)
    return sel


def _do_form_for_present(ws, mv):
    feats = mv.feats
    if feats.get("Person") == "3" and feats.get("Number") == "Sing":
        return "does"
    if feats.get("Person") in ("1", "2") or feats.get("Number") == "Plur":
        return "do"
    subjects = [t for t in ws.children(mv) if t.deprel.startswith("nsubj")]
    if subjects:
        subj = min(subjects, key=ws.pos)
        if subj.feats.get("Person") == "3" and subj.feats.get("Number") == "Sing":
            return "does"
        if subj.feats.get("Number") == "Plur" or subj.feats.get("Person") in ("1", "2"):
            return "do"
        if subj.upos in ("NOUN", "PROPN") and subj.feats.get("Number", "Sing") == "Sing":
            return "does"
    return "do"


def _is_gerund(mv):
    feats = mv.feats
    if feats.get("VerbForm") == "Ger":
        return True
    return feats.get("Tense") == "Pres" and feats.get("VerbForm") == "Part"


def _swap_npis(ws, scope_head, eligible_ids, pairs, kind=EditKind.SWAP_NPI,
               at_all=False):
    """First occurrence per pair, inside the predicate subtree and within the
    negation scope (the tokens that follow the cue)."""
    members = ws.subtree(scope_head)
    candidates = sorted((t for t in members if id(t) in eligible_ids),
                        key=ws.pos)
    for old, new in pairs:
        for tok in candidates:
            if normalize_form(tok.form) == old:
                ws.replace_form(tok, _match_case(tok.form, new), kind,
                                lemma=new)
                break
    if at_all:
        for tok in candidates:
            if normalize_form(tok.form) != "at":
                continue
            position = ws.pos(tok)
            if position + 1 >= len(ws.tokens):
                continue
            nxt = ws.tokens[position + 1]
            if normalize_form(nxt.form) == "all" and nxt in candidates:
                ws.replace_form(tok, _match_case(tok.form, "somewhat"), kind,
                                lemma="somewhat")
                ws.delete(nxt, kind)
                break


def add_negation(sentence, cue, lexicon=None):
    """Insert one negation cue into an affirmative sentence.

    The requested n't degrades to not wherever no contraction exists. Raises
    ReversalRejected for non-affirmative inputs, questions, verbless
    sentences, and verb forms the rules cannot negate.
    """
    lexicon = lexicon or CueLexicon.default()
    mv_index = main_verb(sentence)
    if mv_index is None:
        raise ReversalRejected(RejectionKind.NO_MAIN_VERB)
    if detect_cues(sentence, lexicon):
        raise ReversalRejected(RejectionKind.NOT_AFFIRMATIVE)
    if is_question(sentence):
        raise ReversalRejected(RejectionKind.IS_QUESTION)

    ws = _Workspace(sentence)
    original_first = ws.tokens[0]
    root = ws.by_orig(sentence.root().index)
    mv = ws.by_orig(mv_index)
    chain = _aux_chain(ws, root)
    if root.upos not in VERBAL_UPOS and len(chain) == 1:
        # lone copula: treat it as the bare main verb ("The sky is blue.")
        chain = []
    cue_used = cue

    if chain:
        sel = select_auxiliary(chain)
        if normalize_form(sel.form) == "are":
            # "are" is missing from the auxiliary table but negates like
            # is/was/were (the direct-negation list includes it)
            cell = {CueKind.NOT: "are not", CueKind.NT: "aren't",
                    CueKind.NEVER: "are never"}[cue]
        else:
            try:
                cell = negate_aux(sel.form, cue)
            except MorphologyError:
                raise ReversalRejected(
                    RejectionKind.UNSUPPORTED_CONSTRUCTION) from None
            if cell is None:
                cue_used = CueKind.NOT
                cell = negate_aux(sel.form, cue_used)
        cue_element = _place_cell(ws, sel, cell, cue_used)
    elif cue is CueKind.NEVER:
        cue_element = _cue_token("never", "never", "ADV", mv)
        ws.insert_before(mv, cue_element, EditKind.INSERT_CUE)
    elif normalize_form(mv.form) in DIRECT_NEGATION_FORMS:
        row = morphology.aux_negation_table().get(normalize_form(mv.form))
        if row is not None:
            cell = row.nt_form if cue is CueKind.NT else row.not_form
            if cell is None:
                cue_used = CueKind.NOT
                cell = row.not_form
            cue_element = _place_cell(ws, mv, cell, cue_used)
        elif cue is CueKind.NT:
            # "are" has no table row but contracts regularly
            ws.replace_form(mv, _match_case(mv.form, mv.form.lower() + "n't"),
                            EditKind.INSERT_CUE)
            cue_element = mv
        else:
            cue_element = _cue_token("not", "not", "PART", mv)
            ws.insert_after(mv, cue_element, EditKind.INSERT_CUE)
    elif _is_gerund(mv):
        cue_used = CueKind.NOT
        cue_element = _cue_token("not", "not", "PART", mv)
        ws.insert_before(mv, cue_element, EditKind.INSERT_CUE)
    elif mv.upos == "VERB" and mv.feats.get("Tense") in ("Past", "Pres"):
        # do-support: bare finite verb yields lemma plus an inflected "do"
        lemma_norm = normalize_form(mv.lemma)
        if lemma_norm in ("not", "never") or lemma_norm.endswith("n't"):
            # a cue-shaped lemma would surface as a second cue
            raise ReversalRejected(RejectionKind.UNSUPPORTED_CONSTRUCTION)
        if mv.feats.get("Tense") == "Past":
            do_form = "did"
            do_feats = {"Tense": "Past", "VerbForm": "Fin"}
        else:
            do_form = _do_form_for_present(ws, mv)
            do_feats = {"Tense": "Pres", "VerbForm": "Fin"}
            if do_form == "does":
                do_feats.update({"Person": "3", "Number": "Sing"})
        if cue is CueKind.NT:
            fused = morphology.aux_negation_table()[do_form].nt_form
            aux = _Tok(_match_case(mv.form, fused), "do", "AUX", do_feats,
                       mv, "aux", True)
            ws.insert_before(mv, aux, EditKind.INSERT_CUE)
            cue_element = aux
        else:
            cue_used = CueKind.NOT
            aux = _Tok(_match_case(mv.form, do_form), "do", "AUX", do_feats,
                       mv, "aux", True)
            ws.insert_before(mv, aux, EditKind.INSERT_AUX)
            cue_element = _cue_token("not", "not", "PART", aux)
            ws.insert_after(aux, cue_element, EditKind.INSERT_CUE)
        ws.replace_form(mv, mv.lemma, EditKind.REPLACE_VERB_FORM,
                        feats={"VerbForm": "Inf"})
    else:
        raise ReversalRejected(RejectionKind.UNSUPPORTED_CONSTRUCTION)

    scope_ids = {id(t) for t in ws.tokens[ws.pos(cue_element) + 1:]}
    _swap_npis(ws, root, scope_ids, ADD_NPI_SWAPS)
    _fix_initial_capitalization(ws, original_first)
    out = ws.to_sentence(sentence)
    return ReversalOutcome(sentence=out, text=detokenize(out),
                           direction=Direction.ADDED, cue_used=cue_used,
                           edits=tuple(ws.edits))


def remove_negation(sentence, lexicon=None):
    """Strip the single reversible cue and repair the clause around it."""
    lexicon = lexicon or CueLexicon.default()
    verdict = eligibility(sentence, lexicon)
    if not verdict.eligible:
        raise ReversalRejected(_REJECT_FROM_VERDICT[verdict.reason])
    cue = detect_cues(sentence, lexicon)[0]
    predicate = clause_predicate(sentence, cue)

    ws = _Workspace(sentence)
    original_first = ws.tokens[0]
    pred = ws.by_orig(predicate.index)
    cue_tok = ws.by_orig(cue.token_index)

    if is_fused_cue(sentence.token_at(cue.token_index)):
        # single-token contraction such as "didn't"
        try:
            restored = morphology.expand_contraction(cue_tok.form)
        except MorphologyError:
            raise ReversalRejected(RejectionKind.UNSUPPORTED_CONSTRUCTION) from None
        scope_ids = {id(t) for t in ws.tokens[ws.pos(cue_tok) + 1:]}
        ws.replace_form(cue_tok, restored, EditKind.DELETE_CUE)
    else:
        position = ws.pos(cue_tok)
        prev = ws.tokens[position - 1] if position > 0 else None
        scope_ids = {id(t) for t in ws.tokens[position + 1:]}
        if cue.kind is CueKind.NT and prev is not None and not prev.space_after:
            # split contraction: the treebank form "ca" hides finite "can"
            try:
                restored = morphology.expand_contraction(prev.form + "n't")
            except MorphologyError:
                raise ReversalRejected(RejectionKind.UNSUPPORTED_CONSTRUCTION) from None
            ws.delete(cue_tok, EditKind.DELETE_CUE)
            ws.replace_form(prev, restored, EditKind.REPLACE_VERB_FORM)
        else:
            ws.delete(cue_tok, EditKind.DELETE_CUE)

    _remove_bare_do(ws, pred)
    _swap_npis(ws, pred, scope_ids, REMOVE_NPI_SWAPS, at_all=True)
    _swap_but(ws, pred)
    _fix_initial_capitalization(ws, original_first)
    out = ws.to_sentence(sentence)
    return ReversalOutcome(sentence=out, text=detokenize(out),
                           direction=Direction.REMOVED, cue_used=cue.kind,
                           edits=tuple(ws.edits))


def _remove_bare_do(ws, pred):
    """Drop a do-support auxiliary left with no work and re-inflect the verb.

    Only fires on "do"/"does"/"did" as the sole auxiliary of a bare-lemma
    verb; semantically loaded auxiliaries stay put.
    """
    if pred.upos != "VERB" or pred.form != pred.lemma:
        return
    aux_children = [t for t in ws.children(pred) if t.deprel in PREDICATE_RELS]
    if len(aux_children) != 1:
        return
    aux = aux_children[0]
    if aux.lemma.lower() != "do" or normalize_form(aux.form) not in DO_FORMS:
        return
    do_form = normalize_form(aux.form)
    ws.delete(aux, EditKind.DELETE_AUX)
    lemma = pred.lemma
    if do_form == "did":
        new_form = morphology.past_tense(lemma)
        feats = {"Tense": "Past", "VerbForm": "Fin"}
    elif do_form == "does":
        new_form = morphology.third_person_singular(lemma)
        feats = {"Tense": "Pres", "VerbForm": "Fin", "Person": "3",
                 "Number": "Sing"}
    else:
        new_form = lemma
        feats = {"Tense": "Pres", "VerbForm": "Fin"}
    ws.replace_form(pred, _match_case(pred.form, new_form),
                    EditKind.REPLACE_VERB_FORM, feats=feats)


def _swap_but(ws, pred):
    for tok in ws.tokens:
        if normalize_form(tok.form) != "but" or tok.deprel != "cc":
            continue
        head = tok.head
        attached_to_clause = head is pred or (
            head is not None and head.head is pred and head.deprel == "conj")
        if attached_to_clause:
            ws.replace_form(tok, _match_case(tok.form, "and"),
                            EditKind.SWAP_CONJ, lemma="and")
            return


def _stable_seed(seed, source):
    doc_id, section_index, sent_index = source
    payload = f"{seed}:{doc_id}:{section_index}:{sent_index}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def reverse_polarity(sentence, policy, rng_seed=0, lexicon=None):
    """Dispatch on polarity: negated sentences lose their cue, affirmative
    sentences gain one chosen by the policy. The per-sentence generator is
    derived from (seed, document, section, sentence) so parallel and serial
    runs agree."""
    lexicon = lexicon or CueLexicon.default()
    verdict = eligibility(sentence, lexicon)
    if verdict.eligible:
        return remove_negation(sentence, lexicon)
    if not detect_cues(sentence, lexicon):
        rng = random.Random(_stable_seed(rng_seed, sentence.source))
        return add_negation(sentence, policy.pick(rng), lexicon)
    # cues present but not removable: surface the eligibility reason
    raise ReversalRejected(_REJECT_FROM_VERDICT[verdict.reason])


def apply_edits(sentence, edits):
    """Replay an edit trace over the input forms; returns the form list."""
    forms = [t.form for t in sentence.tokens]
    for edit in edits:
        if edit.before is None:
            forms.insert(edit.position, edit.after)
        elif edit.after is None:
            if forms[edit.position] != edit.before:
                raise ValueError(f"edit trace mismatch at {edit.position}")
            forms.pop(edit.position)
        else:
            if forms[edit.position] != edit.before:
                raise ValueError(f"edit trace mismatch at {edit.position}")
            forms[edit.position] = edit.after
    return forms
