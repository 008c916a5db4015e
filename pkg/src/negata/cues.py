"""Negation cue detection, main-verb identification, and eligibility filtering.

A sentence qualifies for polarity reversal only when it carries exactly one
reversible cue (not / n't / never) sitting on a verbal predicate and is not a
question. Everything else is rejected with a typed reason so corpus builds
can account for every skipped sentence.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from enum import Enum

REVERSIBLE_FORMS = ("not", "n't", "never")

VERBAL_UPOS = {"VERB", "AUX"}
AUX_RELS = {"aux", "aux:pass"}
PREDICATE_RELS = {"aux", "aux:pass", "cop"}


class CueKind(Enum):
    NOT = "not"
    NT = "nt"
    NEVER = "never"
    LEXICAL = "lexical"

    @property
    def reversible(self):
        return self is not CueKind.LEXICAL


class RejectReason(Enum):
    NO_CUE = "NoCue"
    MULTIPLE_CUES = "MultipleCues"
    CUE_NOT_ON_MAIN_VERB = "CueNotOnMainVerb"
    IS_QUESTION = "IsQuestion"
    UNSUPPORTED_CUE = "UnsupportedCue"
    NO_MAIN_VERB = "NoMainVerb"


@dataclass(frozen=True)
class NegationCue:
    kind: CueKind
    token_index: int
    attached_to: int | None = None
    span: int = 1
    surface: str = ""


@dataclass(frozen=True)
class EligibilityVerdict:
    eligible: bool
    reason: RejectReason | None = None

    @classmethod
    def ok(cls):
        return cls(True, None)

    @classmethod
    def rejected(cls, reason):
        return cls(False, reason)


DEFAULT_EXTENDED_CUES = (
    "no", "nobody", "nothing", "none", "nor", "neither", "without", "nowhere",
)


@dataclass(frozen=True)
class CueLexicon:
    """Reversible cue set plus a configurable extended inventory.

    Extended cues only mark sentences as non-affirmative; they are never
    reversed. Multi-word entries are stored as token tuples and matched as
    contiguous subsequences, longest match first.
    """

    extended_cues: tuple = tuple((c,) for c in DEFAULT_EXTENDED_CUES)

    @property
    def reversible_cues(self):
        return frozenset(REVERSIBLE_FORMS)

    @classmethod
    def from_lines(cls, lines):
        seen = []
        for line in lines:
            entry = line.split("#", 1)[0].strip().lower()
            if not entry:
                continue
            parts = tuple(entry.split())
            if parts and parts not in seen:
                seen.append(parts)
        return cls(extended_cues=tuple(seen))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as handle:
            return cls.from_lines(handle)

    @classmethod
    def default(cls):
        text = importlib.resources.files("negata.data").joinpath(
            "default_lexicon.txt").read_text(encoding="utf-8")
        return cls.from_lines(text.splitlines())


def normalize_form(form):
    return form.lower().replace("’", "'")


def _reversible_kind(token):
    """Cue kind of a single token, or None.

    Fused contractions ("didn't") count as n't cues carried by the auxiliary
    itself; split treebank tokens match on form or lemma.
    """
    form = normalize_form(token.form)
    if form == "not":
        return CueKind.NOT
    if form == "never":
        return CueKind.NEVER
    if form.endswith("n't"):
        return CueKind.NT
    lemma = normalize_form(token.lemma)
    if lemma == "never":
        return CueKind.NEVER
    if lemma == "not":
        return CueKind.NT if "n" in form and "'" in form else CueKind.NOT
    return None


def is_fused_cue(token):
    form = normalize_form(token.form)
    return form.endswith("n't") and form != "n't"


def detect_cues(sentence, lexicon):
    """All cues in surface order: reversible tokens plus extended-lexicon
    matches, non-overlapping with longest match winning."""
    tokens = sentence.tokens
    forms = [normalize_form(t.form) for t in tokens]
    # longest first so "a lack of" beats "a" at the same start position
    extended = sorted(lexicon.extended_cues, key=len, reverse=True)
    cues = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        kind = _reversible_kind(tok)
        if kind is not None:
            attached = tok.index if is_fused_cue(tok) else (tok.head or None)
            cues.append(NegationCue(kind=kind, token_index=tok.index,
                                    attached_to=attached, surface=tok.form))
            i += 1
            continue
        matched = None
        for entry in extended:
            if tuple(forms[i:i + len(entry)]) == entry:
                matched = entry
                break
        if matched is not None:
            cues.append(NegationCue(kind=CueKind.LEXICAL, token_index=tok.index,
                                    attached_to=None, span=len(matched),
                                    surface=" ".join(matched)))
            i += len(matched)
        else:
            i += 1
    return cues


def main_verb(sentence):
    """Index of the sentence's main verb, or None.

    The root wins when it is verbal. Otherwise (copular and other nonverbal
    roots) the best VERB/AUX among the root's direct dependents is used,
    preferring copulas and auxiliaries, leftmost first.
    """
    root = sentence.root()
    if root.upos in VERBAL_UPOS:
        return root.index
    deps = [t for t in sentence.children(root.index) if t.upos in VERBAL_UPOS]
    if not deps:
        return None
    preferred = [t for t in deps if t.deprel in PREDICATE_RELS]
    pool = preferred or deps
    return min(pool, key=lambda t: t.index).index


def is_question(sentence):
    for tok in reversed(sentence.tokens):
        if tok.form.strip():
            return tok.form == "?"
    return False


def clause_predicate(sentence, cue):
    """The verbal predicate a reversible cue modifies, or None.

    Accepts cues anywhere a verbal complex exists: on the clause verb itself,
    on one of its aux/cop dependents, or on a nonverbal predicate that carries
    a copula. Returns the token heading that clause.
    """
    if cue.attached_to is None:
        return None
    carrier = sentence.token_at(cue.attached_to)
    if carrier.upos in VERBAL_UPOS:
        if carrier.deprel in PREDICATE_RELS and carrier.head != 0:
            return sentence.token_at(carrier.head)
        return carrier
    # copular predicate: "is not big" parses the cue onto the adjective
    if any(t.deprel in PREDICATE_RELS for t in sentence.children(carrier.index)):
        return carrier
    return None


def eligibility(sentence, lexicon):
    """Reversal eligibility with the first failing reason in fixed order:
    NoMainVerb, NoCue/UnsupportedCue, MultipleCues, CueNotOnMainVerb,
    IsQuestion."""
    if main_verb(sentence) is None:
        return EligibilityVerdict.rejected(RejectReason.NO_MAIN_VERB)
    cues = detect_cues(sentence, lexicon)
    if not cues:
        return EligibilityVerdict.rejected(RejectReason.NO_CUE)
    if any(not c.kind.reversible for c in cues):
        return EligibilityVerdict.rejected(RejectReason.UNSUPPORTED_CUE)
    if len(cues) > 1:
        return EligibilityVerdict.rejected(RejectReason.MULTIPLE_CUES)
    if clause_predicate(sentence, cues[0]) is None:
        return EligibilityVerdict.rejected(RejectReason.CUE_NOT_ON_MAIN_VERB)
    if is_question(sentence):
        return EligibilityVerdict.rejected(RejectReason.IS_QUESTION)
    return EligibilityVerdict.ok()
