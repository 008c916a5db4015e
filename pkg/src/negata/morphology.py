"""English verb inflection and auxiliary-negation machinery.

Bundled tables drive everything: a 22-row auxiliary table stating how each of
the three cues combines with each auxiliary (with ``-`` where no contraction
exists), an irregular-verb table, and a closed consonant-doubling list.
Open-class verbs fall through to suffix rules.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import lru_cache

from .cues import CueKind

VOWELS = set("aeiou")


class MorphologyError(KeyError):
    """Raised for forms outside the supported auxiliary inventory."""


def _data_text(name):
    return importlib.resources.files("negata.data").joinpath(name).read_text(
        encoding="utf-8")


def _data_rows(name):
    for line in _data_text(name).splitlines():
        line = line.strip("\n")
        if not line or line.lstrip().startswith("#"):
            continue
        yield line.split("\t")


@dataclass(frozen=True)
class AuxNegation:
    aux: str
    not_form: str
    nt_form: str | None
    never_form: str


@lru_cache(maxsize=1)
def aux_negation_table():
    rows = {}
    for aux, not_form, nt_form, never_form in _data_rows("aux_negation.tsv"):
        rows[aux] = AuxNegation(aux, not_form,
                                None if nt_form == "-" else nt_form,
                                never_form)
    return rows


@lru_cache(maxsize=1)
def irregular_verbs():
    return {lemma: (past, part, third)
            for lemma, past, part, third in _data_rows("irregular_verbs.tsv")}


@lru_cache(maxsize=1)
def cvc_doubling():
    return {line[0] for line in _data_rows("cvc_doubling.txt")}


@lru_cache(maxsize=1)
def _decontractions():
    """nt_form -> finite auxiliary, for every contractible table row plus
    "aren't", which contracts regularly despite having no table row."""
    out = {row.nt_form: aux for aux, row in aux_negation_table().items()
           if row.nt_form is not None}
    out["aren't"] = "are"
    return out


def past_tense(lemma):
    """Simple past of a lowercase base form."""
    irregular = irregular_verbs().get(lemma)
    if irregular:
        return irregular[0]
    if lemma.endswith("e"):
        return lemma + "d"
    if len(lemma) >= 2 and lemma.endswith("y") and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ied"
    if lemma in cvc_doubling():
        return lemma + lemma[-1] + "ed"
    return lemma + "ed"


def past_participle(lemma):
    irregular = irregular_verbs().get(lemma)
    if irregular:
        return irregular[1]
    return past_tense(lemma)


def third_person_singular(lemma):
    irregular = irregular_verbs().get(lemma)
    if irregular:
        return irregular[2]
    if lemma.endswith(("s", "sh", "ch", "x", "z", "o")):
        return lemma + "es"
    if len(lemma) >= 2 and lemma.endswith("y") and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ies"
    return lemma + "s"


def _match_case(template, result):
    if template[:1].isupper():
        return result[:1].upper() + result[1:]
    return result


def expand_contraction(form):
    """Restore the finite auxiliary hidden in an n't contraction.

    Keeps the finite form, not the bare lemma: wasn't -> was, won't -> will.
    Forms without an n't suffix pass through unchanged; unknown contractions
    raise MorphologyError so callers can reject the sentence.
    """
    lowered = form.lower().replace("’", "'")
    if not lowered.endswith("n't"):
        return form
    aux = _decontractions().get(lowered)
    if aux is None:
        raise MorphologyError(f"unknown contraction: {form!r}")
    return _match_case(form, aux)


def negate_aux(aux_form, cue):
    """Auxiliary-table cell for (auxiliary, cue); None when no n't form exists.

    The cell string encodes placement: the cue sits before or after the
    auxiliary exactly as written, and n't cells are fused single forms.
    """
    row = aux_negation_table().get(aux_form.lower())
    if row is None:
        raise MorphologyError(f"auxiliary not in table: {aux_form!r}")
    if cue is CueKind.NOT:
        return row.not_form
    if cue is CueKind.NEVER:
        return row.never_form
    if cue is CueKind.NT:
        return row.nt_form
    raise ValueError(f"not an addable cue: {cue}")


def contractible_auxiliaries():
    """Auxiliaries with an n't form (14 of the 22 table rows)."""
    return [aux for aux, row in aux_negation_table().items()
            if row.nt_form is not None]
