import pytest
from hypothesis import given
from hypothesis import strategies as st

from negata.cues import CueKind
from negata.morphology import (MorphologyError, aux_negation_table,
                               contractible_auxiliaries, expand_contraction,
                               irregular_verbs, negate_aux, past_participle,
                               past_tense, third_person_singular)


@pytest.mark.parametrize("lemma,expected", [
    ("go", "went"),
    ("walk", "walked"),
    ("try", "tried"),
    ("like", "liked"),
    ("stop", "stopped"),
    ("plan", "planned"),
    ("play", "played"),      # vowel + y keeps the y
    ("display", "displayed"),
    ("fix", "fixed"),        # not in the doubling list
])
def test_past_tense(lemma, expected):
    assert past_tense(lemma) == expected


@pytest.mark.parametrize("lemma,expected", [
    ("have", "has"),
    ("be", "is"),
    ("do", "does"),
    ("display", "displays"),
    ("watch", "watches"),
    ("pass", "passes"),
    ("carry", "carries"),
    ("go", "goes"),
    ("fix", "fixes"),
    ("buzz", "buzzes"),
])
def test_third_person_singular(lemma, expected):
    assert third_person_singular(lemma) == expected


def test_past_participle_irregular():
    assert past_participle("take") == "taken"
    assert past_participle("walk") == "walked"


@pytest.mark.parametrize("form,expected", [
    ("can't", "can"),
    ("won't", "will"),
    ("shan't", "shall"),
    ("didn't", "did"),
    ("wasn't", "was"),
    ("isn't", "is"),
    ("aren't", "are"),
    ("Doesn't", "Does"),
    ("Won't", "Will"),
    ("did", "did"),          # nothing to expand
])
def test_expand_contraction(form, expected):
    assert expand_contraction(form) == expected


def test_expand_contraction_unknown_raises():
    with pytest.raises(MorphologyError):
        expand_contraction("mayn't")


@pytest.mark.parametrize("aux,cue,expected", [
    ("was", CueKind.NT, "wasn't"),
    ("must", CueKind.NT, None),
    ("be", CueKind.NEVER, "never be"),
    ("be", CueKind.NOT, "not be"),
    ("having", CueKind.NOT, "not having"),
    ("'ve", CueKind.NEVER, "'ve never"),
    ("shall", CueKind.NT, "shan't"),
    ("can", CueKind.NOT, "can not"),
])
def test_negate_aux_cells(aux, cue, expected):
    assert negate_aux(aux, cue) == expected


def test_negate_aux_unknown_raises():
    with pytest.raises(MorphologyError):
        negate_aux("has", CueKind.NOT)


def test_table_shape():
    table = aux_negation_table()
    assert len(table) == 22
    missing_nt = {aux for aux, row in table.items() if row.nt_form is None}
    assert missing_nt == {"be", "being", "having", "'ve", "'ll", "must",
                          "may", "might"}
    assert len(contractible_auxiliaries()) == 14


def test_decontraction_round_trip_all_rows():
    table = aux_negation_table()
    for aux in contractible_auxiliaries():
        nt = table[aux].nt_form
        assert expand_contraction(nt) == aux
        assert negate_aux(aux, CueKind.NT) == nt


def test_not_and_never_always_present():
    for aux, row in aux_negation_table().items():
        assert "not" in row.not_form
        assert "never" in row.never_form


def test_irregular_table_size():
    assert len(irregular_verbs()) >= 180


@given(st.text(alphabet=st.characters(min_codepoint=ord("a"),
                                      max_codepoint=ord("z")),
               min_size=1, max_size=12))
def test_inflection_total_and_deterministic(lemma):
    assert past_tense(lemma) == past_tense(lemma)
    assert third_person_singular(lemma) == third_person_singular(lemma)
    assert past_tense(lemma)
    assert third_person_singular(lemma)
