import os

import pytest

from negata.conllu import parse_conllu_file
from negata.cues import CueLexicon

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture(scope="session")
def lexicon():
    return CueLexicon.default()


@pytest.fixture(scope="session")
def golden_sentences():
    """Golden fixture sentences keyed by their surface text."""
    return {s.raw_text: s for s in parse_conllu_file(fixture_path("golden.conllu"))}


@pytest.fixture(scope="session")
def build20_sentences():
    return list(parse_conllu_file(fixture_path("build20.conllu")))
