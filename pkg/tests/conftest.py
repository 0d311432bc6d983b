from __future__ import annotations

import pytest

from persuade.corpus import load_corpus_entry


@pytest.fixture(scope="session")
def office():
    return load_corpus_entry("office-wellbeing")


@pytest.fixture(scope="session")
def office_graph(office):
    return office.graph


@pytest.fixture(scope="session")
def sports():
    return load_corpus_entry("sports-signup-example")


@pytest.fixture(scope="session")
def walking():
    return load_corpus_entry("walking-goals-fixture")


@pytest.fixture(scope="session")
def flu():
    return load_corpus_entry("flu-vaccine")
