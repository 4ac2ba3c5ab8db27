from pathlib import Path

import pytest

from crowdquery.kb import load_kb
from crowdquery.rdf import load_ntriples
from crowdquery.sparql import load_query

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def movies():
    return load_ntriples(FIXTURES / "figure2.nt")


@pytest.fixture()
def movies_ext():
    return load_ntriples(FIXTURES / "figure2_ext.nt")


@pytest.fixture()
def movies_query():
    return load_query(FIXTURES / "movies.rq")


@pytest.fixture()
def movies_kb():
    return load_kb(FIXTURES / "movies_kb.csv")


@pytest.fixture()
def capitals():
    return load_ntriples(FIXTURES / "capitals.nt")


@pytest.fixture()
def capitals_query():
    return load_query(FIXTURES / "capitals.rq")
