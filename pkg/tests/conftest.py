import pathlib

import pytest

from fraseo.pipeline import generate, load_default_resources

TESTS_DIR = pathlib.Path(__file__).parent


@pytest.fixture(scope="session")
def resources():
    return load_default_resources()


@pytest.fixture(scope="session")
def lexicon(resources):
    return resources.lexicon


@pytest.fixture(scope="session")
def grammar(resources):
    return resources.grammar


@pytest.fixture(scope="session")
def lm_model(resources):
    return resources.lm


@pytest.fixture(scope="session")
def data_dir():
    import fraseo

    return pathlib.Path(fraseo.__file__).parent / "data"


@pytest.fixture(scope="session")
def bundled_fixtures(data_dir):
    return data_dir / "fixtures"


@pytest.fixture(scope="session")
def test_fixtures():
    return TESTS_DIR / "fixtures"


@pytest.fixture(scope="session")
def gen(resources):
    def _gen(words, max_candidates=0):
        return generate(words, resources, max_candidates=max_candidates)

    return _gen
