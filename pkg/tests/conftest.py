import sys
from pathlib import Path

import pytest

from rexeval.ingest import read_canonical

FIXTURES = Path(__file__).parent / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))


def load_fixture(name):
    return read_canonical(FIXTURES / name)


@pytest.fixture
def mini_gold():
    return load_fixture("mini_gold.json")


@pytest.fixture
def mini_pred_argtype():
    return load_fixture("mini_pred_argtype.json")


@pytest.fixture
def conll_like():
    return load_fixture("conll_like_gold.json")


@pytest.fixture
def ace_like():
    return load_fixture("ace_like_gold.json")


@pytest.fixture
def fingerprint_pair():
    return load_fixture("fingerprint_gold.json"), load_fixture("fingerprint_pred.json")
