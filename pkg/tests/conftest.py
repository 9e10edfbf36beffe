import os

import pytest

from ofdiag.augment import build_augmented
from ofdiag.fixtures import fixture_path, load_fixture
from ofdiag.model import load_model
from ofdiag.verifier import build_verification_structure

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def g1():
    return load_fixture("g1")


@pytest.fixture
def g2():
    return load_fixture("g2like")


@pytest.fixture
def g1_path():
    return str(fixture_path("g1"))


@pytest.fixture
def g2_path():
    return str(fixture_path("g2like"))


@pytest.fixture
def aug1(g1):
    return build_augmented(g1)


@pytest.fixture
def ver1(aug1):
    return build_verification_structure(aug1)


@pytest.fixture
def two_rounds():
    return load_model(os.path.join(DATA, "two_rounds.json"))
