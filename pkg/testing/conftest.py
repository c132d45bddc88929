import os

import pytest

from src.linalg import ExactField
from src.presentation import load_algebra, require_validated
from src.words import compute_h_partition

CORPUS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")
CORPUS_FILES = ["a1tilde.alg", "r1.alg", "g23.alg", "lambda2.alg"]
DOMESTIC_FILES = ["a1tilde.alg", "r1.alg", "lambda2.alg"]

# beta and its inverse on the +1 side, alpha and its inverse on the -1 side
R1_PARTITION = {"b": 1, "b^-1": 1, "a": -1, "a^-1": -1}


def corpus_path(name):
    return os.path.join(CORPUS, name)


def load(name):
    return require_validated(load_algebra(corpus_path(name)))


@pytest.fixture
def QQ():
    return ExactField()


@pytest.fixture
def kronecker():
    return load("a1tilde.alg")


@pytest.fixture
def r1():
    return load("r1.alg")


@pytest.fixture
def g23():
    return load("g23.alg")


@pytest.fixture
def lambda2():
    return load("lambda2.alg")


@pytest.fixture
def r1_partition(r1):
    return compute_h_partition(r1, R1_PARTITION)


@pytest.fixture
def kronecker_partition(kronecker):
    return compute_h_partition(kronecker)


@pytest.fixture(params=CORPUS_FILES)
def corpus_algebra(request):
    return load(request.param)


@pytest.fixture(params=DOMESTIC_FILES)
def domestic_algebra(request):
    return load(request.param)
