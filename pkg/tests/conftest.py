import random

import pytest

from src.corpus import named_curves, named_points


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def points():
    return named_points()


@pytest.fixture
def curves():
    return named_curves()
