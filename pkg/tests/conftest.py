import pytest

from hypersem.space import StateSpace


@pytest.fixture
def x8():
    return StateSpace((("x", 0, 7),))


@pytest.fixture
def bits():
    # hi declared first, so hi is the high-order digit: state "10" has id 2
    return StateSpace((("hi", 0, 1), ("lo", 0, 1)))


@pytest.fixture
def s3():
    return StateSpace((("s", 0, 2),))


@pytest.fixture
def s4():
    return StateSpace((("s", 0, 3),))
