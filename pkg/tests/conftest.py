"""Shared models and calculators; the expensive ones are built once per session."""

import pytest

from kolab.invariants import InvariantCalculator
from kolab.ko import KOModel
from kolab.superalg import Poly, Shape, parse_poly


@pytest.fixture(scope="session")
def shape_n1():
    return Shape.contact(1, 3)


@pytest.fixture(scope="session")
def shape_n2():
    return Shape.contact(2, 3)


@pytest.fixture(scope="session")
def model_n1(shape_n1):
    return KOModel(shape_n1)


@pytest.fixture(scope="session")
def model_n2(shape_n2):
    return KOModel(shape_n2)


@pytest.fixture(scope="session")
def certified_n1(model_n1):
    return InvariantCalculator(model_n1, "certified")


@pytest.fixture(scope="session")
def certified_n2(model_n2):
    return InvariantCalculator(model_n2, "certified")


@pytest.fixture(scope="session")
def raw_n1(model_n1):
    return InvariantCalculator(model_n1, "raw")


@pytest.fixture
def P():
    """Parse a potential in a given shape: P(shape, "x1*x3")."""

    def parse(shape: Shape, text: str) -> Poly:
        return parse_poly(shape, text)

    return parse


@pytest.fixture(scope="session", params=[(1, 3), (1, 5), (2, 3), (2, 5)], ids=lambda np_: f"n{np_[0]}-p{np_[1]}")
def grid_model(request):
    """Models over the acceptance grid n ∈ {1, 2}, p ∈ {3, 5}."""
    n, p = request.param
    return KOModel(Shape.contact(n, p))
