import pytest

from wallcross.lambda_ring import LambdaElement
from wallcross.quiver import QuiverPresentation
from wallcross.stability import WeakStability


@pytest.fixture
def ell():
    return LambdaElement.ell(1)


@pytest.fixture
def kronecker():
    return QuiverPresentation.kronecker()


@pytest.fixture
def one_vertex():
    return QuiverPresentation.one_vertex()


@pytest.fixture
def a2():
    return QuiverPresentation.a2()


@pytest.fixture
def trivial():
    return WeakStability.trivial()


@pytest.fixture
def slope_10():
    """Vertex 0 has slope 1, vertex 1 slope 0."""
    return WeakStability.slope((1, 0), (1, 1))


@pytest.fixture
def slope_01():
    return WeakStability.slope((0, 1), (1, 1))
