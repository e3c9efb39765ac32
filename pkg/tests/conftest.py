import pytest

from fstruct import arith, catalog


@pytest.fixture(autouse=True)
def exact_mode():
    with arith.arithmetic(arith.EXACT, arith.DEFAULT_TOL):
        yield


@pytest.fixture(scope="session")
def examples():
    with arith.arithmetic(arith.EXACT):
        names = ["u2", "u3", "h3", "h5", "h3t3", "t3", "product:h3:4"]
        return {name: catalog.example(name) for name in names}
