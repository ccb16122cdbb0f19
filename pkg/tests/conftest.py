import pytest

from growthlab import build_delta
from growthlab.flow import build_flow


@pytest.fixture(scope="session")
def delta_one():
    """Density for u(n) = n with a single level (23 humps)."""
    return build_delta("n", 1, 1e-10)


@pytest.fixture(scope="session")
def delta_two():
    """Two-level density for u(n) = n (625 humps)."""
    return build_delta("n", 2, 1e-10)


@pytest.fixture(scope="session")
def delta_h():
    """Degenerate zero-level density: the base bump itself."""
    return build_delta("n", 0, 1e-10)


@pytest.fixture(scope="session")
def flow_one(delta_one):
    return build_flow(delta_one)


@pytest.fixture(scope="session")
def flow_h(delta_h):
    return build_flow(delta_h)
