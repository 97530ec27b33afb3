"""Shared snapshot fixtures; everything is deterministic, so session scope."""

import pytest

from hypschur import ProviderSpec, build_graph, empirical_params


def _build(kind, **params):
    return build_graph(ProviderSpec(kind, params))


@pytest.fixture(scope="session")
def line12():
    return _build("line", length=12)


@pytest.fixture(scope="session")
def line16():
    return _build("line", length=16)


@pytest.fixture(scope="session")
def line20():
    return _build("line", length=20)


@pytest.fixture(scope="session")
def line30():
    return _build("line", length=30)


@pytest.fixture(scope="session")
def line40():
    return _build("line", length=40)


@pytest.fixture(scope="session")
def cycle12():
    return _build("cycle", length=12)


@pytest.fixture(scope="session")
def tree24():
    return _build("regular_tree", branching=2, depth=4)


@pytest.fixture(scope="session")
def tree25():
    return _build("regular_tree", branching=2, depth=5)


@pytest.fixture(scope="session")
def tree34():
    return _build("regular_tree", branching=3, depth=4)


@pytest.fixture(scope="session")
def tree35():
    return _build("regular_tree", branching=3, depth=5)


@pytest.fixture(scope="session")
def f23():
    return _build("free_group", rank=2, radius=3)


@pytest.fixture(scope="session")
def f24():
    return _build("free_group", rank=2, radius=4)


@pytest.fixture(scope="session")
def f25():
    return _build("free_group", rank=2, radius=5)


@pytest.fixture(scope="session")
def params_for():
    """Memoized empirical parameter sets keyed by snapshot identity."""
    cache = {}

    def get(graph, n_max=5):
        key = (id(graph), n_max)
        if key not in cache:
            cache[key] = empirical_params(graph, n_max)
        return cache[key]

    return get
