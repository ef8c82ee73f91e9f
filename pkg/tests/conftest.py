"""Shared, session-scoped geometry fixtures (expensive to construct)."""

import pytest

from hiddensym import catalog, spin


@pytest.fixture(scope="session")
def tn():
    return catalog.taub_nut()


@pytest.fixture(scope="session")
def ps():
    return catalog.pseudo_sphere_fixture()


@pytest.fixture(scope="session")
def tn_ctx(tn):
    frame = spin.Frame(tn.frame, tuple(tn.manifold.signature))
    return spin.SpinContext(tn.manifold, frame)
