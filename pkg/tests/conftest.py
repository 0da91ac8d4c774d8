from __future__ import annotations

import os

import pytest

from jacpair.atlas import enumerate_multigraphs


def pytest_collection_modifyitems(config, items):
    if os.environ.get("JACPAIR_STRETCH") == "1":
        return
    skip = pytest.mark.skip(reason="set JACPAIR_STRETCH=1 to run")
    for item in items:
        if "stretch" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def small_multigraphs():
    """Connected multigraphs on <= 6 vertices with total multiplicity <= 9."""
    return list(enumerate_multigraphs(6, 9))
