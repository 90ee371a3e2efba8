from pathlib import Path

import pytest

from metacompose import CommunityComposer, Request, load_registry

FIXTURES = Path(__file__).parent / "fixtures"


def _load(name):
    with open(FIXTURES / name, "rb") as fh:
        return load_registry(fh)


@pytest.fixture
def four_communities():
    return _load("four_communities.json")


@pytest.fixture
def supplier_loop():
    return _load("supplier_loop.json")


@pytest.fixture
def loop_request():
    return Request(frozenset({"a"}), frozenset({"x", "y", "z"}))


@pytest.fixture
def loop_composer(supplier_loop):
    return CommunityComposer().fit(supplier_loop)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
