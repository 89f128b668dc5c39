import pathlib

import pytest

from theoryfusion.lattice import Theory
from theoryfusion.morphism import LanguageMorphism
from theoryfusion.semantics import clear_caches
from theoryfusion.syntax import Language, parse_expr
from theoryfusion.workspace import load_workspaces

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

# lines reported by the acceptance module, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _fresh_caches():
    clear_caches()
    yield


@pytest.fixture(scope="session")
def ws():
    return load_workspaces([FIXTURES / "span.iff", FIXTURES / "people.iff"])


@pytest.fixture
def LP():
    return Language(["s"], {"P": ("s",)}, name="LP")


@pytest.fixture
def TA(LP):
    return Theory(LP, [parse_expr("(forall ((x s)) (P x))")], name="TA")


@pytest.fixture
def TB(LP):
    return Theory(LP, [parse_expr("(exists ((x s)) (not (P x)))")], name="TB")


@pytest.fixture
def L1():
    return Language(["person", "org"], {"employs": ("org", "person"), "mgr": ("person",)}, name="L1")


@pytest.fixture
def L2():
    return Language(["agent"], {"works": ("agent", "agent"), "mgr": ("agent",)}, name="L2")


@pytest.fixture
def f(L1, L2):
    return LanguageMorphism(L1, L2, {"person": "agent", "org": "agent"},
                            {"employs": "works", "mgr": "mgr"}, name="f")
