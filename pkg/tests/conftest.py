import pytest

from vorwave.vorticity import make_spec

ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE[criterion] = (bool(passed), detail)


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def zero_spec():
    return make_spec({"kind": "zero"})


@pytest.fixture(scope="session")
def linear1():
    return make_spec({"kind": "linear", "b": 1.0})


@pytest.fixture(scope="session")
def const2():
    return make_spec({"kind": "constant", "b": 2.0})
