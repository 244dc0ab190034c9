import pytest

from sl3whitehead.exactfield import FieldTower
from sl3whitehead.whitehead import load_instance

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def K():
    return FieldTower.from_squares([-1, 3, 5])


@pytest.fixture(scope="session")
def acceptance():
    return ACCEPTANCE


@pytest.fixture(scope="session")
def inst():
    return load_instance()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} - {detail}")
