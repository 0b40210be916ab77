import pytest

from quadbackstep import PlantParams, derive_coeffs

ACCEPTANCE = {}


@pytest.fixture
def plant():
    return PlantParams()


@pytest.fixture
def coeffs(plant):
    return derive_coeffs(plant)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")
