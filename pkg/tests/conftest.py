from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from smtc_anomaly import catalog

GOLDEN = Path(__file__).parent / "golden"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@lru_cache(maxsize=None)
def built(ref: str):
    return catalog.get(ref)


@pytest.fixture(scope="session")
def cat():
    """Memoised catalog lookup: cat('so3_3/z4') -> (category, action)."""
    return built


CATEGORIES = catalog.names()
ACTIONS = [f"{n}/{a}" for n, e in catalog.CATALOG.items() for a in e.actions]
SUPER = [n for n, e in catalog.CATALOG.items() if e.super_modular]


#: one (criterion, passed, detail) triple per acceptance test, in run order
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
