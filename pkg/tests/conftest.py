import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from pirefine.logics import builtin_institution, builtin_system  # noqa: E402
from pirefine.translation import cpc_to_ba  # noqa: E402


@pytest.fixture(scope="session")
def CPC():
    return builtin_institution("cpc")


@pytest.fixture(scope="session")
def BA():
    return builtin_institution("ba-eq")


@pytest.fixture(scope="session")
def K():
    return builtin_institution("modal-k")


@pytest.fixture(scope="session")
def S5G():
    return builtin_institution("modal-s5g")


@pytest.fixture(scope="session")
def cpc2ba(CPC, BA):
    return cpc_to_ba(CPC, BA)


@pytest.fixture(scope="session")
def systems():
    return {n: builtin_system(n) for n in ("cpc", "ba-eq", "modal-k", "modal-s5g")}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
