import pytest

from zroupoid.algebra import FiniteAlgebra, counterexample_algebra
from zroupoid.claims import ModelStore


@pytest.fixture(scope="session")
def store():
    """Enumerated models, shared by every test that needs them."""
    return ModelStore(threads=1)


@pytest.fixture(scope="session")
def cex7():
    return counterexample_algebra()


@pytest.fixture
def semilattice():
    # a -> b := a v b on {0 < 1}
    return FiniteAlgebra(2, [[0, 1], [1, 1]], 0)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Collect one verdict line per acceptance criterion."""
    def _record(number: int, passed: bool, text: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_runtest_logreport(report):
    # a criterion whose test died before recording still gets a FAIL line
    if report.when != "call" or not report.failed or "test_criterion_" not in report.nodeid:
        return
    number = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
    prefix = f"criterion {number}: "
    ACCEPTANCE_LINES[:] = [x for x in ACCEPTANCE_LINES if not x.startswith(prefix + "PASS")]
    if not any(x.startswith(prefix) for x in ACCEPTANCE_LINES):
        reason = report.longrepr.reprcrash.message if hasattr(report.longrepr, "reprcrash") else "error"
        ACCEPTANCE_LINES.append(f"{prefix}FAIL  {reason.splitlines()[0]}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
