import pytest

from incppm.drift_gen import ClaimProcessConfig, generate_baseline, generate_drift1
from incppm.event_log import Case, Event, EventLog


def make_case(cid, activities, static=None, dynamic=None, t0=0):
    dynamic = dynamic or [{} for _ in activities]
    events = tuple(Event(a, t0 + 1000 * i, d) for i, (a, d) in enumerate(zip(activities, dynamic)))
    return Case(cid, events, static or {})


def make_log(cases, static_schema=None, dynamic_schema=None):
    return EventLog(tuple(cases), static_schema or {}, dynamic_schema or {})


@pytest.fixture
def toy_log():
    """Two control-flow variants; the outcome is F("D") and depends on 'amount'."""
    cases = []
    for i in range(40):
        big = i % 2 == 0
        acts = ["A", "B", "D"] if big else ["A", "C", "E"]
        cases.append(make_case(f"c{i:03d}", acts, {"amount": 100 + i, "kind": "x" if big else "y"},
                               [{"who": f"r{j}"} for j in range(len(acts))], t0=i * 10_000))
    return make_log(cases, {"amount": "int", "kind": "string"}, {"who": "string"})


@pytest.fixture(scope="session")
def small_drift_log():
    return generate_drift1(ClaimProcessConfig(n_cases_baseline=60, n_cases_drift=60, seed=3))


@pytest.fixture(scope="session")
def small_baseline_log():
    return generate_baseline(ClaimProcessConfig(n_cases_baseline=50, n_cases_drift=50, seed=5))


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
