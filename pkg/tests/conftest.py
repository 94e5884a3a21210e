from fractions import Fraction

from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

EXAMPLE_X = ("0", "1", "0.8", "3")
EXAMPLE_Y = ("0", "1", "-1", "0.5")


def small_fractions(lo=-20, hi=20, max_den=6):
    return st.builds(
        lambda num, den: Fraction(num, den),
        st.integers(lo * max_den, hi * max_den),
        st.integers(1, max_den),
    )


def outcome_lists(min_n=1, max_n=12):
    return st.lists(small_fractions(), min_size=min_n, max_size=max_n)


def levels(max_den=30):
    """Rationals in [0, 1)."""
    return st.integers(1, max_den).flatmap(
        lambda d: st.integers(0, d - 1).map(lambda k: Fraction(k, d))
    )


_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py::test_criterion_" in report.nodeid and report.failed:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
