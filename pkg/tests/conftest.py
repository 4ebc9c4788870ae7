import re
import sys
from pathlib import Path

from hypothesis import strategies as st

from admrules.syntax import BOT, TOP, And, Imp, Not, Or, Var

sys.path.insert(0, str(Path(__file__).parent))

VARIABLES = ("p", "q", "r")


def formulas(variables=VARIABLES, max_leaves=12):
    leaves = st.one_of(st.sampled_from([Var(v) for v in variables]), st.sampled_from([BOT, TOP]))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Imp, sub, sub),
        ),
        max_leaves=max_leaves,
    )


_CRITERIA: dict[int, str] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[n] = ("PASS " if report.outcome == "passed" else "FAIL ") + m.group(2)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, name = _CRITERIA[n].split(" ", 1)
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {name}")
