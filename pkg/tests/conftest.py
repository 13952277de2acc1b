from collections import defaultdict

import pytest

CRITERIA = {
    1: "Table 2 present column, deg6 from t0=0.051, runtime < 1 s",
    2: "Table 1 present column, deg6 from t0=0.051",
    3: "exact right-hand sides at the constraint starts",
    4: "moment identities and mass quadrature on a 50x50 state grid",
    5: "profile boundary conditions on the state grid",
    6: "mass law along trajectories and for the oracle",
    7: "oracle against the Ref10 columns, grid doubling, runtime < 10 s",
    8: "steady-state depth against an independent BVP solve",
    9: "qualitative behaviour: s non-increasing, a decreasing, monotone profiles",
}

_outcomes = defaultdict(list)
_info = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, info=False): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    n = mark.args[0]
    if mark.kwargs.get("info"):
        _info.append((n, item.name, rep.passed))
    else:
        _outcomes[n].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, text in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n}: NOT RUN  {text}")
            continue
        ok = all(p for _, p in results)
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}"
        failed = [name for name, p in results if not p]
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
    for n, name, passed in _info:
        tr.write_line(f"  info {n}: {'pass' if passed else 'fail'}  {name}")
