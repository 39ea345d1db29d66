"""Shared fixtures and the per-criterion acceptance summary."""

from __future__ import annotations

from collections import defaultdict

import pytest

from ddeit.model import standard_params

_criteria: dict[int, list[tuple[str, str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _criteria[mark.args[0]].append((item.name, rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(o == "passed" for _, o, _ in results)
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}")
        for name, o, detail in results:
            tr.write_line(f"    {o:7s} {name}" + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def fig2_params():
    """Two-window stationary scenario: Omega_c = gamma_4, Omega_s = 0.3 gamma_4, delta_s = 9 MHz."""
    return standard_params(omega_c=18.0, omega_s=5.4, omega_p=0.9, delta_s=9.0, delta_c=0.0)


@pytest.fixture
def fig3_params():
    return standard_params(omega_c=18.0, omega_s=6.3, omega_p=0.9, delta_s=9.0, delta_c=0.0)
