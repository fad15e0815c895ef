import os

import pytest
from hypothesis import HealthCheck, settings

from bellcorr.modfunc import Setting

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


TABLE1_SMALL = [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)]


@pytest.fixture(params=TABLE1_SMALL, ids=lambda t: "{}-{}-{}".format(*t))
def small_setting(request):
    return Setting.of(*request.param)


def fn(setting, rule):
    """Function over settings from a callable of the setting digits."""
    from bellcorr.modfunc import FunctionOverSettings
    return FunctionOverSettings.from_callable(setting, rule)


# ---- one summary line per acceptance criterion ------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = mark.args
    detail = ""
    if rep.failed:
        msg = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else str(rep.longrepr)
        detail = msg.splitlines()[0] if msg else ""
    status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    _ACCEPTANCE[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"criterion {number:>2}: {status}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
