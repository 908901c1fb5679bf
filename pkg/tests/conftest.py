import re
import sys

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "astower",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("astower")

_config = None


def pytest_configure(config):
    global _config
    _config = config


def pytest_runtest_logreport(report):
    # one visible line per acceptance criterion, capture or not
    if report.when != "call" or _config is None:
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    terminal = _config.pluginmanager.get_plugin("terminalreporter")
    if terminal is None:
        return
    num = int(m.group(1))
    mod = sys.modules.get("test_acceptance")
    label = getattr(mod, "CRITERIA", {}).get(num, "") if mod else ""
    word = "PASS" if report.passed else "FAIL"
    terminal.write_line(f"[{word}] criterion {num:02d}: {label}")


@pytest.fixture(scope="session")
def F3():
    from astower.ff import make_field

    return make_field(3, 1)


@pytest.fixture(scope="session")
def F27():
    from astower.ff import make_field

    return make_field(3, 3)


@pytest.fixture(scope="session")
def F125():
    from astower.ff import make_field

    return make_field(5, 3)
