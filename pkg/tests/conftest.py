import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import _certwatch  # noqa: E402
from zeno import _kernels  # noqa: E402
from zeno.engine import observe_certificates  # noqa: E402


@pytest.fixture(autouse=True)
def _watch_certificates():
    with observe_certificates(_certwatch.check):
        yield


@pytest.fixture(scope="session", autouse=True)
def _warm_kernel():
    # compile the numba kernel once so timed tests measure steady state
    _kernels.warm_up()


def pytest_configure(config):
    config.addinivalue_line("markers", "suite_end: run after every other test")


def pytest_collection_modifyitems(items):
    items.sort(key=lambda item: item.get_closest_marker("suite_end") is not None)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    for line in test_acceptance.RESULTS:
        terminalreporter.write_line(line)
    tally = ", ".join(f"{k}={v}" for k, v in sorted(_certwatch.TALLY.items()))
    terminalreporter.write_line(
        f"certificates re-verified by replay: {_certwatch.checked()} ({tally}); "
        f"forged: {len(_certwatch.FORGED)}")


def pytest_sessionfinish(session, exitstatus):
    if _certwatch.FORGED:
        session.exitstatus = 1
