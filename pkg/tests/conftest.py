from __future__ import annotations

import numpy as np
import pytest

from wlsurv.censoring import load_bundled


@pytest.fixture(scope="session")
def rats():
    return load_bundled("rats")


@pytest.fixture(scope="session")
def devices():
    from wlsurv.censoring import TypeII, coerce_scheme

    return coerce_scheme(load_bundled("devices"), TypeII(49))


@pytest.fixture
def rng():
    return np.random.default_rng(20141)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
