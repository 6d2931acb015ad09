import random

import pytest

from spectrum_market.core import MarketParams

# One line per acceptance criterion, filled by tests/test_acceptance.py and
# echoed after the test summary (pytest's fd capture would otherwise hide
# them from the run log).
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def base_params():
    """The parameter set used throughout the published figures."""
    return MarketParams(alpha=0.5, n_fixed=50, n_mobile=50, r0=50, lambda_s=4, lambda_u=3)


def random_params(rng: random.Random) -> MarketParams:
    return MarketParams(
        alpha=rng.uniform(0.1, 0.9),
        n_fixed=rng.uniform(10, 100),
        n_mobile=rng.uniform(10, 100),
        r0=rng.uniform(5, 100),
        lambda_s=rng.uniform(1.01, 8.0),
        lambda_u=rng.uniform(0.05, 12.0),
    )
