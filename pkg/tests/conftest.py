import numpy as np
import pytest

from deep_ep import Network


def make_network(weights, roles, bias=None):
    """Network whose mask is exactly the nonzero pattern of ``weights``."""
    weights = np.asarray(weights, dtype=float)
    n = len(roles)
    bias = np.zeros(n) if bias is None else np.asarray(bias, dtype=float)
    return Network(weights, bias, weights != 0, bias != 0, roles)


def random_free_network(rng, n, scale=1.0, with_bias=False):
    """Network with no input neurons and a dense random weight matrix."""
    roles = "H" * (n - 1) + "O"
    mask = ~np.eye(n, dtype=bool)
    weights = np.where(mask, rng.uniform(-scale, scale, (n, n)), 0.0)
    bias = rng.uniform(-scale, scale, n) if with_bias else np.zeros(n)
    return Network(weights, bias, mask, np.full(n, with_bias), roles)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
