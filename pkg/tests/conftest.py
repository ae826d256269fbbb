import numpy as np
import pytest

from regfield.factorization import is_minimum_phase


def random_positive_band(rng, max_N=8, max_sum=0.45):
    """Random b with sum |b_j| < max_sum (hence a positive symbol) and b_N != 0."""
    N = int(rng.integers(1, max_N + 1))
    w = rng.dirichlet(np.ones(N))
    total = rng.uniform(0.01, max_sum)
    b = total * w * rng.choice([-1.0, 1.0], size=N)
    if b[-1] == 0:
        b[-1] = 1e-3
    return b


def random_min_phase_beta(rng, max_N=8):
    while True:
        N = int(rng.integers(1, max_N + 1))
        beta = rng.uniform(-1.0, 1.0, N)
        if is_minimum_phase(beta):
            return beta


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# Exact two-sided coefficients of beta = (0.3, 0.2): ((0.3 - 0.06)/1.13, 0.2/1.13)
B_32 = (0.21238938053097348, 0.1769911504424779)
# Six-digit literal used in worked examples
B_32_ROUNDED = (0.212389, 0.176991)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in sorted(RESULTS.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
