import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cgpkit import cgp, constraints, mvn

settings.register_profile("cgpkit", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("cgpkit")

FAST_QMC = mvn.QmcOptions(n_points=2048, n_shifts=10)

# acceptance outcomes, echoed in the terminal summary
ACCEPTANCE = {}


def record(criterion, ok, detail=""):
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_psd(rng, n, scale=1.0):
    M = rng.standard_normal((n, n))
    return scale * (M @ M.T / n + 0.2 * np.eye(n))


def random_cgp(rng, n_max=4, k_max=3, z_min=0.05, qmc=FAST_QMC):
    """A random CGP with ``n <= n_max``, ``1 <= k <= k_max`` and ``Z >= z_min``."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        k = int(rng.integers(1, k_max + 1))
        K = random_psd(rng, n)
        u = 0.5 * rng.standard_normal(n)
        A = rng.standard_normal((k, n))
        b = 0.5 * rng.standard_normal(k)
        d = cgp.build(u, K, constraints.custom(A, b), qmc=qmc)
        if d.Z.value >= z_min:
            return d


@pytest.fixture
def skew():
    """1-d skew-normal case: u = 0, K = 1, A = 1, b = 0."""
    return cgp.build([0.0], [[1.0]], constraints.bounds_constraint(lower=0.0, n=1))


@pytest.fixture(scope="session")
def random_suite():
    rng = np.random.default_rng(2024)
    return [random_cgp(rng) for _ in range(20)]
