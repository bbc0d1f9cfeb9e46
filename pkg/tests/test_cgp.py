import numpy as np
import pytest
from scipy import special, stats

from cgpkit import cgp, constraints as cons, mvn
from cgpkit.errors import InfeasibleConstraintsError, NumericalError, PDRepairError, SamplerBudgetError, ValidationError

from conftest import FAST_QMC, random_cgp
from oracles import ks_stat, ks_threshold, skew_normal_moments

SN_MEAN, SN_VAR, SN_MGF1 = skew_normal_moments()


def two_sided():
    return cgp.build([0.0], [[1.0]], cons.custom([[1.0], [-1.0]], [0.0, 0.0]))


def mgf_fd(d, h=1e-4):
    """Central-difference gradient and Hessian of the MGF at 0."""
    n = d.n
    E = np.eye(n)
    g = np.array([(d.mgf(h * E[i]) - d.mgf(-h * E[i])) / (2 * h) for i in range(n)])
    H = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            H[i, j] = (d.mgf(h * (E[i] + E[j])) - d.mgf(h * (E[i] - E[j]))
                       - d.mgf(h * (E[j] - E[i])) + d.mgf(-h * (E[i] + E[j]))) / (4 * h * h)
    return g, H


def test_build_unconstrained():
    K = np.array([[2.0, 0.5], [0.5, 1.0]])
    d = cgp.build([1.0, -1.0], K)
    assert d.Z.value == 1.0 and d.B.shape == (2, 0)
    assert np.array_equal(d.Sigma_r, K)
    assert np.array_equal(d.mean(), [1.0, -1.0])


def test_build_skew(skew):
    assert np.array_equal(skew.Sigma_w, [[2.0]])
    assert skew.normalizing_constant().value == 0.5


def test_build_two_sided():
    d = two_sided()
    assert np.array_equal(d.Sigma_w, [[2.0, -1.0], [-1.0, 2.0]])
    assert abs(d.Z.value - 1 / 6) < 1e-4


def test_build_errors():
    with pytest.raises(InfeasibleConstraintsError):
        cgp.build([0.0], [[1.0]], cons.bounds_constraint(lower=8.0, n=1, scale=50.0))
    with pytest.raises(PDRepairError):
        cgp.build([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValidationError):
        cgp.build([0.0, 0.0], np.eye(2), cons.bounds_constraint(lower=0.0, n=3))


def test_log_density_skew(skew):
    assert skew.log_density([0.0]) == pytest.approx(np.log(stats.norm.pdf(0.0)), abs=1e-12)
    assert skew.log_density([1.0]) == pytest.approx(np.log(2 * stats.norm.pdf(1) * stats.norm.cdf(1)), abs=1e-12)


def test_log_density_unconstrained():
    K = np.array([[1.0, 0.3], [0.3, 2.0]])
    d = cgp.build([0.5, 0.0], K)
    g = [0.1, -0.7]
    assert d.log_density(g) == mvn.mvn_logpdf(g, [0.5, 0.0], K)


def test_log_density_integrates_to_one_1d():
    d = cgp.build([0.3], [[1.5]], cons.custom([[2.0], [-1.0]], [0.2, 1.0]))
    s = np.sqrt(1.5)
    x = np.linspace(0.3 - 8 * s, 0.3 + 8 * s, 4001)
    f = np.exp([d.log_density([v]) for v in x])
    assert abs(np.trapezoid(f, x) - 1.0) < 1e-3


def test_log_density_integrates_to_one_2d():
    K = np.array([[1.0, 0.4], [0.4, 0.8]])
    d = cgp.build([0.0, 0.2], K, cons.stack(cons.monotone_constraint([0.0, 1.0], scale=2.0),
                                              cons.bounds_constraint(lower=-0.5, n=2)))
    xs = np.linspace(-8, 8, 321)
    ys = np.linspace(0.2 - 8 * np.sqrt(0.8), 0.2 + 8 * np.sqrt(0.8), 321)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    G = np.stack([X.ravel(), Y.ravel()], axis=1)
    quad = stats.multivariate_normal([0.0, 0.2], K).logpdf(G)
    quad += special.log_ndtr(G @ d.constraints.A.T + d.constraints.b).sum(axis=1)
    f = np.exp(quad - np.log(d.Z.value)).reshape(X.shape)
    assert abs(np.trapezoid(np.trapezoid(f, ys, axis=1), xs) - 1.0) < 1e-3


def test_mgf_examples(skew):
    assert skew.mgf([0.0]) == pytest.approx(1.0, abs=1e-12)
    assert skew.mgf([1.0]) == pytest.approx(SN_MGF1, abs=1e-3)
    K = np.array([[1.0, 0.3], [0.3, 2.0]])
    d = cgp.build([0.5, -0.2], K)
    t = np.array([0.4, -0.3])
    assert d.mgf(t) == pytest.approx(np.exp(t @ [0.5, -0.2] + 0.5 * t @ K @ t), rel=1e-14)


def test_mgf_overflow(skew):
    with pytest.raises(NumericalError, match="exceeds"):
        skew.mgf([100.0])
    with pytest.raises(ValidationError):
        skew.mgf([1.0, 2.0])


def test_mean_examples(skew):
    assert skew.mean() == pytest.approx([SN_MEAN], abs=1e-10)
    vac = cgp.build([0.7], [[1.0]], cons.custom([[1.0]], [1e6]))
    assert vac.mean() == pytest.approx([0.7], abs=1e-6)


def test_mean_moves_up_under_nonnegativity():
    for u in (-1.0, 0.0, 2.0):
        d = cgp.build([u], [[1.3]], cons.bounds_constraint(lower=0.0, n=1))
        assert d.mean()[0] > u


def test_covariance_examples(skew):
    C, se = skew.covariance()
    assert C[0, 0] == pytest.approx(SN_VAR, abs=1e-10)
    K = np.array([[1.0, 0.2], [0.2, 1.0]])
    C, se = cgp.build([0.0, 0.0], K).covariance()
    assert np.array_equal(C, K) and not se.any()


def test_rejection_sampler_rates(skew):
    d0 = cgp.build([0.0, 1.0], np.eye(2))
    r = d0.sample_rejection(500, 0)
    assert r.acceptance_rate == 1.0 and r.samples.shape == (500, 2)
    for d, z in ((skew, 0.5), (two_sided(), 1 / 6)):
        r = d.sample_rejection(20_000, 1)
        assert abs(r.acceptance_rate - z) <= 3 * np.sqrt(z * (1 - z) / r.attempts)


def test_rejection_budget():
    d = cgp.build([0.0], [[1.0]], cons.bounds_constraint(lower=3.0, n=1, scale=2.0))
    with pytest.raises(SamplerBudgetError):
        d.sample_rejection(10_000, 0, max_attempts=1000)


def test_sample_examples(skew):
    d0 = cgp.build([0.3, -0.2], [[1.0, 0.5], [0.5, 2.0]])
    X = d0.sample(50_000, 0)
    se = X.std(axis=0) / np.sqrt(len(X))
    assert np.all(np.abs(X.mean(axis=0) - d0.u) <= 4 * se)
    X = skew.sample(100_000, 3)
    assert abs(X.mean() - SN_MEAN) <= 4 * X.std() / np.sqrt(len(X))
    assert np.array_equal(skew.sample(100, 9), skew.sample(100, 9))


@pytest.mark.parametrize("case", range(5))
def test_sampler_against_rejection(case, random_suite):
    d = random_suite[case]
    n = 20_000
    X = d.sample(n, 10 + case)
    R = d.sample_rejection(n, 20 + case).samples
    for j in range(d.n):
        assert ks_stat(X[:, j], R[:, j]) < ks_threshold(n, n)
    C, se = d.covariance(40_000, case)
    Crej = np.cov(R, rowvar=False).reshape(d.n, d.n)
    se_rej = mvn.batch_se(lambda x: np.cov(x, rowvar=False).reshape(d.n, d.n), R)
    assert np.all(np.abs(C - Crej) <= 4 * np.hypot(se, se_rej) + 1e-12)
    m_se = R.std(axis=0) / np.sqrt(n)
    assert np.all(np.abs(d.mean() - R.mean(axis=0)) <= 4 * m_se)


@pytest.mark.parametrize("case", range(6))
def test_mgf_derivatives_match_moments(case):
    d = random_cgp(np.random.default_rng(300 + case), n_max=3, k_max=2)
    g, H = mgf_fd(d)
    m = d.mean()
    C, se = d.covariance(40_000, case)
    assert np.all(np.abs(g - m) <= 1e-4)
    assert np.all(np.abs(H - np.outer(m, m) - C) <= np.maximum(1e-3, 4 * se))


def test_mean_region_uses_shifted_truncation():
    # with u != 0 the truncation point must be -(A u + b); the naive -b is off
    d = cgp.build([1.5], [[1.0]], cons.bounds_constraint(lower=0.0, n=1))
    naive = d.u + d.B @ mvn.tmvn_mean(d.Sigma_w, -d.constraints.b)
    g, _ = mgf_fd(d)
    assert abs(g[0] - d.mean()[0]) < 1e-6
    assert abs(g[0] - naive[0]) > 1e-2


def test_soft_constraints_can_leave_mean_outside_the_set():
    d = cgp.build([-6.0], [[1.0]], cons.bounds_constraint(lower=0.0, n=1))
    x = np.linspace(-14, 4, 20001)
    f = stats.norm.pdf(x + 6.0) * stats.norm.cdf(x)
    exact = np.trapezoid(x * f, x) / np.trapezoid(f, x)
    assert d.mean()[0] == pytest.approx(exact, abs=1e-6)
    assert exact < -2.0


def test_mean_satisfies_constraints(random_suite):
    worst = [float(np.min(d.constraints.residual(d.mean()))) for d in random_suite]
    assert min(worst) >= -1e-8, f"A mean + b minima: {np.round(worst, 4).tolist()}"


def test_marginal_view():
    d = cgp.build([0.0, 0.5, 1.0], np.eye(3) + 0.3, cons.monotone_constraint([0, 1, 2]), qmc=FAST_QMC)
    m = d.marginal([2, 0])
    assert np.allclose(m.mean(), d.mean()[[2, 0]])
    assert m.mgf([0.1, 0.2]) == d.mgf([0.2, 0.0, 0.1])
    assert np.array_equal(m.sample(50, 1), d.sample(50, 1)[:, [2, 0]])
    C, _ = m.covariance(2000, 0)
    Cf, _ = d.covariance(2000, 0)
    assert np.allclose(C, Cf[np.ix_([2, 0], [2, 0])])
