import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from cgpkit import cgp, constraints as cons, theory
from cgpkit.errors import ValidationError
from cgpkit.kernels import KernelSpec, gram_matrix

from conftest import FAST_QMC

SE = KernelSpec("se", 1.0, 1.0)


def prior_on(Z, c=None, spec=SE):
    Z = np.asarray(Z, dtype=float)
    return cgp.build(np.zeros(len(Z)), gram_matrix(spec, Z), c, qmc=FAST_QMC, grid=Z)


def test_rkhs_norm_examples():
    assert theory.rkhs_norm_sq(theory.RkhsElement([0.0, 2.0], [1.0, 0.0], SE)) == pytest.approx(1.0, abs=1e-9)
    assert theory.rkhs_norm_sq(theory.RkhsElement([0.0, 2.0], [0.0, 0.0], SE)) == 0.0
    e = theory.RkhsElement([0.0, 1.0], [1.0, 1.0], SE)
    assert theory.rkhs_norm_sq(e) == pytest.approx(2 + 2 * np.exp(-0.5), abs=1e-8)


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.floats(-5, 5))
def test_rkhs_norm_is_quadratic(alpha, c):
    Z = [0.0, 0.4, 1.1]
    a = theory.rkhs_norm_sq(theory.RkhsElement(Z, alpha, SE))
    b = theory.rkhs_norm_sq(theory.RkhsElement(Z, c * np.asarray(alpha), SE))
    assert b == pytest.approx(c * c * a, rel=1e-12, abs=1e-12)
    assert a >= 0


def test_ball_probability_examples():
    prior = prior_on([0.0, 0.5])
    assert theory.ball_probability(prior, 0.0, 1e6, 2000, 0)[0] == 1.0
    assert theory.ball_probability(prior, 0.0, 1e-6, 2000, 0)[0] == 0.0
    p, se = theory.ball_probability(cgp.build([0.0], [[1.0]]), 0.0, 1.0, 20_000, 1)
    assert abs(p - (2 * special.ndtr(1.0) - 1)) <= 3 * se
    with pytest.raises(ValidationError):
        theory.ball_probability(prior, 0.0, 0.0)


def test_ball_probability_monotone_in_radius():
    prior = prior_on([0.0, 0.5, 1.0], cons.bounds_constraint(lower=0.0, n=3))
    ps = [theory.ball_probability(prior, 0.2, eps, 5000, 3) for eps in (0.1, 0.3, 0.6, 1.0, 2.0)]
    for (p1, s1), (p2, s2) in zip(ps, ps[1:]):
        assert p2 >= p1 - 3 * np.hypot(s1, s2)


def test_shifted_ball_zero_shift():
    prior = prior_on([0.0, 0.5], cons.bounds_constraint(lower=0.0, n=2))
    r = theory.shifted_ball_check(prior, theory.RkhsElement([0.0, 0.5], [0.0, 0.0], SE), 0.5, 4000, 1)
    assert r.lhs == r.rhs and r.holds and r.norm_sq == 0.0


def test_shifted_ball_nonneg_prior():
    prior = prior_on([0.0], cons.bounds_constraint(lower=0.0, n=1))
    r = theory.shifted_ball_check(prior, theory.RkhsElement([0.0], [0.1], SE), 0.5, 20_000, 2)
    assert r.holds


@pytest.mark.parametrize("seed", range(5))
def test_shifted_ball_unconstrained(seed):
    rng = np.random.default_rng(seed)
    Z = np.sort(rng.uniform(0, 2, 4))
    prior = prior_on(Z)
    e = theory.RkhsElement(Z, 0.2 * rng.standard_normal(4), SE)
    assert theory.shifted_ball_check(prior, e, 0.7, 10_000, seed).holds


def test_shifted_ball_rejects_infeasible_center():
    Z = [0.0, 1.0]
    prior = prior_on(Z, cons.bounds_constraint(lower=0.0, grid=Z))
    e = theory.RkhsElement(Z, [-3.0, 0.0], SE)
    with pytest.raises(ValidationError, match=r"g\[0\]>=0.0"):
        theory.shifted_ball_check(prior, e, 0.5)


def test_shifted_ball_grid_mismatch():
    prior = prior_on([0.0, 1.0])
    with pytest.raises(ValidationError):
        theory.shifted_ball_check(prior, theory.RkhsElement([0.0, 2.0], [0.1, 0.1], SE), 0.5)
    with pytest.raises(ValidationError):
        theory.RkhsElement([0.0, 2.0], [0.1], SE)
