import numpy as np
import pytest
from hypothesis import given, strategies as st

from cgpkit.constraints import (bounds_constraint, convex_constraint, custom, empty,
                                monotone_constraint, stack, violated_rows, violation)
from cgpkit.errors import ValidationError


def rows(c):
    return c.A.tolist(), c.b.tolist()


def test_bounds_examples():
    assert rows(bounds_constraint(lower=0.0, n=1)) == ([[1.0]], [0.0])
    assert rows(bounds_constraint(0.0, 1.0, n=1)) == ([[1.0], [-1.0]], [0.0, 1.0])
    c = bounds_constraint(0.0, 1.0, n=2)
    assert rows(c) == ([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1])
    assert bounds_constraint(upper=2.0, n=3).k == 3


@pytest.mark.parametrize("kwargs", [
    dict(lower=1.0, upper=1.0, n=2), dict(lower=2.0, upper=1.0, n=2), dict(n=2), dict(lower=0.0),
    dict(lower=0.0, n=0), dict(lower=0.0, n=1, scale=0.0),
])
def test_bounds_errors(kwargs):
    with pytest.raises(ValidationError):
        bounds_constraint(**kwargs)


def test_monotone_examples():
    assert rows(monotone_constraint([0, 1, 2])) == ([[-1, 1, 0], [0, -1, 1]], [0, 0])
    assert rows(monotone_constraint([0, 1], "decreasing")) == ([[1, -1]], [0])
    c = monotone_constraint([0, 1])
    assert c.residual([0.0, -1.0]).tolist() == [-1.0]
    assert violation(c, [0.0, -1.0]) == 1.0


@pytest.mark.parametrize("grid", [[1.0, 0.0, 2.0], [0.0], [0.0, 0.0, 1.0]])
def test_monotone_rejects_bad_grid(grid):
    with pytest.raises(ValidationError):
        monotone_constraint(grid)


def test_convex_examples():
    c = convex_constraint([0, 1, 2])
    assert rows(c) == ([[1, -2, 1]], [0])
    assert violation(c, [0, 0, 0]) == 0.0
    assert c.residual([0, 1, 0]).tolist() == [-2.0]
    with pytest.raises(ValidationError):
        convex_constraint([0.0, 1.0, 3.0])
    with pytest.raises(ValidationError):
        convex_constraint([0.0, 1.0])


def test_stack_examples():
    lo = bounds_constraint(lower=0.0, n=1)
    s = stack(lo, empty(1))
    assert s.same_rows(lo) and s.labels == lo.labels
    up = custom([[-1.0]], [1.0])
    assert rows(stack(lo, up)) == ([[1.0], [-1.0]], [0.0, 1.0])
    with pytest.raises(ValidationError):
        stack(lo, empty(2))


def test_violation_examples():
    nonneg = bounds_constraint(lower=0.0, n=1)
    assert violation(nonneg, [0.5]) == 0.0
    assert violation(nonneg, [-0.3]) == pytest.approx(0.3)
    assert violation(bounds_constraint(0.0, 1.0, n=1), [1.2]) == pytest.approx(0.2)
    assert violated_rows(bounds_constraint(0.0, 1.0, n=1), [1.2]) == ["g[0]<=1.0"]
    assert violation(empty(3), [1, 2, 3]) == 0.0


def test_invalid_rows():
    with pytest.raises(ValidationError):
        custom([[0.0, 0.0]], [1.0])
    with pytest.raises(ValidationError):
        custom([[1.0, 0.0]], [1.0, 2.0])
    with pytest.raises(ValidationError):
        custom([[np.nan]], [0.0])


def test_immutable_arrays():
    c = bounds_constraint(lower=0.0, n=2)
    with pytest.raises(ValueError):
        c.A[0, 0] = 5.0


def test_rebuild_on_new_grid():
    g1 = np.linspace(0, 1, 4)
    g2 = np.linspace(0, 1, 7)
    c = stack(monotone_constraint(g1, scale=2.0), bounds_constraint(0.0, 1.0, grid=g1))
    r = c.rebuild(g2)
    expect = stack(monotone_constraint(g2, scale=2.0), bounds_constraint(0.0, 1.0, grid=g2))
    assert r.same_rows(expect)
    with pytest.raises(ValidationError):
        stack(c, custom(np.eye(4), np.zeros(4))).rebuild(g2)


def test_scale_multiplies_rows():
    g = [0.0, 0.5, 1.0]
    assert np.array_equal(convex_constraint(g, scale=3.0).A, 3.0 * convex_constraint(g).A)
    c = bounds_constraint(0.5, n=2, scale=4.0)
    assert np.allclose(c.residual([0.5, 0.75]), [0.0, 1.0])


grids = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=8, unique=True).map(sorted)


@given(grids)
def test_monotone_directions_are_negatives(g):
    if np.any(np.diff(g) <= 0):
        return
    assert np.array_equal(monotone_constraint(g, "increasing").A, -monotone_constraint(g, "decreasing").A)


@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 10**6))
def test_stack_associative(n, k1, k2, k3, seed):
    rng = np.random.default_rng(seed)

    def rand(k):
        return empty(n) if k == 0 else custom(rng.standard_normal((k, n)) + 0.01, rng.standard_normal(k))

    a, b, c = rand(k1), rand(k2), rand(k3)
    assert stack(stack(a, b), c).same_rows(stack(a, stack(b, c)))
    assert stack(a, empty(n)).same_rows(a) and stack(empty(n), a).same_rows(a)


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.floats(-1, 0.5), st.floats(0.6, 2))
def test_violation_characterizes_membership(g, lo, hi):
    grid = [0.0, 1.0, 2.0]
    c = stack(stack(bounds_constraint(lo, hi, grid=grid), monotone_constraint(grid)), convex_constraint(grid))
    member = np.all(c.A @ np.asarray(g) + c.b >= 0)
    assert (violation(c, g) == 0.0) == member
    assert violation(c, g) >= 0.0
