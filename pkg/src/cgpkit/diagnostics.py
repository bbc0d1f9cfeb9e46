"""Calibration loss, integrated quadratic CDF loss and PIT recalibration.

All integrals over the response interval use the trapezoid rule on a fixed
node grid, with the cell that contains the observation split at the
observation so the indicator's jump is integrated exactly.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import ValidationError

DEFAULT_QUAD = 512


@dataclass(frozen=True, eq=False)
class PredictiveCdfSet:
    """Predictive CDFs paired with observations on ``[t_lo, t_hi]``.

    ``cdf(t)`` takes a 1-d array of thresholds and returns an ``(N, len(t))``
    array whose row ``i`` is ``F(t | x_i)``.
    """

    cdf: Callable[[np.ndarray], np.ndarray]
    y: np.ndarray
    t_lo: float
    t_hi: float

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if y.size == 0:
            raise ValidationError("need at least one observation")
        if not self.t_lo < self.t_hi:
            raise ValidationError("t_lo must be < t_hi")
        if np.any(y < self.t_lo) or np.any(y > self.t_hi):
            raise ValidationError("observations must lie in [t_lo, t_hi]")
        object.__setattr__(self, "y", y)

    @property
    def N(self):
        return self.y.size

    @property
    def B(self):
        return self.t_hi - self.t_lo

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        F = np.asarray(self.cdf(t), dtype=float)
        return np.broadcast_to(F, (self.N, t.size))

    def at_obs(self, side="right"):
        """``F_i(y_i)`` (``side="left"`` gives the left limit ``F_i(y_i-)``)."""
        t = self.y if side == "right" else np.nextafter(self.y, -np.inf)
        return np.diagonal(self(t)).copy()

    def check(self, tol=1e-6, n_check=257):
        t = np.linspace(self.t_lo, self.t_hi, n_check)
        F = self(t)
        if np.any(np.diff(F, axis=1) < -tol):
            raise ValidationError("predictive CDFs must be non-decreasing")
        if np.any(np.abs(F[:, 0]) > tol) or np.any(np.abs(F[:, -1] - 1) > tol):
            raise ValidationError("predictive CDFs must run from 0 to 1 on [t_lo, t_hi]")
        return self

    def compose(self, G):
        """The recalibrated set ``G o F``."""
        return PredictiveCdfSet(lambda t: G(self(t)), self.y, self.t_lo, self.t_hi)

    def pit(self):
        return self.at_obs("right")

    def subset(self, idx):
        idx = np.asarray(idx)
        return PredictiveCdfSet(lambda t: self(t)[idx], self.y[idx], self.t_lo, self.t_hi)


def default_interval(y):
    y = np.asarray(y, dtype=float)
    sd = float(np.std(y, ddof=1)) if y.size > 1 else 1.0
    sd = sd if sd > 0 else 1.0
    return float(y.min() - 3 * sd), float(y.max() + 3 * sd)


def gaussian_set(mu, sigma, y, t_lo=None, t_hi=None):
    """Gaussian forecasts truncated and renormalized to the interval.

    ``sigma = 0`` gives a step CDF at ``mu``.
    """
    mu = np.asarray(mu, dtype=float).reshape(-1)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), mu.shape).copy()
    y = np.asarray(y, dtype=float).reshape(-1)
    if np.any(sigma < 0):
        raise ValidationError("forecast standard deviations must be >= 0")
    if t_lo is None or t_hi is None:
        lo, hi = default_interval(y)
        t_lo = lo if t_lo is None else t_lo
        t_hi = hi if t_hi is None else t_hi
    step = sigma == 0
    s = np.where(step, 1.0, sigma)[:, None]
    m = mu[:, None]
    f_lo = special.ndtr((t_lo - m) / s)
    f_hi = special.ndtr((t_hi - m) / s)

    def cdf(t):
        t = t[None, :]
        F = (special.ndtr((t - m) / s) - f_lo) / np.maximum(f_hi - f_lo, 1e-300)
        F = np.clip(F, 0.0, 1.0)
        return np.where(step[:, None], (t >= m).astype(float), F)

    return PredictiveCdfSet(cdf, y, t_lo, t_hi)


def step_set(y, t_lo, t_hi, at=None):
    """Step CDFs ``1[t >= at_i]`` (default: at the observations)."""
    y = np.asarray(y, dtype=float).reshape(-1)
    at = y if at is None else np.asarray(at, dtype=float).reshape(-1)
    return PredictiveCdfSet(lambda t: (t[None, :] >= at[:, None]).astype(float), y, t_lo, t_hi)


def _split_trapezoid(s, quad_points, left_fn, right_fn):
    """Mean over observations of ``int_lo^y left(F) dt + int_y^hi right(F) dt``."""
    if quad_points < 2:
        raise ValidationError("need at least 2 quadrature nodes")
    t = np.linspace(s.t_lo, s.t_hi, int(quad_points))
    F = s(t)
    y = s.y[:, None]
    Fy_left = s.at_obs("left")[:, None]
    Fy = s.at_obs("right")[:, None]
    a, c = t[:-1][None, :], t[1:][None, :]
    fa, fc = F[:, :-1], F[:, 1:]
    width = c - a
    left_len = np.clip(y - a, 0.0, width)
    right_len = width - left_len
    inside = (y > a) & (y <= c)
    left_end = np.where(inside, Fy_left, fc)
    right_start = np.where((y >= a) & (y < c), Fy, fa)
    left = 0.5 * left_len * (left_fn(fa) + left_fn(left_end))
    right = 0.5 * right_len * (right_fn(right_start) + right_fn(fc))
    return float(np.mean(np.sum(left + right, axis=1)))


def calibration_loss(s, quad_points=DEFAULT_QUAD):
    """``int (1/N) sum_i |1(y_i < t) - F(t|x_i)| dt`` over ``[t_lo, t_hi]``."""
    return _split_trapezoid(s, quad_points, np.abs, lambda f: np.abs(1.0 - f))


def empirical_loss(s, quad_points=DEFAULT_QUAD):
    """Mean integrated quadratic CDF loss (CRPS on the bounded interval).

    Bounded by ``B = t_hi - t_lo``.
    """
    return _split_trapezoid(s, quad_points, np.square, lambda f: np.square(1.0 - f))


def recalibrate_pit(train):
    """Monotone map ``G`` on [0, 1] from the empirical CDF of PIT values.

    Knots at the sorted PIT values with heights ``i / N``, linear in between,
    pinned at ``G(0) = 0`` and ``G(1) = 1``.
    """
    if train.N < 2:
        raise ValidationError("recalibration needs at least 2 observations")
    p = np.clip(train.pit(), 0.0, 1.0)
    xs, counts = np.unique(p, return_counts=True)
    heights = np.cumsum(counts) / p.size
    interior = (xs > 0.0) & (xs < 1.0)
    xs = np.concatenate([[0.0], xs[interior], [1.0]])
    heights = np.concatenate([[0.0], heights[interior], [1.0]])

    def G(u):
        return np.interp(u, xs, heights)

    G.knots = (xs, heights)
    return G


@dataclass(frozen=True)
class CalibrationReport:
    calibration_loss: float
    loss_F: float
    loss_F0: float
    B: float
    eps_n: float

    @property
    def lhs(self):
        return self.loss_F - self.loss_F0

    @property
    def rhs(self):
        return 2.0 * self.B * self.calibration_loss + (self.B + 1.0) * self.eps_n

    @property
    def slack(self):
        return self.rhs - self.lhs

    def as_lines(self):
        fields = {
            "calibration_loss": self.calibration_loss,
            "loss_F": self.loss_F,
            "loss_F0": self.loss_F0,
            "B": self.B,
            "eps_n": self.eps_n,
            "slack": self.slack,
        }
        return [f"{k} = {v!r}" for k, v in fields.items()]


def excess_risk_report(s0, s, quad_points=DEFAULT_QUAD):
    """Both losses, the calibration loss of ``s`` and the excess-risk slack.

    ``eps_n`` is taken to be the achieved calibration loss of ``s``; the
    inequality checked is
    ``loss_F - loss_F0 <= 2 B calibration_loss + (B + 1) eps_n``.
    """
    if s0.N != s.N or not np.array_equal(s0.y, s.y):
        raise ValidationError("both forecast sets must share the same observations")
    if (s0.t_lo, s0.t_hi) != (s.t_lo, s.t_hi):
        raise ValidationError("both forecast sets must share the response interval")
    cal = calibration_loss(s, quad_points)
    return CalibrationReport(
        calibration_loss=cal,
        loss_F=empirical_loss(s, quad_points),
        loss_F0=empirical_loss(s0, quad_points),
        B=s.B,
        eps_n=cal,
    )
