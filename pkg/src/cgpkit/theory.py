"""RKHS norms, sup-norm ball probabilities and the shifted-ball check."""

from dataclasses import dataclass

import numpy as np

from .constraints import violated_rows, violation
from .errors import ValidationError
from .kernels import as_points, gram_matrix


@dataclass(frozen=True)
class RkhsElement:
    """``g* = sum_i alpha_i k(., z_i)``."""

    Z: np.ndarray
    alpha: np.ndarray
    kernel: object

    def __post_init__(self):
        Z = as_points(self.Z)
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        if alpha.size != len(Z):
            raise ValidationError("need one coefficient per point")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "alpha", alpha)

    def gram(self):
        return gram_matrix(self.kernel, self.Z).K

    def values(self):
        """``g*`` evaluated at its own points."""
        return self.gram() @ self.alpha


def rkhs_norm_sq(e):
    """``alpha^T K alpha``."""
    return float(e.alpha @ e.gram() @ e.alpha)


def _ball_hits(samples, center, eps):
    return np.max(np.abs(samples - center), axis=1) <= eps


def ball_probability(prior, center, eps, mc_budget=20000, seed=0, samples=None):
    """P(max_i |g_i - center_i| <= eps) under ``prior``; returns ``(p, se)``."""
    if not eps > 0:
        raise ValidationError("radius must be positive")
    center = np.broadcast_to(np.asarray(center, dtype=float), (prior.n,))
    if samples is None:
        samples = prior.sample(mc_budget, seed)
    hits = _ball_hits(samples, center, eps)
    p = float(hits.mean())
    return p, float(np.sqrt(max(p * (1 - p), 1.0 / len(hits)) / len(hits)))


@dataclass(frozen=True)
class ShiftedBallReport:
    lhs: float
    rhs: float
    lhs_se: float
    rhs_se: float
    norm_sq: float
    holds: bool


def shifted_ball_check(prior, e, eps, mc_budget=20000, seed=0, n_se=4.0):
    """Compare ``P(||g - g*|| <= eps)`` with ``exp(-||g*||^2) P(||g|| <= eps)``.

    ``g*`` must live on the prior's grid and be eps-feasible, i.e. its largest
    constraint violation is at most ``eps``.  Both probabilities come from the
    same prior draws.
    """
    g_star = e.values()
    if g_star.size != prior.n:
        raise ValidationError(f"g* has {g_star.size} values, prior grid has {prior.n}")
    if prior.grid is not None and not np.array_equal(as_points(prior.grid), e.Z):
        raise ValidationError("g* must be represented on the prior's grid")
    if violation(prior.constraints, g_star) > eps:
        rows = violated_rows(prior.constraints, g_star, eps)
        raise ValidationError(f"g* is not eps-feasible; violated rows: {', '.join(rows)}")
    samples = prior.sample(mc_budget, seed)
    lhs, lhs_se = ball_probability(prior, g_star, eps, samples=samples)
    p0, p0_se = ball_probability(prior, 0.0, eps, samples=samples)
    nsq = rkhs_norm_sq(e)
    w = np.exp(-nsq)
    rhs, rhs_se = w * p0, w * p0_se
    holds = lhs >= rhs - n_se * np.hypot(lhs_se, rhs_se)
    return ShiftedBallReport(lhs, rhs, lhs_se, rhs_se, nsq, bool(holds))
