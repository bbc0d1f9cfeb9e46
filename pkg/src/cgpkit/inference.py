"""Closed-form CGP posteriors and predictives.

Regression with Gaussian noise keeps the constraint set and updates the
Gaussian part conjugately.  Probit classification keeps the Gaussian part and
appends one sign constraint per observation, ``(2 y_i - 1) g_i >= 0``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import ndtr

from . import cgp, mvn
from .constraints import LinearConstraintSet, custom, stack
from .errors import ValidationError
from .kernels import as_points, cross_gram, gram_matrix, stabilized_cholesky


@dataclass(frozen=True)
class RegressionData:
    Z: np.ndarray
    y: np.ndarray
    noise_var: float

    def __post_init__(self):
        Z = as_points(self.Z)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if len(Z) != y.size:
            raise ValidationError(f"{len(Z)} inputs but {y.size} responses")
        if not (np.isfinite(self.noise_var) and self.noise_var > 0):
            raise ValidationError("noise variance must be positive")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class ClassificationData:
    Z: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        Z = as_points(self.Z)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if len(Z) != y.size:
            raise ValidationError(f"{len(Z)} inputs but {y.size} labels")
        if not np.all((y == 0) | (y == 1)):
            raise ValidationError("labels must be 0 or 1")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "y", y)

    @property
    def D(self):
        return np.diag(2.0 * self.y - 1.0)

    def sign_constraints(self, n_total=None):
        """Rows ``[D 0] g >= 0`` over ``n_total`` values (default: the data grid)."""
        n = self.y.size
        A = np.zeros((n, n_total or n))
        A[:, :n] = self.D
        labels = tuple(f"g[{i}]{'>=' if yi else '<='}0 (y={int(yi)})" for i, yi in enumerate(self.y))
        return custom(A, np.zeros(n), labels)


def _same_points(a, b):
    return a.shape == b.shape and np.array_equal(a, b)


def _noisy_solve(K, noise_var, rhs):
    L, _ = stabilized_cholesky(K + noise_var * np.eye(len(K)))
    return linalg.cho_solve((L, True), rhs)


def regression_posterior(prior, data):
    """Posterior CGP on the prior's grid: conjugate update, same constraints."""
    if prior.n != data.y.size:
        raise ValidationError(f"prior has {prior.n} grid values, data has {data.y.size}")
    if prior.grid is not None and not _same_points(as_points(prior.grid), data.Z):
        raise ValidationError("data inputs must equal the prior grid")
    K, u = prior.K, prior.u
    sol = _noisy_solve(K, data.noise_var, np.column_stack([data.y - u, K]))
    mu = u + K @ sol[:, 0]
    Kp = K - K @ sol[:, 1:]
    return cgp.build(mu, 0.5 * (Kp + Kp.T), prior.constraints, qmc=prior.qmc, grid=prior.grid)


def transfer_constraints(constraints, Z, Zstar):
    """Constraint set for predictions at ``Zstar``.

    Used unchanged when ``Zstar`` equals the training inputs; otherwise the
    same constraint types are rebuilt on ``Zstar``.  Custom rows only transfer
    when the grids coincide.
    """
    if _same_points(as_points(Z), as_points(Zstar)) and constraints.n == len(as_points(Z)):
        return constraints
    return constraints.rebuild(Zstar)


def regression_predictive(kernel, constraints, data, Zstar, *, qmc=None):
    """Predictive CGP for the latent function at ``Zstar``."""
    Zstar = as_points(Zstar)
    if len(Zstar) == 0:
        raise ValidationError("Zstar must be non-empty")
    K = cross_gram(kernel, data.Z, data.Z)
    Ks = cross_gram(kernel, data.Z, Zstar)
    u = np.full(data.y.size, kernel.mean)
    sol = _noisy_solve(K, data.noise_var, np.column_stack([data.y - u, Ks.T]))
    mu = kernel.mean + Ks @ sol[:, 0]
    Kss = cross_gram(kernel, Zstar, Zstar) - Ks @ sol[:, 1:]
    cstar = transfer_constraints(constraints, data.Z, Zstar)
    return cgp.build(mu, 0.5 * (Kss + Kss.T), cstar, qmc=qmc, grid=Zstar)


def classification_posterior(prior, data):
    """Posterior CGP: same ``u`` and ``K``, constraints ``[A; D] g + [b; 0] >= 0``."""
    if prior.n != data.y.size:
        raise ValidationError(f"prior has {prior.n} grid values, data has {data.y.size}")
    if prior.grid is not None and not _same_points(as_points(prior.grid), data.Z):
        raise ValidationError("data inputs must equal the prior grid")
    post_c = stack(prior.constraints, data.sign_constraints())
    return cgp.build(prior.u, prior.K, post_c, qmc=prior.qmc, grid=prior.grid)


def classification_predictive(kernel, constraints, data, Zstar, *, qmc=None):
    """Predictive law of the latent ``g(Zstar)`` under probit classification.

    Builds the CGP on the concatenated grid ``(Z, Zstar)`` with the prior rows
    ``[A 0] + b`` and data rows ``[D 0] >= 0`` and returns its marginal on
    ``Zstar``.  The closed-form parameters obtained by plugging the labels into
    the regression-style mean ``k(z*, z) K^-1 (y - u)`` are attached under
    ``literal`` for comparison.
    """
    Zstar = as_points(Zstar)
    if len(Zstar) == 0:
        raise ValidationError("Zstar must be non-empty")
    Z = data.Z
    n, m = len(Z), len(Zstar)
    if constraints.n != n:
        raise ValidationError(f"prior constraints act on {constraints.n} values, data has {n}")
    joint_grid = np.vstack([Z, Zstar])
    Kj = gram_matrix(kernel, joint_grid).K
    prior_rows = LinearConstraintSet(np.hstack([constraints.A, np.zeros((constraints.k, m))]),
                                     constraints.b, constraints.labels, None)
    joint_c = stack(prior_rows, data.sign_constraints(n + m))
    joint = cgp.build(np.full(n + m, kernel.mean), Kj, joint_c, qmc=qmc, grid=joint_grid)

    K = gram_matrix(kernel, Z).K
    Ks = cross_gram(kernel, Z, Zstar)
    L, _ = stabilized_cholesky(K)
    sol = linalg.cho_solve((L, True), np.column_stack([data.y - kernel.mean, Ks.T]))
    literal = {
        "mean": kernel.mean + Ks @ sol[:, 0],
        "cov": cross_gram(kernel, Zstar, Zstar) - Ks @ sol[:, 1:],
        "constraints": stack(constraints, data.sign_constraints()),
    }
    return joint.marginal(np.arange(n, n + m), literal)


def predictive_class_prob(predictive, mc_budget=20000, seed=0):
    """Monte-Carlo estimate of ``P(y* = 1) = E[Phi(g*)]`` per point, with SE."""
    G = predictive.sample(mc_budget, seed)
    P = ndtr(G)
    return P.mean(axis=0), mvn.batch_se(lambda x: x.mean(axis=0), P)
