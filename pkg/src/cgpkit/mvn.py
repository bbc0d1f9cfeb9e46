"""Multivariate normal density, orthant probabilities and truncated moments.

The CDF for ``k >= 2`` uses Genz's separation-of-variables transform with
variable prioritization, integrated over a randomly shifted Kronecker lattice
(Richtmyer generators ``frac(sqrt(prime))``) under the tent periodization.
The spread of the per-shift means gives the error estimate.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from . import _accel
from .errors import NumericalError, SamplerBudgetError, ValidationError

MAX_DIM = 100
DEFAULT_SEED = 20240917
_LOG_2PI = np.log(2.0 * np.pi)
_PRIMES = np.array([p for p in range(2, 800) if all(p % q for q in range(2, int(p**0.5) + 1))])


class CdfResult(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class QmcOptions:
    """Lattice size, number of random shifts and the shift seed."""

    n_points: int = 8192
    n_shifts: int = 25
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_points < 1 or self.n_shifts < 2:
            raise ValidationError("need n_points >= 1 and n_shifts >= 2")


DEFAULT_QMC = QmcOptions()


def _as_cov(cov, k=None):
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValidationError("covariance must be a square matrix")
    if k is not None and cov.shape[0] != k:
        raise ValidationError(f"dimension mismatch: covariance is {cov.shape[0]}x{cov.shape[0]}, vector has {k}")
    if not np.allclose(cov, cov.T, rtol=1e-10, atol=1e-12):
        raise ValidationError("covariance must be symmetric")
    return 0.5 * (cov + cov.T)


def norm_logcdf(x):
    """log Phi(x), accurate far into the lower tail."""
    return special.log_ndtr(x)


def mvn_logpdf(x, mean, cov):
    """log density of N(mean, cov) at ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    mean = np.broadcast_to(np.asarray(mean, dtype=float), x.shape)
    cov = _as_cov(cov, x.size)
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular or indefinite covariance") from exc
    z = np.linalg.solve(L, x - mean) if x.size > 1 else (x - mean) / L[0, 0]
    return float(-0.5 * (x.size * _LOG_2PI + z @ z) - np.sum(np.log(np.diag(L))))


def _prioritized_cholesky(cov, upper):
    """Cholesky factor with Genz-Bretz variable ordering for upper limits.

    At each step the remaining variable with the smallest conditional
    probability ``Phi(limit)`` goes next; its conditional expectation given the
    truncation stands in for the yet-unsampled value.
    """
    k = len(upper)
    S = cov.copy()
    b = upper.copy()
    L = np.zeros((k, k))
    y = np.zeros(k)
    perm = np.arange(k)
    tol = 1e-13 * max(1.0, float(np.max(np.diag(S))))
    for i in range(k):
        rest = np.arange(i, k)
        var = np.diag(S)[rest] - np.sum(L[rest, :i] ** 2, axis=1)
        if np.any(var <= tol):
            raise NumericalError("covariance is singular or not positive semi-definite")
        sd = np.sqrt(var)
        lim = (b[rest] - L[rest, :i] @ y[:i]) / sd
        j = i + int(np.argmin(special.ndtr(lim)))
        if j != i:
            S[[i, j]] = S[[j, i]]
            S[:, [i, j]] = S[:, [j, i]]
            b[[i, j]] = b[[j, i]]
            L[[i, j], :i] = L[[j, i], :i]
            perm[[i, j]] = perm[[j, i]]
        c = lim[j - i]
        L[i, i] = sd[j - i]
        below = np.arange(i + 1, k)
        L[below, i] = (S[below, i] - L[below, :i] @ L[i, :i]) / L[i, i]
        # E[Z | Z < c] for standard normal Z
        if np.isinf(c):
            y[i] = 0.0
        else:
            y[i] = -np.exp(-0.5 * c * c - 0.5 * _LOG_2PI - special.log_ndtr(c))
    return L, b, perm


def _shifts(dim, qmc):
    rng = np.random.default_rng(np.random.SeedSequence([qmc.seed, dim]))
    return rng.random((qmc.n_shifts, dim))


def mvn_cdf(upper, cov, mean=None, *, qmc=None):
    """P(X <= upper) for X ~ N(mean, cov).

    ``k = 1`` is exact.  For ``k >= 2`` the value is the average over
    ``qmc.n_shifts`` randomly shifted lattices and ``error`` is three standard
    errors of that average.  Coordinates with ``upper = +inf`` are marginalized
    out exactly before integration.

    Returns
    -------
    CdfResult
        ``(value, error)``.
    """
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if upper.ndim != 1:
        raise ValidationError("upper must be a vector")
    k = upper.size
    cov = _as_cov(cov, k)
    if mean is not None:
        upper = upper - np.broadcast_to(np.asarray(mean, dtype=float), upper.shape)
    if k > MAX_DIM:
        raise ValidationError(f"dimension {k} exceeds the limit of {MAX_DIM}")
    if np.any(np.isnan(upper)):
        raise ValidationError("upper limits contain NaN")
    if np.any(np.diag(cov) < 0):
        raise ValidationError("covariance has negative variances")
    if np.any(upper == -np.inf):
        return CdfResult(0.0, 0.0)
    keep = np.isfinite(upper)
    if not np.any(keep):
        return CdfResult(1.0, 0.0)
    upper = upper[keep]
    cov = cov[np.ix_(keep, keep)]
    k = upper.size
    if np.linalg.eigvalsh(cov)[0] < -1e-10 * max(1.0, float(np.max(np.diag(cov)))):
        raise ValidationError("covariance is not positive semi-definite")
    if k == 1:
        if cov[0, 0] <= 0:
            return CdfResult(float(upper[0] >= 0), 0.0)
        return CdfResult(float(special.ndtr(upper[0] / np.sqrt(cov[0, 0]))), 0.0)
    qmc = qmc or DEFAULT_QMC
    L, b, _ = _prioritized_cholesky(cov, upper)
    alpha = np.sqrt(_PRIMES[: k - 1].astype(float)) % 1.0
    means = _accel.genz_shift_means(L, b, alpha, _shifts(k - 1, qmc), qmc.n_points)
    value = float(np.mean(means))
    error = float(3.0 * np.std(means, ddof=1) / np.sqrt(len(means)))
    return CdfResult(min(max(value, 0.0), 1.0), error)


def tmvn_mass(cov, lower, *, qmc=None):
    """P(X >= lower) for X ~ N(0, cov), via the reflection -X <= -lower."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    return mvn_cdf(-lower, cov, qmc=qmc)


def _check_mass(mass):
    if not mass.value > 1e-300:
        raise NumericalError("truncation region has numerically zero mass")


def tmvn_mean(cov, lower, *, qmc=None, mass=None):
    """E(X | X >= lower) for X ~ N(0, cov).

    Uses the first-moment reduction
    ``E(X 1[X>=l]) = sum_j cov[:, j] phi(l_j; 0, cov_jj) P(X_-j >= l_-j | X_j = l_j)``,
    where each conditional probability is a ``(k-1)``-dimensional CDF.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    k = lower.size
    cov = _as_cov(cov, k)
    if mass is None:
        mass = tmvn_mass(cov, lower, qmc=qmc)
    _check_mass(mass)
    total = np.zeros(k)
    for j in range(k):
        lj = lower[j]
        if not np.isfinite(lj):
            continue
        sjj = cov[j, j]
        log_dens = -0.5 * (lj * lj / sjj + _LOG_2PI + np.log(sjj))
        if k == 1:
            cond = 1.0
        else:
            rest = np.delete(np.arange(k), j)
            c = cov[rest, j]
            cmean = c * lj / sjj
            ccov = cov[np.ix_(rest, rest)] - np.outer(c, c) / sjj
            cond = mvn_cdf(cmean - lower[rest], ccov, qmc=qmc).value
        total += cov[:, j] * np.exp(log_dens) * cond
    return total / mass.value


def _half_line_moments(s2, l):
    """Mean and variance of N(0, s2) truncated to [l, inf)."""
    s = np.sqrt(s2)
    a = l / s
    if a == -np.inf:
        return 0.0, s2
    lam = np.exp(-0.5 * a * a - 0.5 * _LOG_2PI - special.log_ndtr(-a))
    return s * lam, s2 * (1.0 + a * lam - lam * lam)


def batch_se(stat_fn, X, n_batches=50):
    """Batch-means standard error of ``stat_fn`` over rows of ``X``."""
    n_batches = min(n_batches, len(X))
    parts = np.array_split(X, n_batches)
    vals = np.array([stat_fn(p) for p in parts])
    return np.std(vals, axis=0, ddof=1) / np.sqrt(n_batches)


def _cov_of(X):
    return np.atleast_2d(np.cov(X, rowvar=False))


def tmvn_cov(cov, lower, mc_budget=20000, seed=0, *, qmc=None):
    """Covariance of X ~ N(0, cov) given X >= lower, with standard errors.

    Exact for ``k = 1``; otherwise a Monte-Carlo estimate from
    :func:`tmvn_sample` with batch-means standard errors.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    cov = _as_cov(cov, lower.size)
    if lower.size == 1:
        _check_mass(tmvn_mass(cov, lower))
        _, var = _half_line_moments(cov[0, 0], lower[0])
        return np.array([[var]]), np.zeros((1, 1))
    X = tmvn_sample(cov, lower, mc_budget, seed, qmc=qmc)
    return _cov_of(X), batch_se(_cov_of, X)


def _feasible_start(cov, lower):
    sd = np.sqrt(np.diag(cov))
    return np.where(np.isfinite(lower), np.maximum(lower, 0.0) + 0.1 * sd, 0.0)


def tmvn_sample(cov, lower, n, seed, *, qmc=None, mass=None, method=None):
    """Draws from N(0, cov) restricted to X >= lower.

    Rejection from the untruncated law when the mass is at least 0.01,
    otherwise one coordinate-wise Gibbs chain with burn-in ``100 k`` and
    thinning 5.  Deterministic for a fixed ``seed``.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    k = lower.size
    cov = _as_cov(cov, k)
    n = int(n)
    if mass is None:
        mass = tmvn_mass(cov, lower, qmc=qmc)
    _check_mass(mass)
    if method is None:
        method = "rejection" if mass.value >= 0.01 else "gibbs"
    rng = np.random.default_rng(seed)
    if n == 0:
        return np.empty((0, k))
    if method == "rejection":
        L = np.linalg.cholesky(cov)
        out = []
        got = 0
        batch = int(min(2e6 // max(k, 1), max(1000, 1.3 * n / mass.value)))
        attempts = 0
        while got < n:
            X = rng.standard_normal((batch, k)) @ L.T
            X = X[np.all(X >= lower, axis=1)]
            out.append(X)
            got += len(X)
            attempts += batch
            if attempts > 200 * n / mass.value + 1e7:
                raise SamplerBudgetError("rejection sampler exhausted its budget")
        X = np.concatenate(out)[:n]
        return np.maximum(X, lower)
    if method != "gibbs":
        raise ValidationError(f"unknown method {method!r}")
    burn, thin = 100 * k, 5
    U = rng.random((burn + n * thin, k))
    Q = np.linalg.inv(cov)
    Q = 0.5 * (Q + Q.T)
    return _accel.gibbs_tmvn(Q, lower, _feasible_start(cov, lower), U, burn, thin, n)
