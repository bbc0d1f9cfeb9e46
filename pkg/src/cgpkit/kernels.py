"""Stationary covariance kernels and Gram matrices with jitter repair."""

from dataclasses import dataclass

import numpy as np

from .errors import PDRepairError, ValidationError

FAMILIES = ("squared-exponential", "matern-3/2")
_ALIASES = {
    "se": "squared-exponential",
    "rbf": "squared-exponential",
    "squared-exponential": "squared-exponential",
    "squared_exponential": "squared-exponential",
    "matern32": "matern-3/2",
    "matern-3/2": "matern-3/2",
    "matern3/2": "matern-3/2",
}

JITTER_START = 1e-10
JITTER_CAP = 1e-6


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, lengthscale, variance and constant prior mean."""

    family: str = "squared-exponential"
    lengthscale: float = 1.0
    variance: float = 1.0
    mean: float = 0.0

    def __post_init__(self):
        fam = _ALIASES.get(str(self.family).strip().lower())
        if fam is None:
            raise ValidationError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if not (np.isfinite(self.lengthscale) and self.lengthscale > 0):
            raise ValidationError("lengthscale must be positive")
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise ValidationError("variance must be positive")
        if not np.isfinite(self.mean):
            raise ValidationError("mean must be finite")


@dataclass(frozen=True)
class GramMatrix:
    K: np.ndarray
    jitter_applied: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return self.K if dtype is None else self.K.astype(dtype)


def as_points(Z):
    """Coerce inputs to an ``(n, d)`` float array (1-d input becomes ``d=1``)."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 0:
        Z = Z.reshape(1, 1)
    elif Z.ndim == 1:
        Z = Z[:, None]
    elif Z.ndim != 2:
        raise ValidationError("input points must be a scalar, vector or 2-d array")
    return Z


def _from_distance(spec, r):
    v = spec.variance
    if spec.family == "squared-exponential":
        return v * np.exp(-0.5 * (r / spec.lengthscale) ** 2)
    s = np.sqrt(3.0) * r / spec.lengthscale
    return v * (1.0 + s) * np.exp(-s)


def _distances(Za, Zb):
    diff = Za[:, None, :] - Zb[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def kernel_eval(spec, z1, z2):
    """k(z1, z2) for single input points."""
    a = np.atleast_1d(np.asarray(z1, dtype=float))
    b = np.atleast_1d(np.asarray(z2, dtype=float))
    if a.shape != b.shape:
        raise ValidationError("input points must have the same dimension")
    return float(_from_distance(spec, np.sqrt(np.sum((a - b) ** 2))))


def cross_gram(spec, Z, Zstar):
    """Matrix with entry ``(i, j) = k(Zstar[i], Z[j])``; no jitter."""
    Z = as_points(Z)
    Zstar = as_points(Zstar)
    if len(Z) == 0 or len(Zstar) == 0:
        raise ValidationError("point lists must be non-empty")
    if Z.shape[1] != Zstar.shape[1]:
        raise ValidationError("input dimensions differ")
    return _from_distance(spec, _distances(Zstar, Z))


def stabilized_cholesky(K, *, start=JITTER_START, cap=JITTER_CAP):
    """Cholesky factor of ``K`` with escalating diagonal jitter.

    Jitter starts at ``start * mean(diag K)`` (after a jitter-free attempt) and
    grows tenfold per failure up to ``cap * mean(diag K)``.

    Returns
    -------
    L : ndarray
        Lower-triangular factor of ``K + jitter * I``.
    jitter : float
        The jitter actually added (0.0 when none was needed).
    """
    K = np.asarray(K, dtype=float)
    scale = float(np.mean(np.diag(K))) if K.size else 1.0
    if not np.isfinite(scale) or scale <= 0:
        scale = 1.0
    try:
        return np.linalg.cholesky(K), 0.0
    except np.linalg.LinAlgError:
        pass
    jitter = start * scale
    eye = np.eye(len(K))
    while jitter <= cap * scale * (1 + 1e-9):
        try:
            return np.linalg.cholesky(K + jitter * eye), jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise PDRepairError(f"matrix not positive definite even with jitter {cap * scale:.3g}")


def gram_matrix(spec, Z):
    """Gram matrix at ``Z``, jittered just enough for Cholesky to succeed."""
    Z = as_points(Z)
    if len(Z) == 0:
        raise ValidationError("Z must be non-empty")
    K = _from_distance(spec, _distances(Z, Z))
    K = 0.5 * (K + K.T)
    _, jitter = stabilized_cholesky(K)
    if jitter:
        K = K + jitter * np.eye(len(K))
    return GramMatrix(K, jitter)
