"""Finite-dimensional constrained Gaussian process.

A CGP over ``n`` grid values has density

    f(g) = phi(g; u, K) * Phi(A g + b) / Z,    Z = Phi(A u + b; I + A K A^T)

where the middle factor is a product of independent univariate probits.

Introducing ``w = A g + b + e`` with ``e ~ N(0, I)`` makes ``(g, w)`` jointly
Gaussian, and the CGP is the law of ``g`` given ``w >= 0``.  That gives the
additive representation used for the mean, covariance and sampler::

    g = u + B (w+ - m_w) + r,   r ~ N(0, Sigma_r) independent of w+

with ``m_w = A u + b``, ``Sigma_w = I + A K A^T``, ``B = K A^T Sigma_w^-1``,
``Sigma_r = K - B A K`` and ``w+ ~ N(m_w, Sigma_w)`` restricted to ``w >= 0``.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg, special

from . import mvn
from .constraints import LinearConstraintSet, empty
from .errors import (InfeasibleConstraintsError, NumericalError, PDRepairError,
                     SamplerBudgetError, ValidationError)
from .kernels import GramMatrix

Z_FLOOR = 1e-12


class RejectionDraws(NamedTuple):
    samples: np.ndarray
    acceptance_rate: float
    attempts: int


def _psd_sqrt(S):
    vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


class _AdditiveMixin:
    """Mean, covariance and sampling shared by full and marginal views."""

    def _rep(self):
        raise NotImplementedError

    def mean(self):
        u, B, _, Sigma_w, m_w, Z = self._rep()
        if B.shape[1] == 0:
            return u.copy()
        return u + B @ self._trunc_mean()

    def covariance(self, mc_budget=20000, seed=0):
        """Covariance matrix and per-entry Monte-Carlo standard errors.

        Exact when there are no constraints or a single constraint row.
        """
        u, B, Sigma_r, Sigma_w, m_w, Z = self._rep()
        if B.shape[1] == 0:
            return Sigma_r.copy(), np.zeros_like(Sigma_r)
        C, se = mvn.tmvn_cov(Sigma_w, -m_w, mc_budget, seed, qmc=self.qmc)
        cov = Sigma_r + B @ C @ B.T
        # linear propagation, entries treated as independent
        W = np.einsum("ia,jb->ijab", B, B)
        cov_se = np.sqrt(np.einsum("ijab,ab->ij", W * W, se * se))
        return 0.5 * (cov + cov.T), cov_se

    def sample(self, n, seed):
        """``n`` draws (rows) via the additive representation."""
        u, B, Sigma_r, Sigma_w, m_w, Z = self._rep()
        s_w, s_r = np.random.SeedSequence(seed).spawn(2)
        n = int(n)
        R = np.random.default_rng(s_r).standard_normal((n, u.size)) @ _psd_sqrt(Sigma_r).T
        if B.shape[1] == 0:
            return u + R
        Wc = mvn.tmvn_sample(Sigma_w, -m_w, n, s_w, qmc=self.qmc, mass=Z)
        return u + Wc @ B.T + R


@dataclass(frozen=True, eq=False)
class CgpDistribution(_AdditiveMixin):
    """CGP(u, K, C) on a finite grid; build with :func:`build`."""

    u: np.ndarray
    K: np.ndarray
    constraints: LinearConstraintSet
    Sigma_w: np.ndarray
    m_w: np.ndarray
    Z: mvn.CdfResult
    B: np.ndarray
    Sigma_r: np.ndarray
    qmc: mvn.QmcOptions = mvn.DEFAULT_QMC
    grid: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return self.u.size

    @property
    def k(self):
        return self.constraints.k

    def _rep(self):
        return self.u, self.B, self.Sigma_r, self.Sigma_w, self.m_w, self.Z

    def _trunc_mean(self):
        if "tmean" not in self._cache:
            self._cache["tmean"] = mvn.tmvn_mean(self.Sigma_w, -self.m_w, qmc=self.qmc, mass=self.Z)
        return self._cache["tmean"]

    def normalizing_constant(self):
        return self.Z

    def log_density(self, g):
        g = np.asarray(g, dtype=float).reshape(-1)
        if g.size != self.n:
            raise ValidationError(f"g has {g.size} entries, expected {self.n}")
        out = mvn.mvn_logpdf(g, self.u, self.K)
        if self.k:
            out += float(np.sum(special.log_ndtr(self.constraints.residual(g))))
            out -= np.log(self.Z.value)
        return out

    def mgf(self, t):
        """Moment generating function E[exp(t.g)]."""
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.size != self.n:
            raise ValidationError(f"t has {t.size} entries, expected {self.n}")
        Kt = self.K @ t
        expo = float(self.u @ t + 0.5 * t @ Kt)
        if expo > 700.0:
            raise NumericalError(f"MGF overflows: exponent {expo:.1f} exceeds 700")
        if self.k == 0:
            return float(np.exp(expo))
        A = self.constraints.A
        num = mvn.mvn_cdf(self.m_w + A @ Kt, self.Sigma_w, qmc=self.qmc).value
        return float(np.exp(expo) * num / self.Z.value)

    def sample_rejection(self, n, seed, max_attempts=10**7):
        """Exact draws: ``g ~ N(u, K)`` accepted with probability ``Phi(A g + b)``."""
        rng = np.random.default_rng(seed)
        n = int(n)
        L = _psd_sqrt(self.K)
        A, b = self.constraints.A, self.constraints.b
        batch = int(min(max(1000, 1.2 * n / max(self.Z.value, 1e-6)), 2e6 // max(self.n, 1)))
        kept, got, attempts = [], 0, 0
        while got < n:
            if attempts >= max_attempts:
                raise SamplerBudgetError(f"rejection sampler used {attempts} attempts for {got}/{n} draws")
            m = min(batch, max_attempts - attempts)
            G = self.u + rng.standard_normal((m, self.n)) @ L.T
            if self.k:
                logp = special.log_ndtr(G @ A.T + b).sum(axis=1)
                G = G[np.log(rng.random(m)) < logp]
            kept.append(G)
            got += len(G)
            attempts += m
        X = np.concatenate(kept)
        # rate over every batch drawn, including the surplus of the last one
        return RejectionDraws(X[:n], got / attempts, attempts)

    def marginal(self, index, literal=None):
        """View of the sub-vector ``g[index]``."""
        return CgpMarginal(self, np.asarray(index, dtype=int), literal or {})


@dataclass(frozen=True, eq=False)
class CgpMarginal(_AdditiveMixin):
    """Marginal of a CGP on a subset of its grid.

    Same additive representation as the parent with the rows of ``u``, ``B``
    and ``Sigma_r`` restricted to ``index``.
    """

    parent: CgpDistribution
    index: np.ndarray
    literal: dict = field(default_factory=dict)

    @property
    def qmc(self):
        return self.parent.qmc

    @property
    def Z(self):
        return self.parent.Z

    @property
    def grid(self):
        g = self.parent.grid
        return None if g is None else g[self.index]

    @property
    def n(self):
        return self.index.size

    def _rep(self):
        p, i = self.parent, self.index
        return p.u[i], p.B[i], p.Sigma_r[np.ix_(i, i)], p.Sigma_w, p.m_w, p.Z

    def _trunc_mean(self):
        return self.parent._trunc_mean()

    def normalizing_constant(self):
        return self.parent.Z

    def mgf(self, t):
        full = np.zeros(self.parent.n)
        full[self.index] = np.asarray(t, dtype=float).reshape(-1)
        return self.parent.mgf(full)

    def sample(self, n, seed):
        return self.parent.sample(n, seed)[:, self.index]


def build(u, K, constraints=None, *, qmc=None, grid=None):
    """Construct ``CGP(u, K, C)`` and its cached quantities.

    Raises
    ------
    InfeasibleConstraintsError
        If the normalizing constant is below 1e-12.
    """
    if isinstance(K, GramMatrix):
        K = K.K
    K = np.atleast_2d(np.asarray(K, dtype=float))
    n = K.shape[0]
    if K.shape != (n, n):
        raise ValidationError("K must be square")
    u = np.broadcast_to(np.asarray(u, dtype=float), (n,)).copy()
    if constraints is None:
        constraints = empty(n)
    if constraints.n != n:
        raise ValidationError(f"constraints act on {constraints.n} values, K is {n}x{n}")
    if constraints.k > mvn.MAX_DIM:
        raise ValidationError(f"{constraints.k} constraint rows exceed the limit of {mvn.MAX_DIM}")
    K = 0.5 * (K + K.T)
    scale = max(1.0, float(np.max(np.abs(np.diag(K))))) if n else 1.0
    if n and np.linalg.eigvalsh(K)[0] < -1e-8 * scale:
        raise PDRepairError("K is not positive semi-definite")
    qmc = qmc or mvn.DEFAULT_QMC
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
    A, b = constraints.A, constraints.b
    k = constraints.k
    if k == 0:
        return CgpDistribution(u, K, constraints, np.zeros((0, 0)), np.zeros(0),
                               mvn.CdfResult(1.0, 0.0), np.zeros((n, 0)), K.copy(), qmc, grid)
    AK = A @ K
    Sigma_w = np.eye(k) + AK @ A.T
    Sigma_w = 0.5 * (Sigma_w + Sigma_w.T)
    m_w = A @ u + b
    Z = mvn.mvn_cdf(m_w, Sigma_w, qmc=qmc)
    if Z.value < Z_FLOOR:
        raise InfeasibleConstraintsError(
            f"effectively infeasible constraints: normalizing constant {Z.value:.3g} < {Z_FLOOR:g}")
    cho = linalg.cho_factor(Sigma_w, lower=True)
    B = linalg.cho_solve(cho, AK).T
    Sigma_r = K - B @ AK
    return CgpDistribution(u, K, constraints, Sigma_w, m_w, Z, B, 0.5 * (Sigma_r + Sigma_r.T), qmc, grid)
