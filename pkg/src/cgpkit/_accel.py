"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen per call from the ``CGPKIT_BACKEND`` environment
variable (``numba`` or ``numpy``).  When unset, numba is used if it imports.
Both paths consume the same pre-drawn random numbers, so for a given seed they
agree to floating-point rounding.

``CGPKIT_THREADS`` caps the number of numba threads; ``0`` forces the serial
kernels.
"""

import math
import os

import numpy as np
from scipy import special

# the default TBB layer warns on mismatched TBB builds; workqueue needs nothing
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import llvmlite.binding
    import numba
    from numba import njit, prange
    from numba.extending import get_cython_function_address

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper

    prange = range


SQRT2 = math.sqrt(2.0)
# Smallest probability fed to the inverse normal CDF.
P_FLOOR = 1e-300
# Beyond this upper-tail mass the inverse-CDF draw switches to the tail branch.
TAIL_SWITCH = 1e-280


def backend():
    """Return the active backend name, ``"numba"`` or ``"numpy"``."""
    name = os.environ.get("CGPKIT_BACKEND", "").strip().lower()
    if name == "numpy" or not HAS_NUMBA:
        return "numpy"
    if name not in ("", "numba"):
        raise ValueError(f"unknown CGPKIT_BACKEND {name!r}")
    return "numba"


def thread_cap():
    """Threads requested through ``CGPKIT_THREADS``; ``None`` when unset."""
    raw = os.environ.get("CGPKIT_THREADS", "").strip()
    if not raw:
        return None
    n = int(raw)
    if n < 0:
        raise ValueError("CGPKIT_THREADS must be >= 0")
    return n


def _use_parallel():
    cap = thread_cap()
    if cap == 0:
        return False
    if cap is not None:
        numba.set_num_threads(max(1, min(cap, numba.config.NUMBA_NUM_THREADS)))
    return True


# ---------------------------------------------------------------------------
# scalar special functions (numba side)
# ---------------------------------------------------------------------------

if HAS_NUMBA:
    # scipy's own ndtri, registered under a fixed symbol name so that both
    # backends share one inverse CDF and the kernels stay cacheable
    llvmlite.binding.add_symbol("cgpkit_ndtri", get_cython_function_address(
        "scipy.special.cython_special", "ndtri"))
    _ndtri_c = numba.types.ExternalFunction("cgpkit_ndtri", numba.float64(numba.float64))
else:  # pragma: no cover
    _ndtri_c = special.ndtri


@njit(cache=True)
def norm_cdf(x):
    return 0.5 * math.erfc(-x / SQRT2)


@njit(cache=True)
def norm_ppf(p):
    """Inverse standard normal CDF."""
    return _ndtri_c(p)


@njit(cache=True)
def _tn_std_draw(a, b, u):
    """Draw from N(0,1) truncated to [a, b] by inversion of uniform ``u``."""
    if b - a < 1e-12:
        return a + u * (b - a)
    if a >= 0.0:
        qa = norm_cdf(-a)
        qb = norm_cdf(-b)
        if qa > TAIL_SWITCH and qa - qb > 0.0:
            x = -norm_ppf(qa - u * (qa - qb))
        else:
            # far tail: the density is proportional to x exp(-x^2/2) to
            # leading order, which inverts in closed form
            span = 1.0 if b == np.inf else -math.expm1(-0.5 * (b * b - a * a))
            x = math.sqrt(a * a - 2.0 * math.log1p(-u * span))
    elif b <= 0.0:
        return -_tn_std_draw(-b, -a, u)
    else:
        pa = norm_cdf(a)
        pb = norm_cdf(b)
        x = norm_ppf(pa + u * (pb - pa))
    if x < a:
        x = a
    if x > b:
        x = b
    return x


# ---------------------------------------------------------------------------
# numpy counterparts
# ---------------------------------------------------------------------------


def _tn_std_draw_np(a, b, u):
    a = np.asarray(a, dtype=float)
    b = np.broadcast_to(np.asarray(b, dtype=float), a.shape)
    u = np.broadcast_to(np.asarray(u, dtype=float), a.shape)
    flip = (a < 0.0) & (b <= 0.0)
    lo = np.where(flip, -b, a)
    hi = np.where(flip, -a, b)
    out = np.empty_like(lo)
    with np.errstate(all="ignore"):
        narrow = hi - lo < 1e-12
        upper = (lo >= 0.0) & ~narrow
        mid = (lo < 0.0) & ~narrow
        qa = special.ndtr(-lo)
        qb = special.ndtr(-hi)
        good = upper & (qa > TAIL_SWITCH) & (qa - qb > 0.0)
        tail = upper & ~good
        out[good] = -special.ndtri(qa[good] - u[good] * (qa[good] - qb[good]))
        span = np.where(np.isinf(hi), 1.0, -np.expm1(-0.5 * (hi * hi - lo * lo)))
        out[tail] = np.sqrt(lo[tail] ** 2 - 2.0 * np.log1p(-u[tail] * span[tail]))
        pa = special.ndtr(lo)
        pb = special.ndtr(hi)
        out[mid] = special.ndtri(pa[mid] + u[mid] * (pb[mid] - pa[mid]))
        out[narrow] = lo[narrow] + u[narrow] * (hi[narrow] - lo[narrow])
    out = np.clip(out, lo, hi)
    return np.where(flip, -out, out)


def truncnorm_draw(a, b, u):
    """Vectorized standard-normal draws truncated to ``[a, b]``."""
    if backend() == "numba":
        return _tn_vec_nb(np.ascontiguousarray(a, dtype=float),
                          np.ascontiguousarray(np.broadcast_to(b, np.shape(a)), dtype=float),
                          np.ascontiguousarray(np.broadcast_to(u, np.shape(a)), dtype=float))
    return _tn_std_draw_np(a, b, u)


@njit(cache=True)
def _tn_vec_nb(a, b, u):
    out = np.empty(a.size)
    af = a.ravel()
    bf = b.ravel()
    uf = u.ravel()
    for i in range(a.size):
        out[i] = _tn_std_draw(af[i], bf[i], uf[i])
    return out.reshape(a.shape)


# ---------------------------------------------------------------------------
# Genz separation-of-variables integrand
# ---------------------------------------------------------------------------


@njit(cache=True)
def _genz_shift(L, b, alpha, shift, n_points, y):
    k = L.shape[0]
    e0 = norm_cdf(b[0] / L[0, 0])
    acc = 0.0
    for n in range(1, n_points + 1):
        e = e0
        f = e0
        for i in range(1, k):
            x = n * alpha[i - 1] + shift[i - 1]
            x -= math.floor(x)
            x = abs(2.0 * x - 1.0)
            p = x * e
            if p < P_FLOOR:
                p = P_FLOOR
            y[i - 1] = norm_ppf(p)
            s = 0.0
            for j in range(i):
                s += L[i, j] * y[j]
            e = norm_cdf((b[i] - s) / L[i, i])
            f *= e
            if f == 0.0:
                break
        acc += f
    return acc / n_points


@njit(cache=True)
def _genz_serial_nb(L, b, alpha, shifts, n_points):
    S = shifts.shape[0]
    out = np.empty(S)
    y = np.empty(L.shape[0])
    for s in range(S):
        out[s] = _genz_shift(L, b, alpha, shifts[s], n_points, y)
    return out


@njit(cache=True, parallel=True)
def _genz_parallel_nb(L, b, alpha, shifts, n_points):
    S = shifts.shape[0]
    out = np.empty(S)
    for s in prange(S):
        y = np.empty(L.shape[0])
        out[s] = _genz_shift(L, b, alpha, shifts[s], n_points, y)
    return out


def _genz_np(L, b, alpha, shifts, n_points):
    k = L.shape[0]
    n = np.arange(1, n_points + 1, dtype=float)
    e0 = special.ndtr(b[0] / L[0, 0])
    out = np.empty(shifts.shape[0])
    for s, shift in enumerate(shifts):
        e = np.full(n_points, e0)
        f = e.copy()
        y = np.empty((k - 1, n_points))
        for i in range(1, k):
            x = n * alpha[i - 1] + shift[i - 1]
            x -= np.floor(x)
            x = np.abs(2.0 * x - 1.0)
            y[i - 1] = special.ndtri(np.maximum(x * e, P_FLOOR))
            e = special.ndtr((b[i] - L[i, :i] @ y[:i]) / L[i, i])
            f *= e
        out[s] = f.mean()
    return out


def genz_shift_means(L, b, alpha, shifts, n_points):
    """Per-shift QMC means of the Genz integrand.

    Parameters
    ----------
    L : (k, k) array
        Lower Cholesky factor of the (reordered) covariance.
    b : (k,) array
        Reordered upper limits; every entry finite or ``+inf``.
    alpha : (k-1,) array
        Generating vector of the Kronecker lattice.
    shifts : (S, k-1) array
        Random shifts, one row per independent replicate.
    n_points : int
        Lattice points per replicate.
    """
    L = np.ascontiguousarray(L, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    alpha = np.ascontiguousarray(alpha, dtype=float)
    shifts = np.ascontiguousarray(shifts, dtype=float)
    if backend() == "numba":
        if _use_parallel():
            return _genz_parallel_nb(L, b, alpha, shifts, int(n_points))
        return _genz_serial_nb(L, b, alpha, shifts, int(n_points))
    return _genz_np(L, b, alpha, shifts, int(n_points))


# ---------------------------------------------------------------------------
# Gibbs sampler for N(0, Sigma) restricted to X >= lower
# ---------------------------------------------------------------------------


@njit(cache=True)
def _gibbs_nb(Q, lower, x0, uniforms, burn_in, thin, n_keep):
    k = Q.shape[0]
    x = x0.copy()
    out = np.empty((n_keep, k))
    sd = np.empty(k)
    for j in range(k):
        sd[j] = 1.0 / math.sqrt(Q[j, j])
    it = 0
    kept = 0
    total = burn_in + n_keep * thin
    while it < total:
        for j in range(k):
            s = 0.0
            for i in range(k):
                if i != j:
                    s += Q[j, i] * x[i]
            m = -s / Q[j, j]
            a = (lower[j] - m) / sd[j]
            x[j] = m + sd[j] * _tn_std_draw(a, np.inf, uniforms[it, j])
            if x[j] < lower[j]:
                x[j] = lower[j]
        it += 1
        if it > burn_in and (it - burn_in) % thin == 0:
            out[kept] = x
            kept += 1
    return out


def _gibbs_np(Q, lower, x0, uniforms, burn_in, thin, n_keep):
    k = Q.shape[0]
    x = x0.copy()
    out = np.empty((n_keep, k))
    sd = 1.0 / np.sqrt(np.diag(Q))
    off = Q - np.diag(np.diag(Q))
    diag = np.diag(Q)
    kept = 0
    for it in range(1, burn_in + n_keep * thin + 1):
        for j in range(k):
            m = -(off[j] @ x) / diag[j]
            a = (lower[j] - m) / sd[j]
            x[j] = max(m + sd[j] * float(_tn_std_draw_np(a, np.inf, uniforms[it - 1, j])),
                       lower[j])
        if it > burn_in and (it - burn_in) % thin == 0:
            out[kept] = x
            kept += 1
    return out


def gibbs_tmvn(precision, lower, x0, uniforms, burn_in, thin, n_keep):
    """Run one coordinate-wise Gibbs chain and return the thinned draws.

    ``uniforms`` must have shape ``(burn_in + n_keep * thin, k)``.
    """
    args = (np.ascontiguousarray(precision, dtype=float),
            np.ascontiguousarray(lower, dtype=float),
            np.ascontiguousarray(x0, dtype=float),
            np.ascontiguousarray(uniforms, dtype=float),
            int(burn_in), int(thin), int(n_keep))
    if backend() == "numba":
        return _gibbs_nb(*args)
    return _gibbs_np(*args)
