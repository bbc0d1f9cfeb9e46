"""Linear constraint systems ``A g + b >= 0`` on a finite evaluation grid.

Rows are never normalized: multiplying a row by ``s > 0`` leaves the feasible
set unchanged but sharpens the probit likelihood ``Phi(a.g + b)``.  Every
builder takes a ``scale`` argument for that purpose.

Builder outputs remember how they were made (``recipe``) so that the same
constraint type can be re-instantiated on a different grid.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .kernels import as_points


@dataclass(frozen=True, eq=False)
class LinearConstraintSet:
    A: np.ndarray
    b: np.ndarray
    labels: tuple = ()
    recipe: tuple | None = field(default=(), repr=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2:
            raise ValidationError("A must be a 2-d matrix")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.shape != (A.shape[0],):
            raise ValidationError(f"b has {b.size} entries but A has {A.shape[0]} rows")
        if A.shape[0] and np.any(np.all(A == 0, axis=1)):
            raise ValidationError("A has an all-zero row")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValidationError("constraint coefficients must be finite")
        labels = tuple(self.labels) or tuple(f"row{i}" for i in range(A.shape[0]))
        if len(labels) != A.shape[0]:
            raise ValidationError("need one label per row")
        A.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    def residual(self, g):
        return self.A @ np.asarray(g, dtype=float) + self.b

    def rebuild(self, grid):
        """Same constraint types, instantiated on ``grid``."""
        if self.recipe is None:
            raise ValidationError("custom constraint rows cannot be moved to a different grid")
        out = empty(len(as_points(grid)))
        for kind, kwargs in self.recipe:
            out = stack(out, _BUILDERS[kind](grid=grid, **kwargs))
        return out

    def same_rows(self, other):
        return (self.A.shape == other.A.shape and np.array_equal(self.A, other.A)
                and np.array_equal(self.b, other.b))


def empty(n):
    """The unconstrained set (``k = 0``) over ``n`` grid values."""
    return LinearConstraintSet(np.zeros((0, int(n))), np.zeros(0), (), ())


def custom(A, b, labels=()):
    """Arbitrary rows; not transferable to other grids."""
    return LinearConstraintSet(A, b, labels, None)


def _grid_1d(grid):
    z = np.asarray(grid, dtype=float)
    if z.ndim == 2 and z.shape[1] == 1:
        z = z[:, 0]
    if z.ndim != 1:
        raise ValidationError("shape constraints need a one-dimensional input grid")
    return z


def bounds_constraint(lower=None, upper=None, n=None, *, grid=None, scale=1.0):
    """Rows ``g_i - lower >= 0`` and/or ``upper - g_i >= 0`` per grid point."""
    if n is None:
        if grid is None:
            raise ValidationError("need n or grid")
        n = len(as_points(grid))
    n = int(n)
    if n < 1:
        raise ValidationError("n must be positive")
    if lower is None and upper is None:
        raise ValidationError("bounds need a lower or an upper value")
    if lower is not None and upper is not None and not lower < upper:
        raise ValidationError(f"lower ({lower}) must be < upper ({upper})")
    if not scale > 0:
        raise ValidationError("scale must be positive")
    rows, rhs, labels = [], [], []
    eye = np.eye(n)
    if lower is not None:
        rows.append(scale * eye)
        rhs.append(np.full(n, -scale * lower))
        labels += [f"g[{i}]>={lower}" for i in range(n)]
    if upper is not None:
        rows.append(-scale * eye)
        rhs.append(np.full(n, scale * upper))
        labels += [f"g[{i}]<={upper}" for i in range(n)]
    recipe = (("bounds", {"lower": lower, "upper": upper, "scale": scale}),)
    return LinearConstraintSet(np.vstack(rows), np.concatenate(rhs), tuple(labels), recipe)


def monotone_constraint(grid, direction="increasing", *, scale=1.0):
    """First differences ``g(z_{i+1}) - g(z_i) >= 0`` (negated for decreasing)."""
    z = _grid_1d(grid)
    if z.size < 2:
        raise ValidationError("monotone constraint needs at least 2 grid points")
    if np.any(np.diff(z) <= 0):
        raise ValidationError("grid must be strictly increasing")
    if direction not in ("increasing", "decreasing"):
        raise ValidationError("direction must be 'increasing' or 'decreasing'")
    if not scale > 0:
        raise ValidationError("scale must be positive")
    n = z.size
    A = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    A[idx, idx] = -1.0
    A[idx, idx + 1] = 1.0
    if direction == "decreasing":
        A = -A
    sym = ">=" if direction == "increasing" else "<="
    labels = tuple(f"g[{i + 1}]{sym}g[{i}]" for i in idx)
    recipe = (("monotone", {"direction": direction, "scale": scale}),)
    return LinearConstraintSet(scale * A, np.zeros(n - 1), labels, recipe)


def convex_constraint(grid, *, scale=1.0):
    """Second differences ``g(z_{i-1}) - 2 g(z_i) + g(z_{i+1}) >= 0``."""
    z = _grid_1d(grid)
    if z.size < 3:
        raise ValidationError("convex constraint needs at least 3 grid points")
    h = np.diff(z)
    if np.any(h <= 0):
        raise ValidationError("grid must be strictly increasing")
    if np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise ValidationError("convex constraint needs equally spaced grid points")
    if not scale > 0:
        raise ValidationError("scale must be positive")
    n = z.size
    A = np.zeros((n - 2, n))
    idx = np.arange(n - 2)
    A[idx, idx] = 1.0
    A[idx, idx + 1] = -2.0
    A[idx, idx + 2] = 1.0
    labels = tuple(f"convex@{i + 1}" for i in idx)
    return LinearConstraintSet(scale * A, np.zeros(n - 2), labels, (("convex", {"scale": scale}),))


_BUILDERS = {
    "bounds": bounds_constraint,
    "monotone": monotone_constraint,
    "convex": convex_constraint,
}


def stack(c1, c2):
    """Rows of ``c1`` followed by rows of ``c2``."""
    if c1.n != c2.n:
        raise ValidationError(f"cannot stack constraints over {c1.n} and {c2.n} grid values")
    recipe = None if c1.recipe is None or c2.recipe is None else c1.recipe + c2.recipe
    return LinearConstraintSet(np.vstack([c1.A, c2.A]), np.concatenate([c1.b, c2.b]),
                               c1.labels + c2.labels, recipe)


def violation(c, g):
    """Largest violation ``max(0, -min(A g + b))``; 0 on the feasible set."""
    g = np.asarray(g, dtype=float).reshape(-1)
    if g.size != c.n:
        raise ValidationError(f"g has {g.size} entries, constraints expect {c.n}")
    if c.k == 0:
        return 0.0
    return float(max(0.0, -np.min(c.residual(g))))


def violated_rows(c, g, tol=0.0):
    r = c.residual(g)
    return [c.labels[i] for i in np.flatnonzero(r < -tol)]
