"""Batch command-line frontend.

Usage::

    cgpkit <command> --config run.cfg [--data data.csv] [--output out.csv]

Commands: ``fit-regression``, ``fit-classification``, ``sample``,
``diagnose`` and ``verify``.  Exit status is 0 on success, 2 for invalid
input (with ``file:line:`` diagnostics where a line applies) and 3 for
numerical failures.

Config files are line oriented.  ``#`` starts a comment, ``[name]`` opens a
section and every other line is ``key = value``, except in ``[constraints]``
where each line is a directive (optionally written ``constraint = ...``)::

    [kernel]
    family = se            # se | matern32
    lengthscale = 0.7
    variance = 0.25
    mean = 0.5

    [noise]
    variance = 0.04

    [constraints]
    monotone increasing
    bounds 0 1 scale=2     # "none" leaves a side open
    convex
    custom rows.csv        # rows a_1..a_n,b over the prediction grid

    [run]
    seed = 7
    mc_budget = 4000
    grid = -2, 2, 25       # lo, hi, count (one-dimensional inputs)
    output = predictions.csv
"""

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _accel, cgp, constraints as cons, diagnostics, inference, mvn, theory
from .errors import CgpError, NumericalError, ValidationError
from .kernels import KernelSpec, as_points, gram_matrix

COMMANDS = ("fit-regression", "fit-classification", "sample", "diagnose", "verify")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class InputError(ValidationError):
    """Malformed config or data, located by file and line."""

    def __init__(self, path, line, msg):
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {msg}")
        self.path, self.line = path, line


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

_RUN_KEYS = {
    "seed": int,
    "mc_budget": int,
    "quad_points": int,
    "n_samples": int,
    "n_checks": int,
    "qmc_points": int,
    "qmc_shifts": int,
    "epsilon": float,
    "t_lo": float,
    "t_hi": float,
    "grid": str,
    "output": str,
    "summary": str,
    "prob_output": str,
}

_RUN_DEFAULTS = {
    "seed": 0,
    "mc_budget": 4000,
    "quad_points": diagnostics.DEFAULT_QUAD,
    "n_samples": 1000,
    "n_checks": 10,
    "qmc_points": mvn.DEFAULT_QMC.n_points,
    "qmc_shifts": mvn.DEFAULT_QMC.n_shifts,
    "epsilon": 0.5,
}


@dataclass
class Directive:
    kind: str
    args: list
    scale: float
    line: int


@dataclass
class RunConfig:
    path: Path
    kernel: KernelSpec | None = None
    noise_var: float | None = None
    directives: list = field(default_factory=list)
    run: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)

    def get(self, key):
        return self.run.get(key, _RUN_DEFAULTS.get(key))

    def where(self, key):
        return self.lines.get(key, 0)

    def resolve(self, name):
        p = Path(name)
        return p if p.is_absolute() else self.path.parent / p

    @property
    def qmc(self):
        return mvn.QmcOptions(self.get("qmc_points"), self.get("qmc_shifts"), mvn.DEFAULT_SEED)


def _number(path, line, key, text, kind=float):
    try:
        if kind is int:
            val = int(text)
        else:
            val = float(text)
    except ValueError:
        raise InputError(path, line, f"{key}: expected {'an integer' if kind is int else 'a number'}, got {text!r}") from None
    if kind is float and not math.isfinite(val):
        raise InputError(path, line, f"{key}: value must be finite")
    return val


def _parse_directive(path, line, text):
    words = text.split()
    scale = 1.0
    plain = []
    for w in words:
        if w.startswith("scale="):
            scale = _number(path, line, "scale", w[6:])
            if not scale > 0:
                raise InputError(path, line, "scale must be positive")
        else:
            plain.append(w)
    if not plain:
        raise InputError(path, line, "empty constraint directive")
    kind, args = plain[0].lower(), plain[1:]
    if kind == "bounds":
        if len(args) != 2:
            raise InputError(path, line, "bounds needs two values: bounds <lower> <upper>")
        vals = [None if a.lower() in ("none", "-") else _number(path, line, "bounds", a) for a in args]
        if vals == [None, None]:
            raise InputError(path, line, "bounds needs at least one finite side")
        if None not in vals and not vals[0] < vals[1]:
            raise InputError(path, line, f"bounds: lower ({vals[0]}) must be < upper ({vals[1]})")
        return Directive("bounds", vals, scale, line)
    if kind == "monotone":
        if len(args) != 1 or args[0] not in ("increasing", "decreasing"):
            raise InputError(path, line, "monotone needs 'increasing' or 'decreasing'")
        return Directive("monotone", args, scale, line)
    if kind == "convex":
        if args:
            raise InputError(path, line, "convex takes no arguments")
        return Directive("convex", [], scale, line)
    if kind == "custom":
        if len(args) != 1:
            raise InputError(path, line, "custom needs one matrix file")
        return Directive("custom", args, scale, line)
    raise InputError(path, line, f"unknown constraint directive {kind!r}")


def parse_config(path):
    """Parse and validate a config file into a :class:`RunConfig`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(path, 0, f"cannot read config: {exc}") from None
    cfg = RunConfig(path)
    section = None
    kernel = {}
    seen = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise InputError(path, ln, f"malformed section header {raw.strip()!r}")
            section = line[1:-1].strip().lower()
            if section not in ("kernel", "noise", "constraints", "run"):
                raise InputError(path, ln, f"unknown section [{section}]")
            continue
        if section is None:
            raise InputError(path, ln, "entry outside of any section")
        if section == "constraints":
            key, eq, val = (s.strip() for s in line.partition("="))
            if eq and key == "constraint":
                line = val
            cfg.directives.append(_parse_directive(path, ln, line))
            continue
        if "=" not in line:
            raise InputError(path, ln, f"expected 'key = value', got {raw.strip()!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        if not val:
            raise InputError(path, ln, f"{key}: missing value")
        if (section, key) in seen:
            raise InputError(path, ln, f"{key} already set on line {seen[section, key]}")
        seen[section, key] = ln
        if section == "kernel":
            if key == "family":
                kernel[key] = (val, ln)
            elif key in ("lengthscale", "variance", "mean"):
                kernel[key] = (_number(path, ln, key, val), ln)
                if key != "mean" and not kernel[key][0] > 0:
                    raise InputError(path, ln, f"{key} must be positive")
            else:
                raise InputError(path, ln, f"unknown key {key!r} in [kernel]")
        elif section == "noise":
            if key != "variance":
                raise InputError(path, ln, f"unknown key {key!r} in [noise]")
            cfg.noise_var = _number(path, ln, key, val)
            if not cfg.noise_var > 0:
                raise InputError(path, ln, "noise variance must be positive")
        else:
            if key not in _RUN_KEYS:
                raise InputError(path, ln, f"unknown key {key!r} in [run]")
            kind = _RUN_KEYS[key]
            cfg.run[key] = val if kind is str else _number(path, ln, key, val, kind)
            cfg.lines[key] = ln
    if kernel:
        try:
            cfg.kernel = KernelSpec(**{k: v for k, (v, _) in kernel.items()})
        except ValidationError as exc:
            first = min(ln for _, ln in kernel.values())
            raise InputError(path, first, f"[kernel]: {exc}") from None
    _check_run(cfg)
    return cfg


def _check_run(cfg):
    positive = ("mc_budget", "n_samples", "n_checks", "qmc_points", "qmc_shifts")
    for key in positive:
        if key in cfg.run and cfg.run[key] < 1:
            raise InputError(cfg.path, cfg.where(key), f"{key} must be >= 1")
    if "qmc_shifts" in cfg.run and cfg.run["qmc_shifts"] < 2:
        raise InputError(cfg.path, cfg.where("qmc_shifts"), "qmc_shifts must be >= 2")
    if "quad_points" in cfg.run and cfg.run["quad_points"] < 64:
        raise InputError(cfg.path, cfg.where("quad_points"), "quad_points must be >= 64")
    if "epsilon" in cfg.run and not cfg.run["epsilon"] > 0:
        raise InputError(cfg.path, cfg.where("epsilon"), "epsilon must be positive")
    if "mc_budget" in cfg.run and cfg.run["mc_budget"] < 100:
        raise InputError(cfg.path, cfg.where("mc_budget"), "mc_budget must be >= 100")
    if "seed" in cfg.run and cfg.run["seed"] < 0:
        raise InputError(cfg.path, cfg.where("seed"), "seed must be >= 0")
    if "t_lo" in cfg.run and "t_hi" in cfg.run and not cfg.run["t_lo"] < cfg.run["t_hi"]:
        raise InputError(cfg.path, cfg.where("t_hi"), "t_lo must be < t_hi")
    if "grid" in cfg.run:
        _grid_from(cfg)


def _grid_from(cfg):
    parts = [p.strip() for p in cfg.run["grid"].split(",")]
    ln = cfg.where("grid")
    if len(parts) != 3:
        raise InputError(cfg.path, ln, "grid needs 'lo, hi, count'")
    lo, hi = (_number(cfg.path, ln, "grid", p) for p in parts[:2])
    m = _number(cfg.path, ln, "grid", parts[2], int)
    if not lo < hi or m < 1:
        raise InputError(cfg.path, ln, "grid needs lo < hi and count >= 1")
    return np.linspace(lo, hi, m)[:, None]


def _need(cfg, what):
    if what == "kernel" and cfg.kernel is None:
        raise InputError(cfg.path, 0, "missing [kernel] section")
    if what == "noise" and cfg.noise_var is None:
        raise InputError(cfg.path, 0, "missing [noise] variance")


# ---------------------------------------------------------------------------
# CSV input
# ---------------------------------------------------------------------------


def _read_rows(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(path, 0, f"cannot read data: {exc}") from None
    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(text)), start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(path, 0, "empty file")
    return path, rows


def _numeric_body(path, rows, width):
    out = np.empty((len(rows), width))
    for j, (ln, row) in enumerate(rows):
        if len(row) != width:
            raise InputError(path, ln, f"expected {width} fields, found {len(row)}")
        for c, cell in enumerate(row):
            out[j, c] = _number(path, ln, f"column {c + 1}", cell.strip())
    return out


def read_xy(path, last="y"):
    """Read an ``x1,...,xd,<last>`` CSV; returns ``(X, v)``."""
    path, rows = _read_rows(path)
    ln, header = rows[0]
    header = [h.strip() for h in header]
    d = len(header) - 1
    expected = [f"x{i}" for i in range(1, d + 1)] + [last]
    if d < 1 or header != expected:
        raise InputError(path, ln, f"header must be x1,...,xd,{last}; got {','.join(header)}")
    if len(rows) < 2:
        raise InputError(path, ln, "no data rows")
    body = _numeric_body(path, rows[1:], d + 1)
    return body[:, :d], body[:, d], [r[0] for r in rows[1:]]


def read_forecasts(path):
    """Read a ``y,mu,sigma`` CSV of Gaussian forecasts."""
    path, rows = _read_rows(path)
    ln, header = rows[0]
    if [h.strip() for h in header] != ["y", "mu", "sigma"]:
        raise InputError(path, ln, "header must be y,mu,sigma")
    if len(rows) < 3:
        raise InputError(path, ln, "need at least 2 forecast rows")
    body = _numeric_body(path, rows[1:], 3)
    for (ln, _), s in zip(rows[1:], body[:, 2]):
        if s < 0:
            raise InputError(path, ln, "sigma must be >= 0")
    return body


def read_matrix(path, n):
    """Custom constraint rows ``a_1,...,a_n,b`` (no header)."""
    path, rows = _read_rows(path)
    rows = [(ln, r) for ln, r in rows if not r[0].lstrip().startswith("#")]
    if not rows:
        raise InputError(path, 0, "no constraint rows")
    body = _numeric_body(path, rows, n + 1)
    for (ln, _), a in zip(rows, body[:, :n]):
        if not np.any(a):
            raise InputError(path, ln, "constraint row has all-zero coefficients")
    return body[:, :n], body[:, n]


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def build_constraints(cfg, grid):
    """Constraint set over ``grid`` from the config directives."""
    grid = as_points(grid)
    n = len(grid)
    out = cons.empty(n)
    for d in cfg.directives:
        try:
            if d.kind == "bounds":
                c = cons.bounds_constraint(d.args[0], d.args[1], grid=grid, scale=d.scale)
            elif d.kind == "monotone":
                c = cons.monotone_constraint(grid, d.args[0], scale=d.scale)
            elif d.kind == "convex":
                c = cons.convex_constraint(grid, scale=d.scale)
            else:
                A, b = read_matrix(cfg.resolve(d.args[0]), n)
                c = cons.custom(d.scale * A, d.scale * b)
        except InputError:
            raise
        except ValidationError as exc:
            raise InputError(cfg.path, d.line, f"{d.kind}: {exc}") from None
        out = cons.stack(out, c)
    if out.k > mvn.MAX_DIM:
        raise InputError(cfg.path, cfg.directives[-1].line,
                         f"{out.k} constraint rows exceed the limit of {mvn.MAX_DIM}")
    return out


def _has_custom(cfg):
    return any(d.kind == "custom" for d in cfg.directives)


def _prediction_grid(cfg, X):
    if "grid" in cfg.run:
        if X is not None and X.shape[1] != 1:
            raise InputError(cfg.path, cfg.where("grid"), "grid only applies to one-dimensional inputs")
        grid = _grid_from(cfg)
        if _has_custom(cfg) and (X is None or not np.array_equal(grid, X)):
            raise InputError(cfg.path, cfg.where("grid"),
                             "custom constraint rows only apply on the training inputs; drop grid")
        return grid
    if X is None:
        raise InputError(cfg.path, 0, "[run] grid is required without a data file")
    return X


def _fmt(v):
    return repr(float(v))


def _write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _kv_text(pairs):
    return "".join(f"{k} = {v}\n" for k, v in pairs)


def _prediction_table(dist, grid, cfg):
    """Rows ``x..., mean, var, q05, q50, q95`` for a predictive law."""
    seed, budget = cfg.get("seed"), cfg.get("mc_budget")
    mean = dist.mean()
    cov, _ = dist.covariance(budget, seed)
    draws = dist.sample(budget, seed)
    q = np.quantile(draws, [0.05, 0.5, 0.95], axis=0)
    d = grid.shape[1]
    header = [f"x{i}" for i in range(1, d + 1)] + ["mean", "var", "q05", "q50", "q95"]
    rows = np.column_stack([grid, mean, np.clip(np.diag(cov), 0.0, None), q.T])
    return header, rows, mean


def _summary(cfg, command, dist, extra):
    Z = dist.normalizing_constant()
    pairs = [
        ("command", command),
        ("version", __version__),
        ("seed", cfg.get("seed")),
        ("mc_budget", cfg.get("mc_budget")),
        ("n_grid", dist.n),
        ("n_constraints", getattr(dist, "parent", dist).k),
        ("normalizing_constant", _fmt(Z.value)),
        ("normalizing_constant_error", _fmt(Z.error)),
    ]
    return pairs + list(extra)


def _out(cfg, args, key, default):
    if key == "output" and args.output:
        return Path(args.output)
    if key == "summary" and args.summary:
        return Path(args.summary)
    return cfg.resolve(cfg.run.get(key, default))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _require_data(args, cfg):
    if not args.data:
        raise InputError(cfg.path, 0, f"{args.command} needs --data")
    return args.data


def cmd_fit_regression(cfg, args):
    _need(cfg, "kernel")
    _need(cfg, "noise")
    X, y, _ = read_xy(_require_data(args, cfg), "y")
    grid = _prediction_grid(cfg, X)
    constraints = build_constraints(cfg, grid)
    data = inference.RegressionData(X, y, cfg.noise_var)
    dist = inference.regression_predictive(cfg.kernel, constraints, data, grid, qmc=cfg.qmc)
    header, rows, mean = _prediction_table(dist, grid, cfg)
    extra = [("n_train", len(y)), ("mean_violation", _fmt(cons.violation(dist.constraints, mean)))]
    _write_atomic(_out(cfg, args, "output", "predictions.csv"), _csv_text(header, rows))
    _write_atomic(_out(cfg, args, "summary", "summary.txt"), _kv_text(_summary(cfg, args.command, dist, extra)))


def cmd_fit_classification(cfg, args):
    _need(cfg, "kernel")
    path = _require_data(args, cfg)
    X, y, lines = read_xy(path, "y")
    for ln, v in zip(lines, y):
        if v not in (0.0, 1.0):
            raise InputError(Path(path), ln, f"label must be 0 or 1, got {v!r}")
    grid = _prediction_grid(cfg, X) if "grid" in cfg.run else X
    constraints = build_constraints(cfg, X)
    if constraints.k + len(y) > mvn.MAX_DIM:
        raise InputError(cfg.path, 0, f"{constraints.k} constraint rows plus {len(y)} labels exceed {mvn.MAX_DIM}")
    data = inference.ClassificationData(X, y)
    dist = inference.classification_predictive(cfg.kernel, constraints, data, grid, qmc=cfg.qmc)
    header, rows, mean = _prediction_table(dist, grid, cfg)
    extra = [("n_train", len(y))]
    if "prob_output" in cfg.run:
        p, se = inference.predictive_class_prob(dist, cfg.get("mc_budget"), cfg.get("seed"))
        d = grid.shape[1]
        ptext = _csv_text([f"x{i}" for i in range(1, d + 1)] + ["p", "p_se"], np.column_stack([grid, p, se]))
        _write_atomic(cfg.resolve(cfg.run["prob_output"]), ptext)
    _write_atomic(_out(cfg, args, "output", "predictions.csv"), _csv_text(header, rows))
    _write_atomic(_out(cfg, args, "summary", "summary.txt"), _kv_text(_summary(cfg, args.command, dist, extra)))


def cmd_sample(cfg, args):
    _need(cfg, "kernel")
    X = y = None
    if args.data:
        _need(cfg, "noise")
        X, y, _ = read_xy(args.data, "y")
    grid = _prediction_grid(cfg, X)
    constraints = build_constraints(cfg, grid)
    if X is None:
        dist = cgp.build(np.full(len(grid), cfg.kernel.mean), gram_matrix(cfg.kernel, grid),
                         constraints, qmc=cfg.qmc, grid=grid)
    else:
        data = inference.RegressionData(X, y, cfg.noise_var)
        dist = inference.regression_predictive(cfg.kernel, constraints, data, grid, qmc=cfg.qmc)
    draws = dist.sample(cfg.get("n_samples"), cfg.get("seed"))
    header = ["g@" + ";".join(_fmt(v) for v in row) for row in grid]
    _write_atomic(_out(cfg, args, "output", "samples.csv"), _csv_text(header, draws))


def cmd_diagnose(cfg, args):
    body = read_forecasts(_require_data(args, cfg))
    y, mu, sigma = body.T
    t_lo, t_hi = cfg.run.get("t_lo"), cfg.run.get("t_hi")
    lo, hi = diagnostics.default_interval(y)
    t_lo = lo if t_lo is None else t_lo
    t_hi = hi if t_hi is None else t_hi
    if np.any(y < t_lo) or np.any(y > t_hi):
        raise InputError(cfg.path, cfg.where("t_lo") or cfg.where("t_hi"),
                         "every observation must lie in [t_lo, t_hi]")
    s0 = diagnostics.gaussian_set(mu, sigma, y, t_lo, t_hi)
    s = s0.compose(diagnostics.recalibrate_pit(s0))
    report = diagnostics.excess_risk_report(s0, s, cfg.get("quad_points"))
    _write_atomic(_out(cfg, args, "output", "diagnostics.txt"), "\n".join(report.as_lines()) + "\n")


def _random_elements(cfg, prior, grid, eps, rng):
    """Random kernel-span centers shrunk until eps-feasible."""
    out = []
    for _ in range(cfg.get("n_checks")):
        alpha = rng.standard_normal(len(grid)) * 0.3
        e = theory.RkhsElement(grid, alpha, cfg.kernel)
        while cons.violation(prior.constraints, e.values()) > eps:
            alpha = alpha * 0.5
            e = theory.RkhsElement(grid, alpha, cfg.kernel)
        out.append(e)
    return out


def cmd_verify(cfg, args):
    _need(cfg, "kernel")
    eps = cfg.get("epsilon")
    if args.data:
        X, alpha, _ = read_xy(args.data, "alpha")
        if "grid" in cfg.run:
            raise InputError(cfg.path, cfg.where("grid"), "grid conflicts with the alpha file's points")
        grid = X
    else:
        grid = _prediction_grid(cfg, None)
    constraints = build_constraints(cfg, grid)
    prior = cgp.build(np.full(len(grid), cfg.kernel.mean), gram_matrix(cfg.kernel, grid),
                      constraints, qmc=cfg.qmc, grid=grid)
    if args.data:
        elements = [theory.RkhsElement(grid, alpha, cfg.kernel)]
    else:
        elements = _random_elements(cfg, prior, grid, eps, np.random.default_rng(cfg.get("seed")))
    rows = []
    for i, e in enumerate(elements):
        r = theory.shifted_ball_check(prior, e, eps, cfg.get("mc_budget"), cfg.get("seed") + i)
        rows.append([i, r.norm_sq, r.lhs, r.lhs_se, r.rhs, r.rhs_se, float(r.holds)])
    header = ["check", "norm_sq", "lhs", "lhs_se", "rhs", "rhs_se", "holds"]
    text = _csv_text(header, []) + "".join(
        f"{r[0]},{','.join(_fmt(v) for v in r[1:6])},{'true' if r[6] else 'false'}\n" for r in rows)
    _write_atomic(_out(cfg, args, "output", "verify.csv"), text)


_HANDLERS = {
    "fit-regression": cmd_fit_regression,
    "fit-classification": cmd_fit_classification,
    "sample": cmd_sample,
    "diagnose": cmd_diagnose,
    "verify": cmd_verify,
}


def _parser():
    p = argparse.ArgumentParser(prog="cgpkit", description="Constrained Gaussian process toolkit.")
    p.add_argument("--version", action="version", version=f"cgpkit {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="run configuration file")
    p.add_argument("--data", help="input CSV")
    p.add_argument("--output", help="override [run] output")
    p.add_argument("--summary", help="override [run] summary")
    return p


def run(argv=None, stderr=None):
    """Run one command; returns the exit status."""
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        _accel.thread_cap()
        cfg = parse_config(args.config)
        _HANDLERS[args.command](cfg, args)
    except NumericalError as exc:
        print(f"cgpkit: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except (CgpError, ValueError, OSError) as exc:
        print(f"cgpkit: error: {exc}", file=stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run())
