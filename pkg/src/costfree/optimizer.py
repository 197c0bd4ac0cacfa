"""Derivative-free maximization over box-constrained parameter vectors.

The search is a direction-set method: per iteration, one line maximization
along each current direction, then the direction list shifts left and the
net displacement of the iteration becomes the last direction, followed by
one extra line maximization along it (D+1 line maximizations per
iteration). It stops when the iterate moves less than ``epsilon`` in the
Euclidean norm or after ``max_iterations``. In one dimension a single line
maximization is the whole search.

The objectives this package cares about are piecewise constant in the
parameters (finitely many instances), so a parabolic line search alone can
stall on the plateau it starts from. Each line maximization therefore first
samples the feasible bracket at a fixed coarse grid to find the best
plateau, then lets Brent's method refine between that sample's neighbors.

Feasibility (a box per coordinate plus an optional strict upper bound on
the coordinate sum) is enforced by clipping the line-search interval, never
by penalty, so every objective value the search sees is meaningful. An
objective returning NaN is treated as negative infinity. Multiple restarts
from seeded uniform draws guard against local maxima; results are
bit-identical for a fixed seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParamSpace",
    "PowellConfig",
    "RestartRecord",
    "OptResult",
    "line_maximize",
    "powell_maximize",
]

# strict constraints (sum bound) are pulled in by this margin when clipping
_FEASIBILITY_MARGIN = 1e-9

# golden section constant for Brent's fallback steps
_GOLDEN = 0.3819660112501051


@dataclass(frozen=True)
class ParamSpace:
    """Axis-aligned box, optionally with a strict upper bound on the sum.

    ``lower`` and ``upper`` are inclusive per-coordinate bounds.
    ``sum_upper``, when set, requires sum(x) < sum_upper; the line-search
    clipping keeps a small margin inside it.
    """

    lower: np.ndarray
    upper: np.ndarray
    sum_upper: float | None = None

    def __post_init__(self) -> None:
        lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64)).copy()
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper bounds must be 1-d and equally long")
        if (upper < lower).any():
            raise ValueError("upper bounds must not be below lower bounds")
        if self.sum_upper is not None and float(lower.sum()) >= self.sum_upper:
            raise ValueError("the feasible region has zero volume under the sum bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])

    def contains(self, x: np.ndarray) -> bool:
        if (x < self.lower).any() or (x > self.upper).any():
            return False
        if self.sum_upper is not None and float(x.sum()) >= self.sum_upper:
            return False
        return True

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw from the box, rejection-sampled under the sum bound."""
        for _ in range(1000):
            x = rng.uniform(self.lower, self.upper)
            if self.sum_upper is None or float(x.sum()) < self.sum_upper - _FEASIBILITY_MARGIN:
                return x
        # box nearly fills the half-space: shrink a draw toward the lower
        # corner until the sum constraint holds
        x = rng.uniform(self.lower, self.upper)
        target = self.sum_upper - _FEASIBILITY_MARGIN - float(self.lower.sum())
        excess = float((x - self.lower).sum())
        if excess > 0 and target > 0:
            x = self.lower + (x - self.lower) * min(1.0, 0.5 * target / excess)
        return x

    def clip(self, x: np.ndarray) -> np.ndarray:
        """Snap a point into the feasible region.

        Rounding in x + t*d can overshoot a bound by an ulp even for a
        feasible step t; evaluation points pass through here so the
        objective only ever sees feasible arguments.
        """
        x = np.clip(x, self.lower, self.upper)
        if self.sum_upper is not None:
            room = self.sum_upper - _FEASIBILITY_MARGIN
            total = float(x.sum())
            if total > room:
                base = float(self.lower.sum())
                scale = (room - base) / (total - base) if total > base else 0.0
                x = self.lower + (x - self.lower) * max(scale, 0.0)
        return x

    def step_interval(self, x: np.ndarray, d: np.ndarray) -> tuple[float, float]:
        """Feasible step range [lo, hi] for x + t*d; may be empty (lo > hi)."""
        lo, hi = -math.inf, math.inf
        for i in range(self.dim):
            di = float(d[i])
            if di == 0.0:
                continue
            a = (float(self.lower[i]) - float(x[i])) / di
            b = (float(self.upper[i]) - float(x[i])) / di
            if a > b:
                a, b = b, a
            lo = max(lo, a)
            hi = min(hi, b)
        if self.sum_upper is not None:
            s = float(d.sum())
            room = self.sum_upper - _FEASIBILITY_MARGIN - float(x.sum())
            if s > 0.0:
                hi = min(hi, room / s)
            elif s < 0.0:
                lo = max(lo, room / s)
            elif room < 0.0:
                return 1.0, 0.0  # current point already outside: empty interval
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return 1.0, 0.0
        return lo, hi


@dataclass(frozen=True)
class PowellConfig:
    """Search hyperparameters.

    ``epsilon`` is the stopping tolerance on the per-iteration displacement
    norm, ``prescan_points`` the coarse-grid size of each line search, and
    ``brent_tol``/``brent_maxiter`` the one-dimensional refinement budget.
    """

    epsilon: float = 1e-4
    max_iterations: int = 50
    restarts: int = 8
    seed: int | None = None
    prescan_points: int = 32
    brent_tol: float = 1e-8
    brent_maxiter: int = 60

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.prescan_points < 3:
            raise ValueError("the coarse scan needs at least three points")


@dataclass(frozen=True)
class RestartRecord:
    start: np.ndarray
    end: np.ndarray
    objective: float
    iterations: int


@dataclass(frozen=True)
class OptResult:
    """Best point over all restarts plus the per-restart log."""

    best_params: np.ndarray
    best_objective: float
    restarts_log: tuple[RestartRecord, ...] = field(repr=False)


def _finite(fn, arg) -> float:
    """Evaluate fn(arg) with NaN mapped to negative infinity."""
    value = float(fn(arg))
    return -math.inf if math.isnan(value) else value


def _brent_max(g, a: float, b: float, tol: float, maxiter: int) -> tuple[float, float]:
    """Brent's method maximizing g on [a, b]; returns (argmax, value)."""
    if a > b:
        a, b = b, a
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = g(x)
    d = e = b - a
    for _ in range(maxiter):
        mid = 0.5 * (a + b)
        tol1 = tol * abs(x) + 1e-12
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(e) > tol1:
            # parabolic fit through x, w, v
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev = e
            e = d
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < mid else -tol1
                use_golden = False
        if use_golden:
            e = (b if x < mid else a) - x
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = g(u)
        if fu >= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu >= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu >= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def line_maximize(
    g,
    lo: float,
    hi: float,
    *,
    prescan_points: int = 32,
    brent_tol: float = 1e-8,
    brent_maxiter: int = 60,
) -> tuple[float, float]:
    """Maximize g over the step interval [lo, hi]; returns (step, value).

    A fixed coarse scan of the interval brackets the best plateau between
    the neighbors of the best sample; Brent's method then refines inside
    that bracket. A degenerate or empty interval returns step 0. NaN values
    count as negative infinity.
    """
    if not (hi > lo) or not (math.isfinite(lo) and math.isfinite(hi)):
        eta = min(max(0.0, lo), hi) if hi >= lo else 0.0
        return eta, _finite(g, eta)
    if hi - lo < 1e-14:
        eta = 0.5 * (lo + hi)
        return eta, _finite(g, eta)

    grid = np.linspace(lo, hi, prescan_points)
    values = np.array([_finite(g, float(t)) for t in grid])
    best = int(values.argmax())
    eta_grid = float(grid[best])
    val_grid = float(values[best])

    a = float(grid[max(best - 1, 0)])
    b = float(grid[min(best + 1, prescan_points - 1)])
    if b > a and math.isfinite(val_grid):
        eta_br, val_br = _brent_max(
            lambda t: _finite(g, t), a, b, brent_tol, brent_maxiter
        )
        if val_br > val_grid:
            return eta_br, val_br
    return eta_grid, val_grid


def powell_maximize(objective, space: ParamSpace, cfg: PowellConfig, trace_path=None) -> OptResult:
    """Maximize ``objective`` over ``space`` with seeded multi-restart.

    Each restart begins at a uniform feasible draw and runs the direction-set
    iteration; the best restart wins (ties keep the earlier restart). When
    ``trace_path`` is given, every accepted iterate is appended to a CSV
    with columns restart, iteration, one column per coordinate, objective.
    """
    rng = np.random.default_rng(cfg.seed)
    records: list[RestartRecord] = []
    best_x: np.ndarray | None = None
    best_val = -math.inf

    trace_rows: list[list] = []
    for restart in range(cfg.restarts):
        start = space.sample(rng)
        x, value, iterations = _powell_single(
            objective, space, cfg, start, restart, trace_rows
        )
        records.append(
            RestartRecord(start=start, end=x, objective=value, iterations=iterations)
        )
        if value > best_val:
            best_val = value
            best_x = x

    if trace_path is not None:
        _write_trace(trace_path, space.dim, trace_rows)

    assert best_x is not None
    return OptResult(
        best_params=best_x, best_objective=best_val, restarts_log=tuple(records)
    )


def _powell_single(objective, space, cfg, start, restart, trace_rows):
    x = np.array(start, dtype=np.float64)
    fx = _finite(objective, x)
    trace_rows.append([restart, 0, *x.tolist(), fx])

    if space.dim == 1:
        # one line maximization along the single axis is the whole search
        x, fx = _line_step(objective, space, x, fx, np.array([1.0]), cfg)
        trace_rows.append([restart, 1, *x.tolist(), fx])
        return x, fx, 1

    directions = np.eye(space.dim)
    iterations = 0
    for iteration in range(1, cfg.max_iterations + 1):
        iterations = iteration
        x_start = x.copy()
        for i in range(space.dim):
            x, fx = _line_step(objective, space, x, fx, directions[i], cfg)
        directions[:-1] = directions[1:]
        displacement = x - x_start
        directions[-1] = displacement
        x, fx = _line_step(objective, space, x, fx, displacement, cfg)
        trace_rows.append([restart, iteration, *x.tolist(), fx])
        if float(np.linalg.norm(x - x_start)) <= cfg.epsilon:
            break
    return x, fx, iterations


def _line_step(objective, space, x, fx, direction, cfg):
    """One line maximization from x along direction, clipped to feasibility."""
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return x, fx
    lo, hi = space.step_interval(x, direction)
    if lo > hi:
        return x, fx
    eta, value = line_maximize(
        lambda t: objective(space.clip(x + t * direction)),
        lo,
        hi,
        prescan_points=cfg.prescan_points,
        brent_tol=cfg.brent_tol,
        brent_maxiter=cfg.brent_maxiter,
    )
    if math.isnan(value) or value < fx:
        return x, fx
    return space.clip(x + eta * direction), value


def _write_trace(path, dim: int, rows) -> None:
    header = ["restart", "iteration", *[f"p{i + 1}" for i in range(dim)], "objective"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
