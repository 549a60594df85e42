"""Sampled membership checks for convexity, s-convexity and nonnegativity.

A counterexample verdict carries a concrete witness that re-evaluates to a
violation. A no_violation_found verdict only records how hard we looked.
"""
import logging
import math
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import DomainError
from function_model import Interval, derive_stream, evaluate, evaluate_array

logger = logging.getLogger(__name__)

DEFAULT_T_POINTS = 101
DEFAULT_PAIR_SAMPLES = 200
GRID_POINTS = 17
DEFAULT_NONNEG_POINTS = 1001
REL_TOL = 1e-10
NONNEG_TOL = 1e-12
# Odd-numbered random pairs sit at a + L * 10^(-u * LOG_DEPTH), crowding toward a
LOG_DEPTH = 12

# Unit-interval x-grid: the endpoints, dyadic points crowding toward the
# left end, and a few interior points
_DYADIC_GRID = np.array(sorted({0.0, *(2.0 ** -k for k in range(12)), 0.375, 0.625, 0.75, 0.875}))
assert len(_DYADIC_GRID) == GRID_POINTS


class Resolution(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    t_points: int = Field(DEFAULT_T_POINTS, ge=2)
    pair_samples: int = Field(DEFAULT_PAIR_SAMPLES, ge=0)

    @classmethod
    def parse(cls, text):
        try:
            t_points, pair_samples = (int(part) for part in text.split(","))
            return cls(t_points=t_points, pair_samples=pair_samples)
        except ValueError as e:
            raise DomainError(f"invalid resolution {text!r}: {e}") from e


class Witness(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    t: float
    lhs: float
    rhs: float
    violation: float


class CertificationVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    outcome: Literal["counterexample", "no_violation_found"]
    check: Literal["convex", "s_convex", "nonnegative"]
    interval: Interval
    s: Optional[float] = None
    witness: Optional[Witness] = None
    resolution: Resolution
    grid_points: int
    seed: int

    @property
    def passed(self):
        return self.outcome == "no_violation_found"

    def describe(self):
        where = f"on {self.interval}"
        if self.passed:
            return f"{self.check}: no violation found {where}"
        w = self.witness
        return (f"{self.check}: counterexample {where} at x={w.x!r}, y={w.y!r}, t={w.t!r} "
                f"(lhs={w.lhs!r} > rhs={w.rhs!r})")


def _check_s(s):
    if not math.isfinite(s) or not 0 < s <= 1:
        raise DomainError(f"s must lie in (0, 1], got {s!r}")


@lru_cache(maxsize=64)
def _sample_pairs(interval, pair_samples, seed):
    """Deterministic grid pairs plus seeded random pairs, as read-only arrays.

    Row-major draws: a larger sample extends a smaller one. Even rows are
    uniform on the interval, odd rows are log-spaced toward a, where
    violations of the piecewise power family live when |c_off| is small.
    """
    grid = interval.a + interval.length * _DYADIC_GRID
    gi, gj = np.meshgrid(np.arange(GRID_POINTS), np.arange(GRID_POINTS), indexing="ij")
    off_diagonal = gi != gj
    xs = [grid[gi[off_diagonal]]]
    ys = [grid[gj[off_diagonal]]]

    if pair_samples:
        rng = derive_stream(seed)
        draws = rng.random((pair_samples, 2))
        log_rows = (np.arange(pair_samples) % 2 == 1)[:, None]
        offsets = np.where(log_rows, 10.0 ** (-LOG_DEPTH * draws), draws)
        pairs = interval.a + interval.length * offsets
        rx, ry = pairs[:, 0], pairs[:, 1]
        distinct = rx != ry
        xs.append(rx[distinct])
        ys.append(ry[distinct])

    x, y = np.concatenate(xs), np.concatenate(ys)
    x.flags.writeable = False
    y.flags.writeable = False
    return x, y


def _segment_check(spec, interval, s, resolution, seed, check):
    t = np.linspace(0.0, 1.0, resolution.t_points)
    x, y = _sample_pairs(interval, resolution.pair_samples, seed)

    tt = t[None, :]
    xx = x[:, None]
    yy = y[:, None]
    lhs = evaluate_array(spec, tt * xx + (1 - tt) * yy)
    rhs = (np.power(tt, s) * evaluate_array(spec, x)[:, None]
           + np.power(1 - tt, s) * evaluate_array(spec, y)[:, None])
    violation = lhs - rhs
    exceeding = violation > REL_TOL * (1 + np.abs(rhs))

    witness = None
    if np.any(exceeding):
        worst = np.unravel_index(np.argmax(np.where(exceeding, violation, -np.inf)), violation.shape)
        i, k = worst
        witness = Witness(
            x=float(x[i]), y=float(y[i]), t=float(t[k]),
            lhs=float(lhs[worst]), rhs=float(rhs[worst]), violation=float(violation[worst]),
        )

    verdict = CertificationVerdict(
        outcome="no_violation_found" if witness is None else "counterexample",
        check=check,
        interval=interval,
        s=s if check == "s_convex" else None,
        witness=witness,
        resolution=resolution,
        grid_points=GRID_POINTS,
        seed=seed,
    )
    logger.debug(verdict.describe())
    return verdict


def check_convex(spec, interval, resolution=None, seed=0):
    """Search for violations of f(tx + (1-t)y) <= t f(x) + (1-t) f(y)."""
    return _segment_check(spec, interval, 1.0, resolution or Resolution(), seed, "convex")


def check_s_convex(spec, s, interval, resolution=None, seed=0):
    """Search for violations of f(tx + (1-t)y) <= t^s f(x) + (1-t)^s f(y)."""
    s = float(s)
    _check_s(s)
    interval.require_nonnegative()
    return _segment_check(spec, interval, s, resolution or Resolution(), seed, "s_convex")


def check_nonnegative(spec, interval, grid_points=DEFAULT_NONNEG_POINTS):
    interval.require_nonnegative()
    if grid_points < 2:
        raise DomainError(f"grid_points must be at least 2, got {grid_points}")
    xs = np.linspace(interval.a, interval.b, grid_points)
    values = evaluate_array(spec, xs)
    lowest = int(np.argmin(values))

    witness = None
    if values[lowest] < -NONNEG_TOL:
        x = float(xs[lowest])
        witness = Witness(x=x, y=x, t=1.0, lhs=0.0, rhs=float(values[lowest]),
                          violation=-float(values[lowest]))
    return CertificationVerdict(
        outcome="no_violation_found" if witness is None else "counterexample",
        check="nonnegative",
        interval=interval,
        witness=witness,
        resolution=Resolution(t_points=2, pair_samples=0),
        grid_points=grid_points,
        seed=0,
    )


def recheck_witness(spec, verdict):
    """Re-evaluate a counterexample from scratch; True if it still violates."""
    w = verdict.witness
    if w is None:
        return False
    if verdict.check == "nonnegative":
        return evaluate(spec, w.x) < -NONNEG_TOL

    s = verdict.s if verdict.check == "s_convex" else 1.0
    lhs = evaluate(spec, w.t * w.x + (1 - w.t) * w.y)
    rhs = w.t ** s * evaluate(spec, w.x) + (1 - w.t) ** s * evaluate(spec, w.y)
    return lhs - rhs > REL_TOL * (1 + abs(rhs))
