import logging
import math
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from errors import DomainError
from function_model import UNIT_INTERVAL, Interval, breakpoints, evaluate_array

logger = logging.getLogger(__name__)

NODES_PER_PANEL = 16
INITIAL_PANELS = 4
MAX_PANELS = 2 ** 14
DEFAULT_TOL = 1e-10
# Order of the endpoint grading u -> u^q / (u^q + (1-u)^q)
GRADING_POWER = 4

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(NODES_PER_PANEL)


class WeightKind(BaseModel):
    """Power weight on an integral: left_power is (b-x)^e, right_power is (x-a)^e."""
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    kind: Literal["none", "left_power", "right_power"] = "none"
    exponent: Optional[float] = None

    @model_validator(mode="after")
    def _exponent_matches_kind(self):
        if self.kind == "none":
            if self.exponent is not None:
                raise ValueError("an unweighted integral takes no exponent")
        elif self.exponent is None or not 0 < self.exponent <= 1:
            raise ValueError(f"{self.kind} weight needs an exponent in (0, 1], got {self.exponent}")
        return self

    @classmethod
    def left_power(cls, exponent):
        return cls(kind="left_power", exponent=exponent)

    @classmethod
    def right_power(cls, exponent):
        return cls(kind="right_power", exponent=exponent)


NO_WEIGHT = WeightKind()


class QuadratureEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    error_estimate: float
    panels: int
    converged: bool
    levels: int
    history: tuple[float, ...] = ()


@lru_cache(maxsize=None)
def _graded_rule(panels, grading=GRADING_POWER):
    """Nodes and weights of one refinement level on the unit grading variable.

    Returns the left and right distances psi(u), psi(1-u) and the Jacobian
    weight; both distances come straight from u and 1-u so neither loses
    precision near its endpoint.
    """
    half_left = (1.0 + _GAUSS_NODES) / 2
    half_right = (1.0 - _GAUSS_NODES) / 2
    index = np.arange(panels)[:, None]
    u = ((index + half_left) / panels).ravel()
    v = ((panels - 1 - index + half_right) / panels).ravel()
    weights = np.tile(_GAUSS_WEIGHTS / (2 * panels), panels)

    q = grading
    uq = u ** q
    vq = v ** q
    denom = uq + vq
    left = uq / denom
    right = vq / denom
    jacobian = weights * q * u ** (q - 1) * v ** (q - 1) / denom ** 2
    for array in (left, right, jacobian):
        array.flags.writeable = False
    return left, right, jacobian


def _level_value(integrand, interval, pieces, panels, grading):
    left, right, weights = _graded_rule(panels, grading)
    total = 0.0
    for piece in pieces:
        length = piece.length
        da = length * left
        db = length * right
        x = np.where(da <= db, piece.a + da, piece.b - db)
        # Distances are measured to the outer interval's endpoints
        values = integrand(x, (piece.a - interval.a) + da, (interval.b - piece.b) + db)
        total += length * np.sum(weights * values)
    return float(total)


def _pieces(interval, cuts):
    edges = [interval.a, *sorted(set(c for c in cuts if interval.a < c < interval.b)), interval.b]
    return [Interval(a=lo, b=hi) for lo, hi in zip(edges, edges[1:])]


def integrate_with_distances(integrand, interval, tol=DEFAULT_TOL, cuts=(), grading=GRADING_POWER):
    """Integrate integrand(x, x - a, b - x) over the interval.

    Composite Gauss-Legendre on uniform panels of a graded variable, split at
    the given cut points, doubling the panel count until two successive
    levels agree to within tol or MAX_PANELS is reached. A grading power q
    turns an endpoint factor d^p into roughly u^(q(p+1) - 1), so integrable
    singularities (p > -1) need q large enough to make that exponent smooth.
    """
    if not tol > 0:
        raise DomainError(f"quadrature tolerance must be positive, got {tol}")
    pieces = _pieces(interval, cuts)

    panels = INITIAL_PANELS
    value = _level_value(integrand, interval, pieces, panels, grading)
    history = []
    while True:
        panels *= 2
        finer = _level_value(integrand, interval, pieces, panels, grading)
        error = abs(finer - value)
        history.append(error)
        value = finer
        logger.debug("quadrature level %d: panels=%d value=%r error=%.3e",
                     len(history), panels * len(pieces), value, error)
        if error <= tol or panels >= MAX_PANELS or not math.isfinite(error):
            break

    converged = error <= tol
    if not converged:
        logger.info("quadrature on %s stopped at %d panels with error %.3e > %.1e",
                    interval, panels * len(pieces), error, tol)
    return QuadratureEstimate(
        value=value,
        error_estimate=error if math.isfinite(error) else math.inf,
        panels=panels * len(pieces),
        converged=converged,
        levels=len(history) + 1,
        history=tuple(history),
    )


def _weighted(values_of, weight):
    if weight.kind == "none":
        return lambda x, da, db: values_of(x)
    exponent = weight.exponent
    if weight.kind == "left_power":
        return lambda x, da, db: np.power(db, exponent) * values_of(x)
    return lambda x, da, db: np.power(da, exponent) * values_of(x)


def integrate(f, interval, weight=NO_WEIGHT, tol=DEFAULT_TOL, cuts=()):
    """Integral of f over the interval, optionally against a power weight.

    f is either a FunctionSpec, whose kinks become cut points, or a
    vectorized callable of x.
    """
    if hasattr(f, "kind"):
        spec = f
        cuts = tuple(cuts) + breakpoints(spec, interval)
        values_of = lambda x: evaluate_array(spec, x)
    else:
        values_of = f
    return integrate_with_distances(_weighted(values_of, weight), interval, tol=tol, cuts=cuts)


def product_integrate(f, g, interval, tol=DEFAULT_TOL):
    """Integral of f(x) * g(x) over the interval, for two FunctionSpecs."""
    return integrate(
        lambda x: evaluate_array(f, x) * evaluate_array(g, x),
        interval,
        tol=tol,
        cuts=breakpoints(f, interval) + breakpoints(g, interval),
    )


def t_form_integral(spec, sigma, interval, side="a", tol=DEFAULT_TOL):
    """Integral over t in [0, 1] of w(t) * h(t a + (1 - t) b).

    w(t) is t^sigma for side "a" and (1 - t)^sigma for side "b"; this is the
    form the product inequalities take before substituting x = t a + (1 - t) b.
    """
    a, b = interval.a, interval.b
    if side == "a":
        weight = WeightKind.right_power(sigma)
    elif side == "b":
        weight = WeightKind.left_power(sigma)
    else:
        raise DomainError(f"side must be 'a' or 'b', got {side!r}")
    # A kink at x = c sits at t = (b - c) / (b - a)
    cuts = tuple((b - c) / (b - a) for c in breakpoints(spec, interval))
    return integrate(
        lambda t: evaluate_array(spec, t * a + (1 - t) * b),
        UNIT_INTERVAL,
        weight=weight,
        tol=tol,
        cuts=cuts,
    )
