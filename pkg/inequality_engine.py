"""Both sides of the Hadamard-type inequalities for products of convex and
s-convex functions, with per-term breakdowns and three-valued verdicts.

Inequality ids:
    hh_left, hh_right  the two halves of the Hermite-Hadamard inequality
    t1                 product of two convex functions
    t2                 convex f times s-convex g
    t3                 s1-convex f times s2-convex g
    c29                midpoint corollary of t3 at s1 = s2 = 1
"""
import logging
import math
from fractions import Fraction
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from errors import DomainError
from function_model import evaluate, evaluate_array
from quadrature import WeightKind, integrate, product_integrate
from special_functions import beta_2_splus1, beta_cross

logger = logging.getLogger(__name__)

DEFAULT_SLACK_TOL = 1e-9
# Quadrature runs this much tighter than the verdict tolerance
QUAD_TOL_FACTOR = 0.1
PROOF_STEP_POINTS = 1001

InequalityId = Literal["hh_left", "hh_right", "t1", "t2", "t3", "c29"]
Verdict = Literal["holds", "violated", "inconclusive"]
INEQUALITY_IDS = ("hh_left", "hh_right", "t1", "t2", "t3", "c29")


class MNTerms(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: float
    n: float


class InequalityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    inequality_id: InequalityId
    lhs: float
    rhs: float
    slack: float
    terms: dict[str, float]
    quad_error_budget: float
    tolerance: float
    verdict: Verdict
    converged: bool = True
    parameters: dict[str, float] = {}
    exact_slack: Optional[str] = None


def decide(slack, tolerance, budget, converged=True):
    if not converged:
        return "inconclusive"
    if slack >= -tolerance:
        return "holds"
    if slack < -(tolerance + budget):
        return "violated"
    return "inconclusive"


def _report(inequality_id, lhs, rhs, terms, budget, tol, converged, parameters=None, exact_slack=None,
            slack=None):
    if slack is None:
        slack = rhs - lhs
    verdict = decide(slack, tol, budget, converged)
    if verdict != "holds":
        logger.info("%s: %s with slack %.3e (budget %.1e)", inequality_id, verdict, slack, budget)
    return InequalityReport(
        inequality_id=inequality_id,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        terms=terms,
        quad_error_budget=budget,
        tolerance=tol,
        verdict=verdict,
        converged=converged,
        parameters=parameters or {},
        exact_slack=exact_slack,
    )


def _endpoint_values(spec, interval):
    return evaluate(spec, interval.a), evaluate(spec, interval.b)


def mn_terms(f, g, interval):
    """M = f(a)g(a) + f(b)g(b) and N = f(a)g(b) + f(b)g(a)."""
    fa, fb = _endpoint_values(f, interval)
    ga, gb = _endpoint_values(g, interval)
    return MNTerms(m=fa * ga + fb * gb, n=fa * gb + fb * ga)


def _check_exponent(s, name):
    if not math.isfinite(s) or not 0 < s <= 1:
        raise DomainError(f"{name} must lie in (0, 1], got {s!r}")


def eval_hermite_hadamard(f, interval, tol=DEFAULT_SLACK_TOL):
    """Reports for f((a+b)/2) <= mean(f) and mean(f) <= (f(a) + f(b)) / 2."""
    length = interval.length
    estimate = integrate(f, interval, tol=tol * QUAD_TOL_FACTOR)
    mean = estimate.value / length
    budget = estimate.error_estimate / length
    midpoint = evaluate(f, interval.midpoint)
    fa, fb = _endpoint_values(f, interval)
    endpoint_average = (fa + fb) / 2
    terms = {"midpoint": midpoint, "mean": mean, "endpoint_average": endpoint_average}

    left = _report("hh_left", midpoint, mean, terms, budget, tol, estimate.converged)
    right = _report("hh_right", mean, endpoint_average, terms, budget, tol, estimate.converged)
    return left, right


def _product_inequality(inequality_id, f, s1, g, s2, interval, tol, m_divisor, n_coefficient):
    """Shared core of t1, t2 and t3.

    LHS = f(a)/L^(s1+1) * int (b-x)^s1 g + f(b)/L^(s1+1) * int (x-a)^s1 g
        + g(a)/L^(s2+1) * int (b-x)^s2 f + g(b)/L^(s2+1) * int (x-a)^s2 f
    RHS = mean(fg) + M / m_divisor + N * n_coefficient
    """
    quad_tol = tol * QUAD_TOL_FACTOR
    length = interval.length
    fa, fb = _endpoint_values(f, interval)
    ga, gb = _endpoint_values(g, interval)
    mn = MNTerms(m=fa * ga + fb * gb, n=fa * gb + fb * ga)

    terms = {}
    budget = 0.0
    converged = True
    weighted = (
        ("f_a_left", fa, g, WeightKind.left_power(s1), s1),
        ("f_b_right", fb, g, WeightKind.right_power(s1), s1),
        ("g_a_left", ga, f, WeightKind.left_power(s2), s2),
        ("g_b_right", gb, f, WeightKind.right_power(s2), s2),
    )
    for name, coefficient, h, weight, sigma in weighted:
        prefactor = coefficient / length ** (sigma + 1)
        estimate = integrate(h, interval, weight=weight, tol=quad_tol)
        terms[name] = prefactor * estimate.value
        budget += abs(prefactor) * estimate.error_estimate
        converged = converged and estimate.converged

    product = product_integrate(f, g, interval, tol=quad_tol)
    terms["mean_fg"] = product.value / length
    budget += product.error_estimate / length
    converged = converged and product.converged

    terms["M"] = mn.m
    terms["N"] = mn.n
    terms["m_contribution"] = mn.m / m_divisor
    terms["n_contribution"] = mn.n * n_coefficient

    lhs = terms["f_a_left"] + terms["f_b_right"] + terms["g_a_left"] + terms["g_b_right"]
    rhs = terms["mean_fg"] + terms["m_contribution"] + terms["n_contribution"]
    return _report(inequality_id, lhs, rhs, terms, budget, tol, converged,
                   parameters={"s1": s1, "s2": s2})


def eval_t1(f, g, interval, tol=DEFAULT_SLACK_TOL):
    """Product of two convex functions: RHS = mean(fg) + M/3 + N/6."""
    return _product_inequality("t1", f, 1.0, g, 1.0, interval, tol, 3.0, 1.0 / 6.0)


def eval_t2(f, g, s, interval, tol=DEFAULT_SLACK_TOL):
    """Convex f, s-convex g: RHS = mean(fg) + M/(s+2) + N/((s+1)(s+2))."""
    s = float(s)
    _check_exponent(s, "s")
    interval.require_nonnegative()
    return _product_inequality("t2", f, 1.0, g, s, interval, tol, s + 2.0, beta_2_splus1(s))


def eval_t3(f, s1, g, s2, interval, tol=DEFAULT_SLACK_TOL):
    """s1-convex f, s2-convex g: RHS = mean(fg) + M/(s1+s2+1) + N * B(s1+1, s2+1)."""
    s1, s2 = float(s1), float(s2)
    _check_exponent(s1, "s1")
    _check_exponent(s2, "s2")
    interval.require_nonnegative()
    return _product_inequality("t3", f, s1, g, s2, interval, tol, s1 + s2 + 1.0, beta_cross(s1, s2))


def eval_c29(f, g, interval, tol=DEFAULT_SLACK_TOL):
    """Midpoint corollary, evaluated in exact rational arithmetic on the
    floating-point function values; needs no quadrature."""
    fa, fb = (Fraction(v) for v in _endpoint_values(f, interval))
    ga, gb = (Fraction(v) for v in _endpoint_values(g, interval))
    f_mid = Fraction(evaluate(f, interval.midpoint))
    g_mid = Fraction(evaluate(g, interval.midpoint))
    m = fa * ga + fb * gb
    n = fa * gb + fb * ga

    lhs = (fa + fb) / 2 * g_mid + (ga + gb) / 2 * f_mid
    rhs = f_mid * g_mid + m / 3 + n / 6
    exact = rhs - lhs
    terms = {
        "f_mid": float(f_mid),
        "g_mid": float(g_mid),
        "cross_mid": float(f_mid * g_mid),
        "M": float(m),
        "N": float(n),
        "m_contribution": float(m / 3),
        "n_contribution": float(n / 6),
    }
    return _report("c29", float(lhs), float(rhs), terms, 0.0, tol, True,
                   exact_slack=str(exact), slack=float(exact))


def eval_inequality(inequality_id, f, g, interval, s1=1.0, s2=1.0, tol=DEFAULT_SLACK_TOL):
    """Dispatch by id. t2 takes its s from s2, the exponent of g."""
    if inequality_id in ("hh_left", "hh_right"):
        left, right = eval_hermite_hadamard(f, interval, tol)
        return left if inequality_id == "hh_left" else right
    elif inequality_id == "t1":
        return eval_t1(f, g, interval, tol)
    elif inequality_id == "t2":
        return eval_t2(f, g, s2, interval, tol)
    elif inequality_id == "t3":
        return eval_t3(f, s1, g, s2, interval, tol)
    elif inequality_id == "c29":
        return eval_c29(f, g, interval, tol)
    raise DomainError(f"unknown inequality id {inequality_id!r}")


def proof_step_pointwise(f, g, s1, s2, t, interval):
    """(A - f(u)) * (B - g(u)) at u = t a + (1 - t) b, where
    A = t^s1 f(a) + (1-t)^s1 f(b) and B = t^s2 g(a) + (1-t)^s2 g(b).

    This is the pointwise gap the product inequalities integrate over t; it is
    nonnegative whenever f and g belong to their classes. t may be an array.
    """
    _check_exponent(s1, "s1")
    _check_exponent(s2, "s2")
    if min(s1, s2) < 1:
        interval.require_nonnegative()
    a, b = interval.a, interval.b
    t = np.asarray(t, dtype=float)
    fa, fb = _endpoint_values(f, interval)
    ga, gb = _endpoint_values(g, interval)
    u = t * a + (1 - t) * b
    big_a = np.power(t, s1) * fa + np.power(1 - t, s1) * fb
    big_b = np.power(t, s2) * ga + np.power(1 - t, s2) * gb
    gap = (big_a - evaluate_array(f, u)) * (big_b - evaluate_array(g, u))
    return float(gap) if gap.ndim == 0 else gap


def integrated_proof_step(f, g, s1, s2, interval, points=PROOF_STEP_POINTS):
    """Trapezoid integral over t in [0, 1] of proof_step_pointwise."""
    t = np.linspace(0.0, 1.0, points)
    return float(np.trapezoid(proof_step_pointwise(f, g, s1, s2, t, interval), t))
