import math

import numpy as np
import pytest

from certification import check_convex, check_s_convex
from errors import DomainError
from function_model import Affine, Constant, Interval, Polynomial, PowerS, random_convex, random_s_convex, x_power
from inequality_engine import (
    DEFAULT_SLACK_TOL,
    decide,
    eval_c29,
    eval_hermite_hadamard,
    eval_inequality,
    eval_t1,
    eval_t2,
    eval_t3,
    integrated_proof_step,
    mn_terms,
    proof_step_pointwise,
)

ONE = Constant(value=1.0)
X = Affine(slope=1.0, offset=0.0)
ONE_MINUS_X = Affine(slope=-1.0, offset=1.0)
XSQ = Polynomial(coefficients=(0.0, 0.0, 1.0))


def certified_convex_pairs(interval, count):
    pairs = []
    seed = 0
    while len(pairs) < count:
        f = random_convex(2 * seed, 3, interval)
        g = random_convex(2 * seed + 1, 3, interval)
        seed += 1
        if check_convex(f, interval).passed and check_convex(g, interval).passed:
            pairs.append((f, g))
    return pairs


def test_decide_three_ways():
    assert decide(0.0, 1e-9, 0.0) == "holds"
    assert decide(-5e-10, 1e-9, 1e-6) == "holds"
    assert decide(-1.2e-9, 1e-9, 5e-10) == "inconclusive"
    assert decide(-2e-9, 1e-9, 5e-10) == "violated"
    assert decide(1.0, 1e-9, 0.0, converged=False) == "inconclusive"


def test_mn_terms(unit):
    terms = mn_terms(X, ONE_MINUS_X, unit)
    assert (terms.m, terms.n) == (0.0, 1.0)
    assert mn_terms(ONE_MINUS_X, X, unit) == terms


def test_hermite_hadamard_examples(unit):
    for f in (ONE, X):
        left, right = eval_hermite_hadamard(f, unit)
        assert left.slack == pytest.approx(0.0, abs=1e-9)
        assert right.slack == pytest.approx(0.0, abs=1e-9)
        assert left.verdict == right.verdict == "holds"

    left, right = eval_hermite_hadamard(XSQ, unit)
    assert left.terms["midpoint"] == 0.25
    assert left.terms["mean"] == pytest.approx(1 / 3, abs=1e-10)
    assert right.terms["endpoint_average"] == 0.5
    assert left.slack == pytest.approx(1 / 12, abs=1e-9)
    assert right.slack == pytest.approx(1 / 6, abs=1e-9)


def test_hermite_hadamard_catches_concave(spec, unit):
    left, right = eval_hermite_hadamard(spec("neg_xsq"), unit)
    assert left.verdict == "violated"
    assert right.verdict == "violated"


def test_t1_closed_forms(unit):
    constants = eval_t1(ONE, ONE, unit)
    assert (constants.lhs, constants.rhs) == pytest.approx((2.0, 2.0), abs=1e-9)

    affine = eval_t1(X, ONE_MINUS_X, unit)
    assert affine.lhs == pytest.approx(1 / 3, abs=1e-9)
    assert affine.slack == pytest.approx(0.0, abs=1e-9)
    assert affine.verdict == "holds"

    squares = eval_t1(XSQ, XSQ, unit)
    assert squares.lhs == pytest.approx(0.5, abs=1e-9)
    assert squares.rhs == pytest.approx(8 / 15, abs=1e-9)
    assert squares.slack == pytest.approx(1 / 30, abs=1e-9)
    assert squares.terms["M"] == 1.0
    assert squares.terms["N"] == 0.0
    assert squares.tolerance == DEFAULT_SLACK_TOL


def test_t1_report_serializes(unit):
    report = eval_t1(XSQ, XSQ, unit)
    data = report.model_dump(mode="json")
    assert data["inequality_id"] == "t1"
    assert set(data["terms"]) >= {"f_a_left", "f_b_right", "g_a_left", "g_b_right", "mean_fg"}
    assert data["parameters"] == {"s1": 1.0, "s2": 1.0}


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75, 1.0])
def test_t2_constants_equality(s, unit):
    report = eval_t2(ONE, ONE, s, unit)
    assert report.lhs == pytest.approx(1 + 2 / (s + 1), abs=1e-9)
    assert report.slack == pytest.approx(0.0, abs=1e-9)


def test_t2_closed_forms(spec, unit):
    extremal = eval_t2(XSQ, x_power(1.0, 0.5), 0.5, unit)
    assert extremal.lhs == pytest.approx(24 / 35, abs=1e-8)
    assert extremal.slack == pytest.approx(0.0, abs=1e-8)

    strict = eval_t2(spec("xsq"), spec("sqrt_plus1"), 0.5, unit)
    assert strict.lhs == pytest.approx(341 / 210, abs=1e-8)
    assert strict.rhs == pytest.approx(354 / 210, abs=1e-8)
    assert strict.slack == pytest.approx(13 / 210, abs=1e-8)
    assert strict.verdict == "holds"


def test_t2_affine_f_is_tight(unit):
    for seed in range(10):
        g = random_s_convex(seed, 0.5, 2)
        assert check_s_convex(g, 0.5, unit).passed
        report = eval_t2(Affine(slope=0.7, offset=-0.2), g, 0.5, unit)
        assert report.slack == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("gamma,s", [(1.0, 0.3), (2.5, 0.5), (0.5, 0.9)])
def test_t2_power_g_from_zero_is_tight(gamma, s, spec):
    report = eval_t2(spec("kink_plus_exp"), x_power(gamma, s), s, Interval(a=0.0, b=1.5))
    assert report.slack == pytest.approx(0.0, abs=1e-8)


def test_t2_requires_nonnegative_interval():
    with pytest.raises(DomainError):
        eval_t2(ONE, ONE, 0.5, Interval(a=-1.0, b=1.0))
    with pytest.raises(DomainError):
        eval_t2(ONE, ONE, 0.0, Interval(a=0.0, b=1.0))


def test_t3_closed_forms(unit):
    report = eval_t3(ONE, 0.5, ONE, 0.5, unit)
    assert report.lhs == pytest.approx(8 / 3, abs=1e-9)
    assert report.rhs == pytest.approx(2 + math.pi / 4, abs=1e-9)
    assert report.slack == pytest.approx(2 + math.pi / 4 - 8 / 3, abs=1e-8)

    reduced = eval_t3(ONE, 1.0, ONE, 1.0, unit)
    assert (reduced.lhs, reduced.rhs) == pytest.approx((2.0, 2.0), abs=1e-9)


def test_t3_swap_symmetry(spec, unit):
    f, g = spec("xsq"), spec("sqrt_plus1")
    forward = eval_t3(f, 0.8, g, 0.5, unit)
    swapped = eval_t3(g, 0.5, f, 0.8, unit)
    assert swapped.lhs == pytest.approx(forward.lhs, abs=1e-12)
    assert swapped.rhs == pytest.approx(forward.rhs, abs=1e-12)
    assert swapped.slack == pytest.approx(forward.slack, abs=1e-12)


@pytest.mark.parametrize("interval", [Interval(a=0.0, b=1.0), Interval(a=0.5, b=3.0)])
def test_reductions_to_t1(interval):
    for f, g in certified_convex_pairs(interval, 20):
        base = eval_t1(f, g, interval)
        for other in (eval_t2(f, g, 1.0, interval), eval_t3(f, 1.0, g, 1.0, interval)):
            assert other.lhs == pytest.approx(base.lhs, abs=1e-8)
            assert other.rhs == pytest.approx(base.rhs, abs=1e-8)
            for name, value in base.terms.items():
                assert other.terms[name] == pytest.approx(value, abs=1e-8)


def test_c29_examples(unit):
    constants = eval_c29(ONE, ONE, unit)
    assert constants.slack == 0.0
    assert constants.exact_slack == "0"

    same = eval_c29(X, X, unit)
    assert same.lhs == 0.5
    assert same.rhs == pytest.approx(7 / 12, rel=1e-15)
    assert same.exact_slack == "1/12"

    opposite = eval_c29(X, ONE_MINUS_X, unit)
    assert opposite.lhs == 0.5
    assert opposite.exact_slack == "-1/12"
    assert opposite.slack == pytest.approx(-1 / 12, rel=1e-15)
    assert opposite.quad_error_budget == 0.0
    assert opposite.verdict == "violated"


def test_eval_inequality_dispatch(unit):
    assert eval_inequality("hh_left", XSQ, None, unit).inequality_id == "hh_left"
    assert eval_inequality("hh_right", XSQ, None, unit).inequality_id == "hh_right"
    t2 = eval_inequality("t2", XSQ, x_power(1.0, 0.5), unit, s2=0.5)
    assert t2.parameters == {"s1": 1.0, "s2": 0.5}
    with pytest.raises(DomainError):
        eval_inequality("t9", XSQ, XSQ, unit)


def test_non_convergence_is_inconclusive(unit, monkeypatch):
    monkeypatch.setattr("quadrature.MAX_PANELS", 8)
    report = eval_t2(ONE, x_power(1.0, 0.1), 0.1, unit, tol=1e-12)
    assert not report.converged
    assert report.verdict == "inconclusive"


def test_proof_step_examples(unit):
    assert proof_step_pointwise(ONE, ONE, 0.5, 0.5, 0.5, unit) == pytest.approx((2 ** 0.5 - 1) ** 2, rel=1e-12)
    t = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(proof_step_pointwise(X, XSQ, 1.0, 1.0, t, unit), 0.0, atol=1e-15)
    for f, g in ((XSQ, XSQ), (ONE, XSQ)):
        endpoints = proof_step_pointwise(f, g, 1.0, 1.0, np.array([0.0, 1.0]), unit)
        np.testing.assert_allclose(endpoints, 0.0, atol=1e-15)


def test_proof_step_nonnegative_on_certified_inputs(unit):
    t = np.linspace(0.0, 1.0, 101)
    for seed in range(100):
        s1, s2 = 0.25 + 0.75 * ((seed * 37) % 100) / 100, 0.25 + 0.75 * ((seed * 61) % 100) / 100
        f = random_s_convex(2 * seed, s1, 3)
        g = random_s_convex(2 * seed + 1, s2, 3)
        assert np.all(proof_step_pointwise(f, g, s1, s2, t, unit) >= -1e-12)


PROOF_STEP_CASES = [
    ("const1", "const1", 0.75, 0.75),
    ("const1", "const1", 1.0, 1.0),
    ("xsq", "xsq", 1.0, 1.0),
    ("xsq", "const1", 0.75, 1.0),
    ("xsq", "sqrt_plus1", 1.0, 1.0),
    ("xsq", "sqrt_plus1", 0.75, 0.75),
    ("sqrt_plus1", "sqrt_plus1", 1.0, 1.0),
    ("sqrt_plus1", "const1", 0.75, 1.0),
    ("x", "sqrt_plus1", 1.0, 0.75),
    ("one_minus_x", "sqrt_plus1", 0.75, 0.75),
]


@pytest.mark.parametrize("f_name,g_name,s1,s2", PROOF_STEP_CASES)
def test_integrated_proof_step_matches_t3_slack(f_name, g_name, s1, s2, spec):
    f, g = spec(f_name), spec(g_name)
    for interval in (Interval(a=0.0, b=1.0), Interval(a=0.25, b=2.0)):
        report = eval_t3(f, s1, g, s2, interval)
        assert integrated_proof_step(f, g, s1, s2, interval) == pytest.approx(report.slack, abs=1e-6)


def test_jump_at_zero_is_a_member_value():
    jumpy = PowerS(a0=3.0, b_coef=1.0, c_off=0.5, s=0.5)
    assert proof_step_pointwise(jumpy, ONE, 0.5, 0.5, 1.0, Interval(a=0.0, b=1.0)) == 0.0
