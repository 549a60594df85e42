"""Immutable descriptions of the real functions the toolkit works with.

A FunctionSpec is one arm of a tagged union, discriminated by ``kind``.
Specs serialize to JSON and back without loss, evaluate pointwise or on
numpy arrays, and can be drawn at random from families that are convex
(or s-convex in the second sense) by construction.
"""
import json
import logging
import math
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from errors import DomainError, SpecFormatError

logger = logging.getLogger(__name__)

MIN_COMPLEXITY = 1
MAX_COMPLEXITY = 8
UINT64 = 2 ** 64

# Parameter ranges for the random families
NONNEG_RANGE = (0.0, 2.0)
FREE_RANGE = (-1.0, 1.0)


class Interval(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    a: float
    b: float

    @model_validator(mode="after")
    def _ordered(self):
        if not self.a < self.b:
            raise ValueError(f"interval needs a < b, got [{self.a}, {self.b}]")
        return self

    @property
    def length(self):
        return self.b - self.a

    @property
    def midpoint(self):
        return (self.a + self.b) / 2

    @classmethod
    def parse(cls, text):
        """Build an interval from an "a,b" decimal pair."""
        try:
            a, b = (float(part) for part in text.split(","))
            return cls(a=a, b=b)
        except (ValueError, ValidationError) as e:
            raise DomainError(f"invalid interval {text!r}: {e}") from e

    def require_nonnegative(self):
        if self.a < 0:
            raise DomainError(
                f"s-convexity lives on [0, inf); interval [{self.a}, {self.b}] starts below 0")

    def __str__(self):
        return f"[{self.a!r}, {self.b!r}]"


UNIT_INTERVAL = Interval(a=0.0, b=1.0)


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class Constant(_Spec):
    kind: Literal["constant"] = "constant"
    value: float


class Affine(_Spec):
    kind: Literal["affine"] = "affine"
    slope: float
    offset: float


class Polynomial(_Spec):
    kind: Literal["polynomial"] = "polynomial"
    coefficients: tuple[float, ...] = Field(min_length=1)  # ascending degree


class PowerS(_Spec):
    """a0 at x = 0, b_coef * x**s + c_off for x > 0."""
    kind: Literal["power_s"] = "power_s"
    a0: float
    b_coef: float
    c_off: float
    s: float = Field(gt=0, le=1)


class AbsKink(_Spec):
    kind: Literal["abs_kink"] = "abs_kink"
    center: float
    slope: float = Field(ge=0)
    offset: float


class ExpAffine(_Spec):
    kind: Literal["exp_affine"] = "exp_affine"
    rate: float
    scale: float = Field(ge=0)
    offset: float


class Sum(_Spec):
    kind: Literal["sum"] = "sum"
    terms: tuple["FunctionSpec", ...] = Field(min_length=1)


class Scale(_Spec):
    kind: Literal["scale"] = "scale"
    factor: float = Field(ge=0)
    inner: "FunctionSpec"


FunctionSpec = Annotated[
    Union[Constant, Affine, Polynomial, PowerS, AbsKink, ExpAffine, Sum, Scale],
    Field(discriminator="kind"),
]
Sum.model_rebuild()
Scale.model_rebuild()
_SPEC_ADAPTER = TypeAdapter(FunctionSpec)


# --- serialization -------------------------------------------------------

def to_dict(spec):
    return _SPEC_ADAPTER.dump_python(spec, mode="json")


def from_dict(data):
    try:
        return _SPEC_ADAPTER.validate_python(data)
    except ValidationError as e:
        raise SpecFormatError(f"invalid function spec: {e}") from e


def render(spec, indent=None):
    """Canonical JSON text for a spec; floats keep their exact repr."""
    return json.dumps(to_dict(spec), indent=indent)


def parse(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"function spec is not valid JSON: {e}") from e
    return from_dict(data)


def load_spec(path):
    return parse(Path(path).read_text())


# --- evaluation ----------------------------------------------------------

def evaluate_array(spec, xs):
    """Evaluate a spec elementwise on an array of points."""
    xs = np.asarray(xs, dtype=float)
    kind = spec.kind

    if kind == "constant":
        return np.full(xs.shape, spec.value)
    elif kind == "affine":
        return spec.slope * xs + spec.offset
    elif kind == "polynomial":
        return np.polynomial.polynomial.polyval(xs, spec.coefficients)
    elif kind == "power_s":
        if np.any(xs < 0):
            raise DomainError(f"power_s member evaluated at negative x (min {xs.min()!r})")
        return np.where(xs == 0, spec.a0, spec.b_coef * np.power(xs, spec.s) + spec.c_off)
    elif kind == "abs_kink":
        return spec.slope * np.abs(xs - spec.center) + spec.offset
    elif kind == "exp_affine":
        return spec.scale * np.exp(spec.rate * xs) + spec.offset
    elif kind == "sum":
        total = np.zeros(xs.shape)
        for term in spec.terms:
            total = total + evaluate_array(term, xs)
        return total
    elif kind == "scale":
        return spec.factor * evaluate_array(spec.inner, xs)
    raise SpecFormatError(f"unknown function kind {kind!r}")


def evaluate(spec, x):
    return float(evaluate_array(spec, float(x)))


def breakpoints(spec, interval):
    """Interior points of the interval where the function is not smooth."""
    points = set()

    def collect(node):
        if node.kind == "abs_kink":
            if interval.a < node.center < interval.b:
                points.add(node.center)
        elif node.kind == "sum":
            for term in node.terms:
                collect(term)
        elif node.kind == "scale":
            collect(node.inner)

    collect(spec)
    return tuple(sorted(points))


# --- named members ---------------------------------------------------------

def example1(a0, b_coef, c_off, s):
    """The piecewise power family: a0 at 0, b_coef * t**s + c_off for t > 0."""
    return PowerS(a0=a0, b_coef=b_coef, c_off=c_off, s=s)


def x_power(gamma, s):
    """gamma * x**s, extremal for s-convexity from the left endpoint 0."""
    return PowerS(a0=0.0, b_coef=gamma, c_off=0.0, s=s)


# --- random families -------------------------------------------------------

def derive_stream(root_seed, *keys):
    """Independent numpy generator for (root_seed, *keys).

    Streams are counter-based: the keys address a child of the root seed,
    so a stream never depends on how many other streams were drawn before.
    """
    sequence = np.random.SeedSequence(int(root_seed) % UINT64, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(sequence))


def _check_complexity(complexity):
    if not MIN_COMPLEXITY <= complexity <= MAX_COMPLEXITY:
        raise DomainError(
            f"complexity must be in [{MIN_COMPLEXITY}, {MAX_COMPLEXITY}], got {complexity}")


def _uniform(rng, bounds):
    return float(rng.uniform(*bounds))


def _random_convex_term(rng, interval):
    choice = int(rng.integers(4))
    if choice == 0:
        return Affine(slope=_uniform(rng, FREE_RANGE), offset=_uniform(rng, FREE_RANGE))
    elif choice == 1:
        return AbsKink(
            center=float(rng.uniform(interval.a, interval.b)),
            slope=_uniform(rng, NONNEG_RANGE),
            offset=_uniform(rng, FREE_RANGE),
        )
    elif choice == 2:
        # Only even powers, nonnegative above the constant term
        degree = 2 * int(rng.integers(1, 3))
        coefficients = [0.0] * (degree + 1)
        coefficients[0] = _uniform(rng, FREE_RANGE)
        for power in range(2, degree + 1, 2):
            coefficients[power] = _uniform(rng, NONNEG_RANGE)
        return Polynomial(coefficients=tuple(coefficients))
    return ExpAffine(
        rate=_uniform(rng, FREE_RANGE),
        scale=_uniform(rng, NONNEG_RANGE),
        offset=_uniform(rng, FREE_RANGE),
    )


def _random_power_term(rng, s):
    c_off = _uniform(rng, NONNEG_RANGE)
    return PowerS(
        a0=c_off + _uniform(rng, NONNEG_RANGE),
        b_coef=_uniform(rng, NONNEG_RANGE),
        c_off=c_off,
        s=s,
    )


def _combine(rng, terms):
    if len(terms) == 1:
        return terms[0]
    return Sum(terms=tuple(Scale(factor=_uniform(rng, NONNEG_RANGE), inner=term) for term in terms))


def random_convex(seed, complexity, interval=UNIT_INTERVAL):
    """Random convex spec: a nonnegative combination of convex building blocks."""
    _check_complexity(complexity)
    rng = derive_stream(seed)
    terms = [_random_convex_term(rng, interval) for _ in range(complexity)]
    return _combine(rng, terms)


def random_s_convex(seed, s, complexity):
    """Random member of K_s^2 built from power_s terms with b_coef >= 0 and
    0 <= c_off <= a0, plus nonnegative constants."""
    s = float(s)
    if not math.isfinite(s) or not 0 < s <= 1:
        raise DomainError(f"s must lie in (0, 1], got {s!r}")
    _check_complexity(complexity)
    rng = derive_stream(seed)
    terms = [_random_power_term(rng, s)]
    for _ in range(complexity - 1):
        if rng.random() < 0.75:
            terms.append(_random_power_term(rng, s))
        else:
            terms.append(Constant(value=_uniform(rng, NONNEG_RANGE)))
    return _combine(rng, terms)
