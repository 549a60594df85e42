import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import DomainError
from function_model import UNIT_INTERVAL
from quadrature import GRADING_POWER, integrate_with_distances

logger = logging.getLogger(__name__)

# Lanczos approximation, 13 terms, tuned for double precision
LANCZOS_G = 6.024680040776729583740234375
LANCZOS_NUM = np.array([
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
])
# x(x+1)...(x+11), highest degree first
LANCZOS_DENOM = np.array([
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
])

MAX_GAMMA_ARG = 171.6243769563027  # Gamma overflows float64 past this
# Beta is formed as a plain ratio of Gammas inside this box, in log space outside it
DIRECT_BETA_MIN = 1e-2
DIRECT_BETA_MAX = 170.0
# Grading for the Beta integral: t^(u-1) becomes smooth to order ~BETA_GRADING_TARGET
BETA_GRADING_TARGET = 6
MAX_BETA_GRADING = 40


class BetaArgs(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    u: float = Field(gt=0)
    v: float = Field(gt=0)


def _check_positive(x, name="x"):
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"{name} must be a positive finite number, got {x!r}")


def _check_exponent(s, name="s"):
    if not math.isfinite(s) or not 0 < s <= 1:
        raise DomainError(f"{name} must lie in (0, 1], got {s!r}")


def _lanczos_sum(x):
    return float(np.polyval(LANCZOS_NUM, x) / np.polyval(LANCZOS_DENOM, x))


def gamma_fn(x):
    """Gamma function for x > 0."""
    x = float(x)
    _check_positive(x)
    if x > MAX_GAMMA_ARG:
        raise OverflowError(f"Gamma({x}) exceeds the float64 range")
    if x == int(x):
        return float(math.factorial(int(x) - 1))

    zgh = x + LANCZOS_G - 0.5
    # Split the power so zgh**(x - 0.5) cannot overflow on its own
    half_power = zgh ** ((x - 0.5) / 2)
    return _lanczos_sum(x) * half_power / math.exp(x - 0.5) * half_power


def ln_gamma(x):
    x = float(x)
    _check_positive(x)
    if x == 1.0 or x == 2.0:
        return 0.0
    zgh = x + LANCZOS_G - 0.5
    return math.log(_lanczos_sum(x)) + (x - 0.5) * (math.log(zgh) - 1.0)


def beta_fn(args=None, *, u=None, v=None):
    """Euler Beta function B(u, v) = Gamma(u) Gamma(v) / Gamma(u + v).

    Accepts either a BetaArgs instance or the keyword arguments u and v.
    """
    if args is None:
        if u is None or v is None:
            raise DomainError("beta_fn needs BetaArgs or both u and v")
        u, v = float(u), float(v)
    else:
        u, v = args.u, args.v
    _check_positive(u, "u")
    _check_positive(v, "v")

    if min(u, v) >= DIRECT_BETA_MIN and u + v <= DIRECT_BETA_MAX:
        return gamma_fn(u) * gamma_fn(v) / gamma_fn(u + v)
    return math.exp(ln_gamma(u) + ln_gamma(v) - ln_gamma(u + v))


def beta_2_splus1(s):
    """Coefficient of N(a, b) in the convex/s-convex product inequality."""
    s = float(s)
    _check_exponent(s)
    return 1.0 / ((s + 1.0) * (s + 2.0))


def beta_cross(s1, s2):
    """B(s1 + 1, s2 + 1), the coefficient of N(a, b) for two s-convex factors."""
    s1, s2 = float(s1), float(s2)
    _check_exponent(s1, "s1")
    _check_exponent(s2, "s2")
    return beta_fn(u=s1 + 1.0, v=s2 + 1.0)


def beta_integral(u, v, tol=1e-12):
    """Brute-force quadrature of the defining Beta integral over [0, 1].

    Reliable for u, v >= 0.25; below that the grading needed to tame the
    endpoint singularity underflows.
    """
    u, v = float(u), float(v)
    _check_positive(u, "u")
    _check_positive(v, "v")
    grading = min(MAX_BETA_GRADING, max(GRADING_POWER, math.ceil(BETA_GRADING_TARGET / min(u, v, 1.0))))
    estimate = integrate_with_distances(
        lambda x, left, right: np.power(left, u - 1.0) * np.power(right, v - 1.0),
        UNIT_INTERVAL,
        tol=tol,
        grading=grading,
    )
    if not estimate.converged:
        logger.info("Beta integral for (%s, %s) did not converge: %s", u, v, estimate)
    return estimate.value
