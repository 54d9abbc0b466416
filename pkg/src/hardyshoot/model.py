"""Problem definition, regime validation, and closed-form constants.

The equation solved throughout the package is the radial form of

    u'' + (N-1)/r u' + mu/(R-r)^2 u = u^p   on (0, R),  u'(0) = 0,

with an inverse-square potential measured from the boundary. Admissible
parameters split into a sublinear regime (0 < p < 1) and a superlinear one
(p > 1); every derived constant below is a closed-form function of
(N, R, mu, p).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (
    MuAboveHardy,
    MuZero,
    NonPositive,
    NoSolutionRegime,
    PowerOne,
)

__all__ = [
    "Problem",
    "Regime",
    "Exponents",
    "validate",
    "exponents",
    "mu_star",
    "indicial_roots",
]


@dataclass(frozen=True)
class Problem:
    """One problem instance: dimension, ball radius, potential strength, power."""

    dim_n: int
    radius: float
    mu: float
    power: float


class Regime(enum.Enum):
    SUBLINEAR = "Sublinear"
    SUPERLINEAR = "Superlinear"


@dataclass(frozen=True)
class Exponents:
    """Closed-form constants of a validated problem.

    Fields that only make sense in one regime are None in the other, never
    NaN, so accidental cross-regime use fails loudly.
    """

    beta_minus: float
    beta_plus: float
    mu_star: float
    # superlinear only
    blowup_exponent: float | None = None
    blowup_amplitude: float | None = None
    interior_blowup_amplitude: float | None = None
    # sublinear only
    deadcore_exponent: float | None = None
    origin_amplitude: float | None = None
    deadcore_edge_amplitude: float | None = None


def mu_star(power: float) -> float:
    """Critical potential strength 2(p+1)/(p-1)^2."""
    return 2.0 * (power + 1.0) / (power - 1.0) ** 2


def indicial_roots(mu: float) -> tuple[float, float]:
    """Roots beta_-, beta_+ of beta(beta-1) + mu = 0, for mu < 1/4."""
    if mu >= 0.25:
        raise MuAboveHardy(
            "indicial roots are real and distinct only for mu < 1/4"
        )
    d = math.sqrt(0.25 - mu)
    return 0.5 - d, 0.5 + d


def validate(problem: Problem) -> Regime:
    """Check the admissibility hypotheses and return the regime.

    Raises NonPositive, MuZero, PowerOne, MuAboveHardy, or NoSolutionRegime
    when the parameters fall outside the supported set. mu >= 1/4 is
    rejected uniformly: at the Hardy bound the two indicial roots collide
    and the boundary expansions acquire logarithms this package does not
    model.
    """
    if problem.dim_n < 1 or int(problem.dim_n) != problem.dim_n:
        raise NonPositive(f"dim_n must be an integer >= 1, got {problem.dim_n}")
    if not problem.radius > 0:
        raise NonPositive(f"radius must be positive, got {problem.radius}")
    if not problem.power > 0:
        raise NonPositive(f"power must be positive, got {problem.power}")
    if problem.mu == 0:
        raise MuZero("mu = 0 is excluded")
    if problem.power == 1:
        raise PowerOne("power = 1 is excluded")
    if problem.mu >= 0.25:
        raise MuAboveHardy(f"mu = {problem.mu} >= 1/4")
    if problem.power > 1 and problem.mu <= -mu_star(problem.power):
        raise NoSolutionRegime(
            f"mu = {problem.mu} <= -mu_star = {-mu_star(problem.power)}: "
            "no nontrivial solutions"
        )
    return Regime.SUBLINEAR if problem.power < 1 else Regime.SUPERLINEAR


def exponents(problem: Problem) -> Exponents:
    """All closed-form constants for a validated problem.

    beta_- + beta_+ = 1 and beta_- * beta_+ = mu hold to machine precision.
    """
    regime = validate(problem)
    beta_minus, beta_plus = indicial_roots(problem.mu)
    ms = mu_star(problem.power)
    n, p = problem.dim_n, problem.power
    if regime is Regime.SUPERLINEAR:
        return Exponents(
            beta_minus=beta_minus,
            beta_plus=beta_plus,
            mu_star=ms,
            blowup_exponent=2.0 / (p - 1.0),
            blowup_amplitude=(problem.mu + ms) ** (1.0 / (p - 1.0)),
            interior_blowup_amplitude=ms ** (1.0 / (p - 1.0)),
        )
    return Exponents(
        beta_minus=beta_minus,
        beta_plus=beta_plus,
        mu_star=ms,
        deadcore_exponent=2.0 / (1.0 - p),
        origin_amplitude=(ms + 2.0 * (n - 1) / (1.0 - p)) ** (1.0 / (p - 1.0)),
        deadcore_edge_amplitude=((1.0 - p) ** 2 / (2.0 * (1.0 + p)))
        ** (1.0 / (1.0 - p)),
    )
