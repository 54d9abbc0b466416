"""Error types shared across the package.

Every error carries a stable ``code`` string used by the CLI's
machine-readable error output; the code is the class name.
"""

from __future__ import annotations


class HardyShootError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# ---- problem validation ----

class MuZero(HardyShootError):
    """mu = 0 is excluded (the potential term vanishes identically)."""


class PowerOne(HardyShootError):
    """power = 1 is excluded (linear resonance, no nonlinear structure)."""


class MuAboveHardy(HardyShootError):
    """mu >= 1/4 violates the ball Hardy bound; indicial roots degenerate."""


class NoSolutionRegime(HardyShootError):
    """power > 1 with mu <= -mu_star: no nontrivial solutions exist."""


class NonPositive(HardyShootError):
    """radius, power, or a required positive parameter is not positive."""


class WrongRegime(HardyShootError):
    """Operation requires the other of sublinear/superlinear."""


class WrongSign(HardyShootError):
    """Parameter has the wrong sign for this construction."""


# ---- stepping / launching ----

class HTooLarge(HardyShootError):
    """Series launch step too large for the requested tolerance."""


class MaxSteps(HardyShootError):
    """Step budget exhausted before any termination event."""


class NoConvergence(HardyShootError):
    """Refinement loop exhausted its budget without meeting tolerance."""


# ---- fitting ----

class NotConverged(HardyShootError):
    """Extrapolation history oscillates or diverges beyond tolerance."""


class TooFewSamples(HardyShootError):
    """Not enough trajectory samples in the fitting window."""


class Degenerate(HardyShootError):
    """Indicial discriminant vanishes or is negative."""


# ---- shooting ----

class BracketFailure(HardyShootError):
    """Bracket expansion exhausted its configured range."""


class NotBlowup(HardyShootError):
    """Requested a blowup quantity for a non-blowup trajectory."""


class TargetUnreachable(HardyShootError):
    """Inverse search bracket cannot enclose the requested coefficient."""


class NonPositiveTarget(HardyShootError):
    """Boundary coefficient targets must be strictly positive."""
