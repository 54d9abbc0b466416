"""Linear radial comparison problems and perturbed indicial exponents.

Covers the mu-harmonic on the ball (h'' + (N-1)/r h' + mu/(R-r)^2 h = 0),
the boundary weight profile eta used for negative mu, and the perturbed
indicial root beta_eps. The boundary behavior of all of these is governed
by the same two Fuchsian modes delta^beta_minus and delta^beta_plus as the
nonlinear problem, so the coefficient extraction is shared with
asymptotics.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .asymptotics import FitResult, fit_power_samples
from .errors import Degenerate, HardyShootError, NonPositive, WrongSign
from .model import Problem, indicial_roots, validate
from .stepper import Event, IntegratorOptions, State, _drive, _resolve

__all__ = [
    "LinearTrajectory",
    "integrate_linear",
    "linear_coefficient",
    "eta_profile",
    "perturbed_exponent",
]


@dataclass(frozen=True)
class LinearTrajectory:
    """Sampled linear profile (r, h, dh) with termination event.

    coefficient_hint is the fitted boundary coefficient
    c0 = lim h(r) (R-r)^(-beta_minus) when the fit converged, else None.
    """

    dim_n: int
    radius: float
    mu: float
    options: IntegratorOptions
    r: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    event: Event
    n_steps: int
    coefficient_hint: float | None = None

    @property
    def samples(self) -> tuple[tuple[float, float, float], ...]:
        return tuple(
            (float(a), float(b), float(c))
            for a, b, c in zip(self.r, self.h, self.dh)
        )

    def to_csv(self) -> str:
        lines = ["r,h,dh"]
        for a, b, c in zip(self.r, self.h, self.dh):
            lines.append(f"{a:.17g},{b:.17g},{c:.17g}")
        lines.append(f"# event: {self.event.kind} r={self.event.r:.17g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "dim_n": self.dim_n,
            "radius": self.radius,
            "mu": self.mu,
            "options": asdict(self.options),
            "samples": [
                [float(a), float(b), float(c)]
                for a, b, c in zip(self.r, self.h, self.dh)
            ],
            "event": asdict(self.event),
            "n_steps": self.n_steps,
            "coefficient_hint": self.coefficient_hint,
        }
        return json.dumps(doc, indent=2)


def _linear_drive(dim_n, radius, mu, start, opts, power_for_resolve) -> tuple:
    problem = Problem(dim_n=dim_n, radius=radius, mu=mu, power=power_for_resolve)
    o = _resolve(problem, start.u, opts, linear=True)
    r, u, du, ev, _latch, ns = _drive(
        dim_n, radius, mu, start, o, power=None, e_exp=indicial_roots(mu)[0],
    )
    return o, r, u, du, ev, ns


def integrate_linear(
    problem: Problem, h0: float, opts: IntegratorOptions | None = None
) -> LinearTrajectory:
    """Integrate the mu-harmonic with h(0) = h0, h'(0) = 0 to the boundary window.

    The launch reuses the center series with the reaction absent:
    a2 = -mu h0 / (2 N R^2). The fitted boundary coefficient
    c0 = lim h (R-r)^(-beta_minus) is attached as coefficient_hint; it is
    positive and scales linearly in h0.
    """
    validate(problem)
    if h0 <= 0:
        raise NonPositive("h0 must be positive")
    n, R, mu = problem.dim_n, problem.radius, problem.mu
    hl = 1e-3 * R
    a2 = -mu * h0 / (2.0 * n * R * R)
    start = State(hl, h0 + a2 * hl * hl, 2.0 * a2 * hl)
    o, r, h, dh, ev, ns = _linear_drive(n, R, mu, start, opts, problem.power)
    traj = LinearTrajectory(n, R, mu, o, r, h, dh, ev, ns)
    fit = linear_coefficient(traj, strict=False)
    hint = fit.coefficient if fit.converged else None
    return LinearTrajectory(n, R, mu, o, r, h, dh, ev, ns, coefficient_hint=hint)


def linear_coefficient(traj: LinearTrajectory, tol: float = 1e-3, strict: bool = True) -> FitResult:
    """Boundary coefficient fit c0 = lim h (R-r)^(-beta_minus) for a linear run."""
    bm, bp = indicial_roots(traj.mu)
    return fit_power_samples(
        traj.r, traj.h, traj.radius, traj.options.delta_stop,
        exponent=bm, gap=bp - bm, tol=tol, strict=strict,
    )


def eta_profile(
    mu: float,
    delta0: float,
    opts: IntegratorOptions | None = None,
    dim_n: int = 3,
) -> tuple[LinearTrajectory, float]:
    """Monotone boundary weight for mu < 0 on the interval (delta0/2, delta0).

    Solves eta'' + (N-1)/r eta' + mu/(delta0 - r)^2 eta = 0 with
    eta(delta0/2) = 1, eta'(delta0/2) = 0. For mu < 0 the profile is
    nondecreasing (the weighted flux sigma eta' can only fall, and it
    starts at zero); that is checked on every sample. Returns the
    trajectory and C_eta = lim eta (delta0 - r)^(-beta_minus) > 0.
    """
    if mu >= 0:
        raise WrongSign("the eta construction requires mu < 0")
    if delta0 <= 0:
        raise NonPositive("delta0 must be positive")
    if dim_n < 1:
        raise NonPositive("dim_n must be at least 1")
    start = State(delta0 / 2.0, 1.0, 0.0)
    o, r, h, dh, ev, ns = _linear_drive(dim_n, delta0, mu, start, opts, 0.5)
    scale = float(np.max(np.abs(h)))
    if float(np.min(dh)) < -1e-12 * scale:
        raise HardyShootError(
            f"eta profile not nondecreasing: min eta' = {float(np.min(dh)):.3g}"
        )
    traj = LinearTrajectory(dim_n, delta0, mu, o, r, h, dh, ev, ns)
    fit = linear_coefficient(traj)
    traj = LinearTrajectory(
        dim_n, delta0, mu, o, r, h, dh, ev, ns, coefficient_hint=fit.coefficient
    )
    return traj, fit.coefficient


def perturbed_exponent(mu: float, p: float, eps: float) -> float:
    """Smaller root beta_eps of beta(beta - 1) + mu - eps^(p-1) = 0.

    beta_0 = beta_minus exactly; for p > 1 the root is continuous and
    decreasing in eps, reaching -2/(p-1) as mu - eps^(p-1) drops to
    -mu_star. Degenerate when the discriminant is not positive.
    """
    if eps < 0:
        raise NonPositive("eps must be nonnegative")
    shift = 0.0 if eps == 0 else eps ** (p - 1.0)
    disc = 0.25 - mu + shift
    if disc <= 0:
        raise Degenerate(f"discriminant {disc:.3g} is not positive")
    return 0.5 - math.sqrt(disc)
