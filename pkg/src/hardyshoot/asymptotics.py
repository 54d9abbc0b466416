"""Boundary coefficient extraction, scaled transforms, and envelope checks.

All solutions of the radial problem behave like c (R-r)^beta_minus or
(for the maximal superlinear solution) like (mu + mu_star)^(1/(p-1))
(R-r)^(-2/(p-1)) at the boundary. The extractors here evaluate those limits
from sampled trajectories on geometric ladders in delta = R - r, with
Richardson extrapolation against the known next-order gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositive, NotConverged, TooFewSamples, WrongRegime
from .model import Problem, Regime, indicial_roots, mu_star, validate
from .stepper import REACHED_BOUNDARY_WINDOW, Trajectory

__all__ = [
    "FitResult",
    "richardson",
    "fit_power_samples",
    "fit_power_coefficient",
    "w_transform_limit",
    "VTransformResult",
    "v_transform",
    "weighted_flux_residual",
    "w0_profile",
    "supersolution_margin",
    "subsolution_check",
    "envelope_extrema_check",
]


@dataclass(frozen=True)
class FitResult:
    """Extracted asymptotic coefficient with its convergence record.

    residual is the relative difference of the last two history entries;
    converged means it fell below the requested tolerance and the raw
    ladder did not diverge.
    """

    coefficient: float
    exponent: float
    residual: float
    history: tuple[float, ...]
    converged: bool


def richardson(values, ratio: float, exponents) -> np.ndarray:
    """Successive elimination on a geometric ladder.

    values[k] is the quantity at step d0 * ratio^(-k); each pass removes the
    error mode with the given exponent, shortening the sequence by one.
    """
    cur = np.asarray(values, dtype=float)
    for g in exponents:
        f = ratio ** (-float(g))
        cur = (cur[1:] - f * cur[:-1]) / (1.0 - f)
    return cur


def _interp_log(r, u, radius: float, deltas: np.ndarray) -> np.ndarray:
    """u at prescribed delta = R - r by log-log interpolation of the samples."""
    d = radius - np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    order = np.argsort(d)
    d, u = d[order], u[order]
    pos = u > 0
    d, u = d[pos], u[pos]
    if d.size < 2:
        raise TooFewSamples("need at least 2 positive samples to interpolate")
    if deltas.min() < d[0] or deltas.max() > d[-1]:
        raise TooFewSamples(
            f"fit window [{deltas.min():.3g}, {deltas.max():.3g}] not covered "
            f"by samples [{d[0]:.3g}, {d[-1]:.3g}]"
        )
    return np.exp(np.interp(np.log(deltas), np.log(d), np.log(u)))


def fit_power_samples(
    r,
    u,
    radius: float,
    delta_stop: float,
    exponent: float,
    gap: float,
    tol: float = 1e-3,
    strict: bool = True,
) -> FitResult:
    """Core coefficient fit on raw (r, u) samples.

    Evaluates q_k = u(R - delta_k) delta_k^(-exponent) on the ladder
    delta_k = 100 delta_stop 2^(-k) (the last two decades above delta_stop)
    and removes the next-order mode delta^gap by one Richardson pass.
    """
    dk = 100.0 * delta_stop * 0.5 ** np.arange(7)
    d = radius - np.asarray(r, dtype=float)
    in_window = (d >= 0.999 * delta_stop) & (d <= 100.0 * delta_stop * 1.001)
    if int(np.count_nonzero(in_window)) < 6:
        raise TooFewSamples("need at least 6 samples in the last two decades")
    q = _interp_log(r, u, radius, dk) * dk ** (-float(exponent))
    hist = richardson(q, 2.0, [gap])
    resid = abs(hist[-1] - hist[-2]) / max(abs(hist[-1]), 1e-300)
    diverged = abs(q[-1]) > 10.0 * abs(q[0])
    converged = bool(resid < tol and not diverged)
    fit = FitResult(
        coefficient=float(hist[-1]),
        exponent=float(exponent),
        residual=float(resid),
        history=tuple(float(x) for x in hist),
        converged=converged,
    )
    if strict and not converged:
        raise NotConverged(
            f"ladder residual {resid:.3g} at exponent {exponent:.6g} "
            f"(diverged={diverged})"
        )
    return fit


def fit_power_coefficient(
    traj: Trajectory,
    exponent: float,
    tol: float = 1e-3,
    correction_exponent: float | None = None,
    strict: bool = True,
) -> FitResult:
    """Boundary coefficient lim u(r) (R-r)^(-exponent) from a trajectory.

    The trajectory must have reached the boundary window. The Richardson
    correction exponent defaults to beta_plus - beta_minus, the gap to the
    next Fuchsian mode.
    """
    if traj.event.kind != REACHED_BOUNDARY_WINDOW:
        raise TooFewSamples(
            f"fit needs a boundary-window trajectory, got {traj.event.kind}"
        )
    if correction_exponent is None:
        bm, bp = indicial_roots(traj.problem.mu)
        gap = bp - bm
    else:
        gap = correction_exponent
    return fit_power_samples(
        traj.r, traj.u, traj.problem.radius, traj.options.delta_stop,
        exponent, gap, tol=tol, strict=strict,
    )


def w_transform_limit(
    traj: Trajectory,
    problem: Problem | None = None,
    tol: float = 1e-2,
    window: tuple[float, float] = (1e-3, 1e-1),
    strict: bool = True,
) -> FitResult:
    """Limit of w(r) = u(r) (R-r)^(2/(p-1)) at the boundary.

    For the threshold shot the limit is (mu + mu_star)^(1/(p-1)); for
    sub-threshold shots it is 0. The fit ladder lives in the mid-field
    window (default [1e-3, 1e-1] R): closer to the boundary any finite
    bisection tolerance leaves a growing separatrix-contamination mode,
    while inside the window the limit is clean to a fraction of a percent.
    Richardson exponents 1 and 2 remove the regular corrections in R - r.

    On boundary-window trajectories the w tail after its last extremum must
    be nonincreasing; an increasing tail means the shot is escaping and no
    limit exists (NotConverged in strict mode).
    """
    problem = problem if problem is not None else traj.problem
    if validate(problem) is not Regime.SUPERLINEAR:
        raise WrongRegime("the w transform requires p > 1")
    p = problem.power
    R = problem.radius
    m = 2.0 / (p - 1.0)

    w_all = traj.u * (R - traj.r) ** m
    if traj.event.kind == REACHED_BOUNDARY_WINDOW and strict:
        dw = np.diff(w_all)
        eps = 1e-9 * float(np.max(np.abs(w_all)))
        rising = np.nonzero(dw > eps)[0]
        if rising.size and rising[-1] >= dw.size - 3:
            raise NotConverged("w increases into the boundary window")

    d_hi, d_lo = window[1] * R, window[0] * R
    K = int(math.floor(math.log2(d_hi / d_lo)))
    dk = d_hi * 0.5 ** np.arange(K + 1)
    wk = _interp_log(traj.r, traj.u, R, dk) * dk ** m
    hist = richardson(wk, 2.0, [1.0, 2.0])
    scale = max(abs(hist[-1]), 1e-2 * float(np.max(wk)), 1e-300)
    resid = abs(hist[-1] - hist[-2]) / scale
    converged = bool(resid < tol)
    fit = FitResult(
        coefficient=float(hist[-1]),
        exponent=-m,
        residual=float(resid),
        history=tuple(float(x) for x in hist),
        converged=converged,
    )
    if strict and not converged:
        raise NotConverged(f"w ladder residual {resid:.3g}")
    return fit


@dataclass(frozen=True)
class VTransformResult:
    """Samples of v = u delta^(-beta_minus) with the discrete flux residual.

    delta ascends; residual holds the normalized defect of
    (sigma v')' = sigma (v^p delta^(beta(p-1)) + beta (N-1) v / ((R-delta) delta))
    at the interior nodes (length len(delta) - 2).
    """

    delta: np.ndarray
    v: np.ndarray
    residual: np.ndarray


def weighted_flux_residual(
    r,
    u,
    du,
    radius: float,
    mu: float,
    dim_n: int,
    power: float | None = None,
    delta_max: float | None = None,
):
    """Discrete residual of the weighted-flux identity on sample arrays.

    With beta = beta_minus, v = u delta^(-beta), and the weight
    sigma = delta^(2 beta) (R-delta)^(N-1), solutions satisfy
    (sigma v')' = sigma (v^p delta^(beta(p-1)) + beta (N-1) v/((R-delta) delta)),
    where ' is d/d delta. power None drops the reaction term (the linear
    case, in which the right side has a single sign for mu < 0).

    Returns (delta_interior, lhs, rhs, scale): lhs is the centered
    second-difference of the flux, rhs the exact right side, scale the
    magnitude the residual should be normalized by.
    """
    beta = indicial_roots(mu)[0]
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    d = radius - r
    if delta_max is not None:
        keep = d <= delta_max
        r, u, du, d = r[keep], u[keep], du[keep], d[keep]
    if d.size < 5:
        raise TooFewSamples("need at least 5 samples for the flux residual")
    order = np.argsort(d)
    d, u, du = d[order], u[order], du[order]

    v = u * d ** (-beta)
    # dv/d delta from the exact state, no numerical differentiation
    vp = -(du * d + beta * u) * d ** (-beta - 1.0)
    sigma = d ** (2.0 * beta) * (radius - d) ** (dim_n - 1)
    g = sigma * vp

    hm = d[1:-1] - d[:-2]
    hp = d[2:] - d[1:-1]
    lhs = (
        (-hp / (hm * (hm + hp))) * g[:-2]
        + ((hp - hm) / (hm * hp)) * g[1:-1]
        + (hm / (hp * (hm + hp))) * g[2:]
    )

    dm, vm, sm = d[1:-1], v[1:-1], sigma[1:-1]
    linear_part = sm * beta * (dim_n - 1) * vm / ((radius - dm) * dm)
    if power is not None:
        react_part = sm * vm ** power * dm ** (beta * (power - 1.0))
    else:
        react_part = np.zeros_like(dm)
    rhs = react_part + linear_part
    scale = np.abs(react_part) + np.abs(linear_part) + 1e-300
    return dm, lhs, rhs, scale


def v_transform(
    traj: Trajectory,
    problem: Problem | None = None,
    window: tuple[float, float] = (1e-3, 1.0),
) -> VTransformResult:
    """v = u delta^(-beta_minus) on the boundary-layer samples, with residual.

    window selects delta in [window[0], window[1]] * delta_switch. The
    default floor exists because the centered second difference amplifies
    sample-level integration error like 1/delta toward delta_stop; below
    about 1e-3 of the layer the discrete residual measures solver noise,
    not the identity. All three returned arrays cover the interior points
    of the window, sorted by increasing delta.
    """
    problem = problem if problem is not None else traj.problem
    beta = indicial_roots(problem.mu)[0]
    dsw = traj.options.delta_switch
    if dsw is None:
        dsw = problem.radius / 100.0
    d_all = problem.radius - traj.r
    keep = (d_all <= window[1] * dsw) & (d_all >= window[0] * dsw)
    if int(np.count_nonzero(keep)) < 5:
        raise TooFewSamples("need at least 5 samples in the boundary layer")
    dm, lhs, rhs, scale = weighted_flux_residual(
        traj.r[keep], traj.u[keep], traj.du[keep],
        problem.radius, problem.mu, problem.dim_n,
        power=problem.power,
    )
    d = d_all[keep]
    order = np.argsort(d)
    v = (traj.u[keep] * d ** (-beta))[order][1:-1]  # interior points, as dm
    return VTransformResult(delta=dm, v=v, residual=(lhs - rhs) / scale)


# ---- closed-form envelope and certificates ----

def w0_profile(problem: Problem, r):
    """Largest zero of the autonomized reaction: the local ceiling for w.

    w0(r) = (mu_star + mu + eta(r))^(1/(p-1)) with
    eta(r) = 2 (N-1)(R-r) / ((p-1) r); decreasing in r, with
    w0(R) = (mu + mu_star)^(1/(p-1)) and w0 -> +inf at the center.
    """
    if validate(problem) is not Regime.SUPERLINEAR:
        raise WrongRegime("the envelope is defined for p > 1")
    p, R, n = problem.power, problem.radius, problem.dim_n
    r = np.asarray(r, dtype=float)
    eta = np.zeros_like(r) if n == 1 else 2.0 * (n - 1) * (R - r) / ((p - 1.0) * r)
    out = (mu_star(p) + problem.mu + eta) ** (1.0 / (p - 1.0))
    return float(out) if out.ndim == 0 else out


def supersolution_margin(problem: Problem, c_plus: float, r: float) -> float:
    """Margin m(r) of the scaled supersolution candidate c_plus (R-r)^(-2/(p-1)).

    m = mu_star + mu - c_plus^(p-1) + 2 (N-1)(R-r)/((p-1) r); m < 0 on
    [r0, R) certifies the candidate as a supersolution there.
    """
    if validate(problem) is not Regime.SUPERLINEAR:
        raise WrongRegime("supersolution margins are defined for p > 1")
    if c_plus <= 0:
        raise NonPositive("c_plus must be positive")
    p, R, n = problem.power, problem.radius, problem.dim_n
    eta = 0.0 if n == 1 else 2.0 * (n - 1) * (R - r) / ((p - 1.0) * r)
    return mu_star(p) + problem.mu - c_plus ** (p - 1.0) + eta


def subsolution_check(problem: Problem, c_minus: float) -> bool:
    """True iff c_minus (R-r)^(-2/(p-1)) is a subsolution on the whole ball.

    The condition is c_minus^(p-1) <= mu + mu_star; positive right side is
    guaranteed by the admissibility hypothesis mu > -mu_star.
    """
    if validate(problem) is not Regime.SUPERLINEAR:
        raise WrongRegime("subsolution candidates are defined for p > 1")
    if c_minus <= 0:
        raise NonPositive("c_minus must be positive")
    p = problem.power
    return c_minus ** (p - 1.0) <= problem.mu + mu_star(p)


def envelope_extrema_check(
    traj: Trajectory,
    problem: Problem | None = None,
    rtol: float = 1e-6,
):
    """Test sampled extrema of w = u (R-r)^(2/(p-1)) against the envelope.

    Every sampled local maximum must lie below w0(r) (1 + rtol) and every
    sampled local minimum above w0(r) (1 - rtol). Returns the counts
    (n_maxima_ok, n_maxima, n_minima_ok, n_minima); the property holds when
    each ok-count equals its total.
    """
    problem = problem if problem is not None else traj.problem
    if validate(problem) is not Regime.SUPERLINEAR:
        raise WrongRegime("the envelope is defined for p > 1")
    m = 2.0 / (problem.power - 1.0)
    r, u = traj.r, traj.u
    w = u * (problem.radius - r) ** m
    keep = np.isfinite(w)
    r, w = r[keep], w[keep]
    n_max = n_min = max_ok = min_ok = 0
    for i in range(1, len(w) - 1):
        if w[i] > w[i - 1] and w[i] > w[i + 1]:
            n_max += 1
            if w[i] <= w0_profile(problem, r[i]) * (1.0 + rtol):
                max_ok += 1
        elif w[i] < w[i - 1] and w[i] < w[i + 1]:
            n_min += 1
            if w[i] >= w0_profile(problem, r[i]) * (1.0 - rtol):
                min_ok += 1
    return max_ok, n_max, min_ok, n_min
