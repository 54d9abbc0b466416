"""Shot classification, threshold search, and the inverse boundary problem.

A center shot either reaches the boundary window with the tame behavior
u ~ c (R-r)^beta_minus, or (superlinear only) escapes across the envelope
and blows up at an interior sphere. Near the threshold u* a shot can ride
the separatrix to enormous values before committing, so raw u_cap crossings
are not trusted: blowup is certified by the envelope latch (two consecutive
samples above w0 with w increasing), and uncertified cap hits are retried
with escalating caps before an Indeterminate verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .asymptotics import FitResult, fit_power_coefficient
from .errors import (
    BracketFailure,
    NonPositive,
    NonPositiveTarget,
    NotBlowup,
    NotConverged,
    TargetUnreachable,
    WrongRegime,
)
from .model import Problem, Regime, exponents, indicial_roots, validate
from .stepper import (
    BLOWUP_DETECTED,
    HIT_ZERO,
    REACHED_BOUNDARY_WINDOW,
    IntegratorOptions,
    Trajectory,
    center_series,
    dead_core_edge_series,
    integrate,
    origin_touch_series,
)

__all__ = [
    "GLOBAL_POSITIVE",
    "BLOWUP",
    "INDETERMINATE",
    "Classification",
    "ThresholdResult",
    "SolutionDescriptor",
    "classify",
    "find_ustar",
    "blowup_radius",
    "boundary_coefficient",
    "solve_for_boundary_coefficient",
]

GLOBAL_POSITIVE = "GlobalPositive"
BLOWUP = "Blowup"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Classification:
    """Outcome of one center shot.

    GlobalPositive carries the fitted boundary coefficient (exponent
    beta_minus); Blowup carries the blowup radius and the amplitude
    cross-check against (mu_star)^(1/(p-1)); Indeterminate reports the
    ambiguity band. The classified trajectory is attached.
    """

    kind: str
    coefficient: FitResult | None = None
    r_blow: float | None = None
    amplitude_check: FitResult | None = None
    band: tuple[float, float] | None = None
    trajectory: Trajectory | None = None


@dataclass(frozen=True)
class ThresholdResult:
    """Bisection output for u*: midpoint, final bracket, classify count."""

    u_star: float
    bracket: tuple[float, float]
    evaluations: int


def _blowup_tail_fit(problem: Problem, traj: Trajectory) -> tuple[float, FitResult]:
    """Blowup location and amplitude from the tail: u^(-(p-1)/2) is linear in r.

    Near the blowup sphere u = A (rho - r)^(-2/(p-1)), so
    z = u^(-(p-1)/2) = A^(-(p-1)/2) (rho - r); a least-squares line through
    the top decades of u gives rho from the zero of z and A from the slope.
    """
    p = problem.power
    m = 2.0 / (p - 1.0)
    target = exponents(problem).interior_blowup_amplitude
    u, r = traj.u, traj.r
    finite = np.isfinite(u) & (u > 0)
    u, r = u[finite], r[finite]
    umax = float(np.max(u))
    mask = u >= umax * 1e-3
    if int(np.count_nonzero(mask)) < 3:
        mask = u >= umax * 1e-6
    amp = float("nan")
    rho = float(traj.event.r)
    if int(np.count_nonzero(mask)) >= 3:
        z = u[mask] ** (-1.0 / m)
        slope, intercept = np.polyfit(r[mask], z, 1)
        if slope < 0:
            rho_fit = -intercept / slope
            amp = float((-slope) ** (-m))
            if 0.0 < rho_fit < problem.radius:
                rho = float(rho_fit)
    resid = abs(amp - target) / target if np.isfinite(amp) else float("inf")
    check = FitResult(
        coefficient=amp,
        exponent=-m,
        residual=float(resid),
        history=(amp,),
        converged=bool(resid <= 0.25),
    )
    return rho, check


def classify(
    problem: Problem,
    u0: float,
    opts: IntegratorOptions | None = None,
    launch_h: float | None = None,
    cap_boosts: tuple[float, ...] = (1.0, 1e3, 1e6, 1e9),
) -> Classification:
    """Classify the center shot u(0) = u0.

    Sublinear shots are globally positive; superlinear shots are
    GlobalPositive, Blowup (envelope-latched, with the amplitude
    cross-check), or Indeterminate when every escalated cap is exhausted
    while the shot is still riding the separatrix.
    """
    regime = validate(problem)
    if u0 <= 0:
        raise NonPositive("u0 must be positive")
    h = launch_h if launch_h is not None else 1e-3 * problem.radius
    start = center_series(problem, u0, h)
    base = opts if opts is not None else IntegratorOptions()
    beta_minus = indicial_roots(problem.mu)[0]
    base_cap = base.u_cap if base.u_cap is not None else 1e8 * max(1.0, u0)
    boosts = cap_boosts if regime is Regime.SUPERLINEAR else (1.0,)

    traj: Trajectory | None = None
    for boost in boosts:
        cur = base if boost == 1.0 else replace(base, u_cap=base_cap * boost)
        traj = integrate(problem, start, cur)
        kind = traj.event.kind
        if traj.latch_r is not None:
            rho, check = _blowup_tail_fit(problem, traj)
            return Classification(
                BLOWUP, r_blow=rho, amplitude_check=check, trajectory=traj
            )
        if kind == REACHED_BOUNDARY_WINDOW:
            fit = fit_power_coefficient(traj, beta_minus, strict=False)
            return Classification(GLOBAL_POSITIVE, coefficient=fit, trajectory=traj)
        if kind == HIT_ZERO:
            # excluded analytically for admissible parameters; a numerical
            # crossing means the tolerances failed, not the mathematics
            return Classification(INDETERMINATE, band=(u0, u0), trajectory=traj)
        # cap hit or step failure without the latch: escalate and retry
    return Classification(INDETERMINATE, band=(u0, u0), trajectory=traj)


def find_ustar(
    problem: Problem, tol: float, opts: IntegratorOptions | None = None
) -> ThresholdResult:
    """Bisection for the threshold u* separating global shots from blowup.

    The initial bracket is found by doubling from u0 = 1 until Blowup and
    halving until GlobalPositive (range limit [1e-12, 1e12]); bisection
    then narrows to relative width tol. Indeterminate classifications
    tighten rel_tol tenfold and retry, twice, before BracketFailure.
    """
    if validate(problem) is not Regime.SUPERLINEAR:
        raise WrongRegime("u* exists only for p > 1")
    if tol <= 0:
        raise NonPositive("tol must be positive")
    base = opts if opts is not None else IntegratorOptions()
    evaluations = 0

    def kind_at(u0: float) -> str:
        nonlocal evaluations
        rel = base.rel_tol
        for _ in range(3):
            evaluations += 1
            c = classify(problem, u0, replace(base, rel_tol=rel))
            if c.kind != INDETERMINATE:
                return c.kind
            rel *= 0.1
        raise BracketFailure(f"classification stayed indeterminate at u0={u0:.17g}")

    lo = hi = 1.0
    if kind_at(1.0) == GLOBAL_POSITIVE:
        hi = 2.0
        while kind_at(hi) != BLOWUP:
            hi *= 2.0
            if hi > 1e12:
                raise BracketFailure("no blowup found up to u0 = 1e12")
        lo = hi / 2.0 if hi > 2.0 else 1.0
    else:
        lo = 0.5
        while kind_at(lo) != GLOBAL_POSITIVE:
            lo *= 0.5
            if lo < 1e-12:
                raise BracketFailure("no global shot found down to u0 = 1e-12")
        hi = lo * 2.0 if lo < 0.5 else 1.0

    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if kind_at(mid) == GLOBAL_POSITIVE:
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), (lo, hi), evaluations)


def blowup_radius(
    problem: Problem, u0: float, opts: IntegratorOptions | None = None
) -> float:
    """Blowup location rho(u0); strictly decreasing in u0, approaching R at u*."""
    c = classify(problem, u0, opts)
    if c.kind != BLOWUP:
        raise NotBlowup(f"classification at u0={u0:.17g} is {c.kind}")
    return c.r_blow


def boundary_coefficient(
    problem: Problem, u0: float, opts: IntegratorOptions | None = None
) -> FitResult:
    """Boundary coefficient c(u0) of a globally positive center shot."""
    c = classify(problem, u0, opts)
    if c.kind != GLOBAL_POSITIVE:
        raise NotConverged(f"shot at u0={u0:.17g} classified {c.kind}")
    return c.coefficient


@dataclass(frozen=True)
class SolutionDescriptor:
    """Which solution family matched a boundary-coefficient target.

    family is "center" (parameter = u0), "deadcore" (parameter = rho), or
    "origin" (parameter 0); coefficient is the achieved value.
    """

    family: str
    parameter: float
    coefficient: float
    evaluations: int
    bracket: tuple[float, float]


def solve_for_boundary_coefficient(
    problem: Problem,
    c_target: float,
    tol: float = 1e-6,
    opts: IntegratorOptions | None = None,
) -> tuple[SolutionDescriptor, Trajectory]:
    """Find the radial solution with boundary coefficient c_target.

    Superlinear: bisection over u0 in (0, u*), where c(u0) is increasing;
    TargetUnreachable if the coefficient at the accessible edge of the
    bracket stays below c_target. Sublinear: the families are ordered by
    comparison (dead cores with rho descending give small c, the
    origin-touching solution is the interface, center values give larger
    c); the matching family member is located by monotone bisection.
    """
    if c_target <= 0:
        raise NonPositiveTarget("the boundary coefficient target must be positive")
    regime = validate(problem)
    if regime is Regime.SUPERLINEAR:
        return _solve_superlinear(problem, c_target, tol, opts)
    return _solve_sublinear(problem, c_target, tol, opts)


def _solve_superlinear(problem, c_target, tol, opts):
    evals = [0]

    def c_of(u0: float) -> tuple[float, Trajectory]:
        evals[0] += 1
        cl = classify(problem, u0, opts)
        if cl.kind != GLOBAL_POSITIVE:
            raise TargetUnreachable(
                f"shot at u0={u0:.17g} classified {cl.kind} during the search"
            )
        return cl.coefficient.coefficient, cl.trajectory

    th = find_ustar(problem, 1e-7, opts)
    evals[0] += th.evaluations
    hi = th.bracket[0]  # largest u0 known to be globally positive
    c_hi, traj_hi = c_of(hi)
    if abs(c_hi - c_target) <= tol * c_target:
        return _descriptor("center", hi, c_hi, evals[0], (hi, hi)), traj_hi
    if c_hi < c_target:
        raise TargetUnreachable(
            f"coefficient at the sub-threshold edge is {c_hi:.6g} < {c_target:.6g}"
        )
    lo = hi / 2.0
    c_lo, traj_lo = c_of(lo)
    while c_lo > c_target:
        if abs(c_lo - c_target) <= tol * c_target:
            return _descriptor("center", lo, c_lo, evals[0], (lo, hi)), traj_lo
        hi, c_hi = lo, c_lo
        lo /= 2.0
        if lo < 1e-12 * th.u_star:
            raise TargetUnreachable(f"no shot with coefficient below {c_lo:.6g}")
        c_lo, traj_lo = c_of(lo)
    return _bisect_monotone(
        c_of, lo, hi, c_target, tol, evals, "center", increasing=True
    )


def _solve_sublinear(problem, c_target, tol, opts):
    evals = [0]
    R = problem.radius
    bm = indicial_roots(problem.mu)[0]

    def fit_traj(traj):
        return fit_power_coefficient(traj, bm, strict=False).coefficient

    def c_center(u0):
        evals[0] += 1
        traj = integrate(problem, center_series(problem, u0, 1e-3 * R), opts)
        return fit_traj(traj), traj

    def c_deadcore(rho):
        evals[0] += 1
        traj = integrate(
            problem, dead_core_edge_series(problem, rho, 1e-3 * (R - rho)), opts
        )
        return fit_traj(traj), traj

    # the origin-touching solution separates the dead-core and center families
    traj_org = integrate(problem, origin_touch_series(problem, 1e-3 * R), opts)
    evals[0] += 1
    c_org = fit_traj(traj_org)
    if abs(c_org - c_target) <= tol * c_target:
        return (
            _descriptor("origin", 0.0, c_org, evals[0], (0.0, 0.0)),
            traj_org,
        )

    if c_target > c_org:
        # center family: c increasing in u0, approaching c_org from above as u0 -> 0
        u = 1.0
        c_u, traj_u = c_center(u)
        if c_u < c_target:
            lo, c_lo = u, c_u
            hi = 2.0 * u
            c_hi, _ = c_center(hi)
            while c_hi < c_target:
                lo, c_lo = hi, c_hi
                hi *= 2.0
                if hi > 1e12:
                    raise TargetUnreachable(
                        f"no center shot with coefficient above {c_hi:.6g}"
                    )
                c_hi, _ = c_center(hi)
        else:
            hi, c_hi = u, c_u
            lo = 0.5 * u
            c_lo, _ = c_center(lo)
            while c_lo > c_target:
                hi, c_hi = lo, c_lo
                lo *= 0.5
                if lo < 1e-12:
                    raise TargetUnreachable(
                        f"no center shot with coefficient below {c_lo:.6g}; "
                        f"the family bottoms out at the origin value {c_org:.6g}"
                    )
                c_lo, _ = c_center(lo)
        return _bisect_monotone(
            c_center, lo, hi, c_target, tol, evals, "center", increasing=True
        )

    # dead-core family: c decreasing in rho, approaching c_org as rho -> 0
    rho = 0.5 * R
    c_rho, _ = c_deadcore(rho)
    if c_rho > c_target:
        a, c_a = rho, c_rho
        b = R - 0.5 * (R - rho)
        c_b, _ = c_deadcore(b)
        while c_b > c_target:
            a, c_a = b, c_b
            b = R - 0.5 * (R - b)
            if R - b < 1e-9 * R:
                raise TargetUnreachable(
                    f"no dead-core solution with coefficient below {c_b:.6g}"
                )
            c_b, _ = c_deadcore(b)
    else:
        b, c_b = rho, c_rho
        a = 0.5 * rho
        c_a, _ = c_deadcore(a)
        while c_a < c_target:
            b, c_b = a, c_a
            a *= 0.5
            if a < 1e-12 * R:
                raise TargetUnreachable(
                    f"no dead-core solution with coefficient above {c_a:.6g}; "
                    f"the family tops out at the origin value {c_org:.6g}"
                )
            c_a, _ = c_deadcore(a)
    return _bisect_monotone(
        c_deadcore, a, b, c_target, tol, evals, "deadcore", increasing=False
    )


def _descriptor(family, parameter, coefficient, evaluations, bracket):
    return SolutionDescriptor(
        family=family,
        parameter=float(parameter),
        coefficient=float(coefficient),
        evaluations=evaluations,
        bracket=(float(bracket[0]), float(bracket[1])),
    )


def _bisect_monotone(c_of, lo, hi, c_target, tol, evals, family, increasing):
    """Bisect a monotone coefficient map until the target is matched."""
    best = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        c_mid, traj = c_of(mid)
        best = (mid, c_mid, traj)
        if abs(c_mid - c_target) <= tol * c_target:
            return _descriptor(family, mid, c_mid, evals[0], (lo, hi)), traj
        went_low = c_mid < c_target
        if went_low == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(abs(hi), 1.0):
            break
    raise TargetUnreachable(
        f"bisection stalled at coefficient {best[1]:.6g} for target {c_target:.6g}"
    )
