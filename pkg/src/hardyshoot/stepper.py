"""Adaptive integration of the radial equation with boundary-layer handoff.

The equation

    u'' + (N-1)/r u' + mu/(R-r)^2 u = u^p,   u'(0) = 0,

is integrated in two phases. Away from the boundary the state (u, u')
evolves in r under an embedded Runge-Kutta 4(5) pair. Inside the boundary
layer (R - r < delta_switch) the integration switches to the stretched
variable tau = ln(delta_switch / (R - r)) and evolves y = u * (R-r)^(-e),
which keeps the Fuchsian scales O(1) across the ten decades of R - r down
to delta_stop. The scaling exponent e is beta_minus on the sub-threshold
branch and -2/(p-1) on the blowup-scaled branch.

Termination events: reaching the boundary window (R - r <= delta_stop),
u crossing the blowup proxy u_cap, u crossing zero, or step-size underflow.
Crossing locations are refined by bisection on the dense output of the last
accepted step.

Launches at the three admissible starting points (regular center, dead-core
edge, origin contact) are series-based; their truncation error is the
tunable knob that refine_until contracts.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import RK45

from .errors import (
    HTooLarge,
    MaxSteps,
    NoConvergence,
    NonPositive,
    WrongRegime,
)
from .model import Problem, Regime, exponents, indicial_roots, mu_star, validate

__all__ = [
    "State",
    "Event",
    "Trajectory",
    "IntegratorOptions",
    "Launch",
    "REACHED_BOUNDARY_WINDOW",
    "BLOWUP_DETECTED",
    "HIT_ZERO",
    "STEP_FAILURE",
    "center_series",
    "dead_core_edge_series",
    "origin_touch_series",
    "launch_state",
    "integrate",
    "integrate_forced",
    "refine_until",
]

REACHED_BOUNDARY_WINDOW = "ReachedBoundaryWindow"
BLOWUP_DETECTED = "BlowupDetected"
HIT_ZERO = "HitZero"
STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class State:
    """One point of a radial profile: position, value, derivative."""

    r: float
    u: float
    du: float


@dataclass(frozen=True)
class Event:
    """Trajectory termination record; r is the event location."""

    kind: str
    r: float
    note: str = ""


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and termination knobs for integrate().

    None fields are resolved against the problem at integration time:
    u_cap to 1e8 * max(1, u_start) in the superlinear regime (1e300 for
    sublinear and linear runs, where unbounded boundary growth u ~ c
    (R-r)^beta_minus with beta_minus < 0 is legitimate and must not be cut
    off), delta_stop to 1e-10 * R, delta_switch to R/100, max_step to R/50.

    abs_tol defaults to 1e-300, i.e. pure relative error control: dead-core
    launches start near 1e-19 and linear runs must scale exactly, so any
    practical absolute floor would poison the step controller.

    branch selects the boundary-layer scaling: "sub" rides (R-r)^beta_minus,
    "blowup" rides (R-r)^(-2/(p-1)) (superlinear only).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-300
    u_cap: float | None = None
    delta_stop: float | None = None
    max_steps: int = 400_000
    delta_switch: float | None = None
    branch: str = "sub"
    max_step: float | None = None
    max_step_tau: float = 0.25


@dataclass(frozen=True)
class Trajectory:
    """Sampled radial profile plus its termination event.

    r, u, du are parallel arrays with r strictly increasing; latch_r is the
    first radius at which the blowup envelope certificate fired (superlinear
    runs only); refine_history carries the convergence record attached by
    refine_until.
    """

    problem: Problem
    options: IntegratorOptions
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    event: Event
    n_steps: int
    latch_r: float | None = None
    refine_history: tuple[float, ...] | None = None

    @property
    def samples(self) -> tuple[State, ...]:
        return tuple(
            State(float(a), float(b), float(c))
            for a, b, c in zip(self.r, self.u, self.du)
        )

    def to_csv(self) -> str:
        lines = ["r,u,du"]
        for a, b, c in zip(self.r, self.u, self.du):
            lines.append(f"{a:.17g},{b:.17g},{c:.17g}")
        lines.append(f"# event: {self.event.kind} r={self.event.r:.17g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "problem": asdict(self.problem),
            "options": asdict(self.options),
            "samples": [
                [float(a), float(b), float(c)]
                for a, b, c in zip(self.r, self.u, self.du)
            ],
            "event": asdict(self.event),
            "n_steps": self.n_steps,
            "latch_r": self.latch_r,
        }
        if self.refine_history is not None:
            doc["refine_history"] = list(self.refine_history)
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Trajectory":
        doc = json.loads(text)
        arr = np.asarray(doc["samples"], dtype=float).reshape(-1, 3)
        hist = doc.get("refine_history")
        return cls(
            problem=Problem(**doc["problem"]),
            options=IntegratorOptions(**doc["options"]),
            r=arr[:, 0].copy(),
            u=arr[:, 1].copy(),
            du=arr[:, 2].copy(),
            event=Event(**doc["event"]),
            n_steps=int(doc.get("n_steps", 0)),
            latch_r=doc.get("latch_r"),
            refine_history=tuple(hist) if hist is not None else None,
        )


def _resolve(
    problem: Problem,
    u_start: float,
    opts: IntegratorOptions | None,
    linear: bool = False,
) -> IntegratorOptions:
    """Fill in problem-dependent defaults and check the option invariants."""
    o = opts if opts is not None else IntegratorOptions()
    if o.rel_tol <= 0 or o.abs_tol <= 0:
        raise NonPositive("rel_tol and abs_tol must be positive")
    if o.max_steps <= 0:
        raise NonPositive("max_steps must be positive")
    R = problem.radius
    delta_stop = o.delta_stop if o.delta_stop is not None else 1e-10 * R
    delta_switch = o.delta_switch if o.delta_switch is not None else R / 100.0
    if delta_stop <= 0:
        raise NonPositive("delta_stop must be positive")
    if delta_switch <= delta_stop:
        raise NonPositive("delta_switch must exceed delta_stop")
    u_cap = o.u_cap
    if u_cap is None:
        superlinear = problem.power > 1 and not linear
        u_cap = 1e8 * max(1.0, u_start) if superlinear else 1e300
    if u_cap <= 1:
        raise NonPositive("u_cap must exceed 1")
    max_step = o.max_step if o.max_step is not None else R / 50.0
    if max_step <= 0 or o.max_step_tau <= 0:
        raise NonPositive("step caps must be positive")
    return replace(
        o,
        u_cap=u_cap,
        delta_stop=delta_stop,
        delta_switch=delta_switch,
        max_step=max_step,
    )


def _cross_time(sol, g: Callable[[float, np.ndarray], float]) -> tuple[float, np.ndarray]:
    """First time in the dense-output interval where g >= 0 (bisection).

    g must be negative at the left endpoint; non-finite values count as
    crossed, which makes the search robust against overflow inside the step.
    """
    lo, hi = sol.t_min, sol.t_max
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        val = g(mid, sol(mid))
        if (not np.isfinite(val)) or val >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi, sol(hi)


def _drive(
    dim_n: int,
    radius: float,
    mu: float,
    start: State,
    o: IntegratorOptions,
    *,
    power: float | None,
    e_exp: float,
    forcing: Callable[[float], float] | None = None,
    latch_power: float | None = None,
):
    """Two-phase driver shared by the nonlinear, forced, and linear runs.

    power is the reaction exponent (None drops the u^p term), e_exp the
    boundary-layer scaling, latch_power enables the blowup envelope latch.
    Returns (r, u, du arrays, Event, latch_r, n_steps).
    """
    R, n = radius, dim_n
    u_cap = o.u_cap
    rs = [start.r]
    us = [start.u]
    dus = [start.du]
    nsteps = 0
    event: Event | None = None
    latch_r: float | None = None
    latch_run = 0

    if latch_power is not None:
        m_lat = 2.0 / (latch_power - 1.0)
        ms_lat = mu_star(latch_power)

        def w0(r: float) -> float:
            eta = 0.0 if n == 1 else 2.0 * (n - 1) * (R - r) / ((latch_power - 1.0) * r)
            return (ms_lat + mu + eta) ** (1.0 / (latch_power - 1.0))

        def check_latch(r1: float, u1: float, du1: float) -> None:
            # two consecutive samples above the envelope with w increasing
            # certify monotone escape to blowup
            nonlocal latch_r, latch_run
            if latch_r is not None:
                return
            d1 = R - r1
            w = u1 * d1 ** m_lat
            dw = d1 ** (m_lat - 1.0) * (du1 * d1 - m_lat * u1)
            if not (math.isfinite(w) and math.isfinite(dw)):
                return
            if w > w0(r1) * (1.0 + 1e-12) and dw > 0.0:
                latch_run += 1
                if latch_run >= 2:
                    latch_r = r1
            else:
                latch_run = 0
    else:
        def check_latch(r1: float, u1: float, du1: float) -> None:
            return

    def append(r1: float, u1: float, du1: float) -> bool:
        if r1 <= rs[-1]:
            return False
        rs.append(r1)
        us.append(u1)
        dus.append(du1)
        return True

    def finish():
        return (
            np.asarray(rs, dtype=float),
            np.asarray(us, dtype=float),
            np.asarray(dus, dtype=float),
            event,
            latch_r,
            nsteps,
        )

    if start.u >= u_cap:
        event = Event(BLOWUP_DETECTED, start.r, "start above u_cap")
        return finish()

    # ---- phase 1: state (u, du) in r up to the layer boundary ----
    def rhs_r(r, y):
        u, du = y
        d = R - r
        with np.errstate(over="ignore", invalid="ignore"):
            f = max(u, 0.0) ** power if power is not None else 0.0
            if forcing is not None:
                f = f + forcing(r)
            geo = 0.0 if n == 1 else (n - 1) * du / r
            return np.array([du, f - mu * u / (d * d) - geo])

    r_sw = R - o.delta_switch
    if start.r < r_sw:
        first = min(1e-3 * R, o.max_step, 0.5 * (r_sw - start.r))
        solver = RK45(
            rhs_r,
            start.r,
            np.array([start.u, start.du]),
            r_sw,
            rtol=o.rel_tol,
            atol=o.abs_tol,
            max_step=o.max_step,
            first_step=first,
        )
        while solver.status == "running":
            solver.step()
            nsteps += 1
            if nsteps > o.max_steps:
                raise MaxSteps(f"exceeded {o.max_steps} steps")
            if solver.status == "failed":
                event = Event(STEP_FAILURE, rs[-1], "step size underflow")
                break
            u1, du1 = float(solver.y[0]), float(solver.y[1])
            if not (math.isfinite(u1) and math.isfinite(du1)):
                event = Event(STEP_FAILURE, rs[-1], "state not finite")
                break
            if u1 <= 0.0:
                t_hit, yh = _cross_time(solver.dense_output(), lambda t, y: -y[0])
                append(t_hit, max(float(yh[0]), 0.0), float(yh[1]))
                event = Event(HIT_ZERO, max(t_hit, rs[-1]))
                break
            if u1 >= u_cap:
                t_hit, yh = _cross_time(
                    solver.dense_output(), lambda t, y: y[0] - u_cap
                )
                if append(t_hit, float(yh[0]), float(yh[1])):
                    check_latch(t_hit, float(yh[0]), float(yh[1]))
                event = Event(BLOWUP_DETECTED, max(t_hit, rs[-1]), "u reached u_cap")
                break
            append(float(solver.t), u1, du1)
            check_latch(float(solver.t), u1, du1)
        if event is not None:
            return finish()

    # ---- phase 2: y = u (R-r)^(-e) in tau = ln(dsw / (R-r)) ----
    e = e_exp
    dsw = R - rs[-1]
    u_at, du_at = us[-1], dus[-1]
    y0 = u_at * dsw ** (-e)
    yt0 = dsw ** (-e) * (du_at * dsw + e * u_at)
    tau_max = math.log(dsw / o.delta_stop)

    def rhs_tau(tau, z):
        y, yt = z
        delta = dsw * math.exp(-tau)
        cn = 0.0 if n == 1 else (n - 1) * delta / (R - delta)
        with np.errstate(over="ignore", invalid="ignore"):
            f = 0.0
            if power is not None:
                f = max(y, 0.0) ** power * delta ** (e * (power - 1.0) + 2.0)
            if forcing is not None:
                f = f + forcing(R - delta) * delta ** (2.0 - e)
            acc = f - yt * (1.0 - 2.0 * e + cn) - y * (e * e - e + mu - e * cn)
            return np.array([yt, acc])

    def u_of(tau: float, z: np.ndarray) -> tuple[float, float, float]:
        d1 = dsw * math.exp(-tau)
        u1 = float(z[0]) * d1 ** e
        du1 = d1 ** (e - 1.0) * (float(z[1]) - e * float(z[0]))
        return R - d1, u1, du1

    solver = RK45(
        rhs_tau,
        0.0,
        np.array([y0, yt0]),
        tau_max,
        rtol=o.rel_tol,
        atol=o.abs_tol,
        max_step=o.max_step_tau,
        first_step=min(0.01, o.max_step_tau, 0.5 * tau_max),
    )
    while solver.status == "running":
        solver.step()
        nsteps += 1
        if nsteps > o.max_steps:
            raise MaxSteps(f"exceeded {o.max_steps} steps")
        if solver.status == "failed":
            event = Event(STEP_FAILURE, rs[-1], "step size underflow")
            break
        r1, u1, du1 = u_of(float(solver.t), solver.y)
        if not (math.isfinite(u1) and math.isfinite(du1)):
            event = Event(STEP_FAILURE, rs[-1], "state not finite")
            break
        if float(solver.y[0]) <= 0.0:
            tau_hit, zh = _cross_time(solver.dense_output(), lambda t, z: -z[0])
            rh, uh, duh = u_of(tau_hit, zh)
            append(rh, max(uh, 0.0), duh)
            event = Event(HIT_ZERO, max(rh, rs[-1]))
            break
        if u1 >= u_cap:
            tau_hit, zh = _cross_time(
                solver.dense_output(),
                lambda t, z: float(z[0]) * (dsw * math.exp(-t)) ** e - u_cap,
            )
            rh, uh, duh = u_of(tau_hit, zh)
            if append(rh, uh, duh):
                check_latch(rh, uh, duh)
            event = Event(BLOWUP_DETECTED, max(rh, rs[-1]), "u reached u_cap")
            break
        append(r1, u1, du1)
        check_latch(r1, u1, du1)

    if event is None:
        event = Event(
            REACHED_BOUNDARY_WINDOW,
            max(R - o.delta_stop, rs[-1]),
            f"delta_stop={o.delta_stop:.17g}",
        )
    return finish()


# ---- series launches ----

def _check_h(h: float, h_max: float) -> None:
    if h <= 0:
        raise NonPositive("launch step h must be positive")
    if h > h_max:
        raise HTooLarge(f"launch step h={h} exceeds {h_max}")


def center_series(
    problem: Problem, u0: float, h: float, abs_tol: float | None = None
) -> State:
    """Two-term Taylor launch at the regular center.

    u(h) = u0 + a2 h^2 with a2 = (u0^p - mu u0/R^2) / (2N). The first
    omitted term is cubic, a3 = -2 mu u0 / (3 (N+1) R^3) (the boundary
    potential is not even in r), so the remainder estimate is |a3| h^3;
    when abs_tol is given and the estimate exceeds it, HTooLarge is raised.
    """
    validate(problem)
    if u0 <= 0:
        raise NonPositive("u0 must be positive")
    n, R = problem.dim_n, problem.radius
    _check_h(h, R / 100.0)
    a2 = (u0 ** problem.power - problem.mu * u0 / R ** 2) / (2.0 * n)
    a3 = -2.0 * problem.mu * u0 / (3.0 * (n + 1.0) * R ** 3)
    if abs_tol is not None and abs(a3) * h ** 3 > abs_tol:
        raise HTooLarge(
            f"remainder estimate {abs(a3) * h ** 3:.3g} exceeds abs_tol {abs_tol:.3g}"
        )
    return State(h, u0 + a2 * h * h, 2.0 * a2 * h)


def dead_core_edge_series(
    problem: Problem, rho: float, h: float, abs_tol: float | None = None
) -> State:
    """Leading-order launch off a dead-core edge at r = rho.

    u(rho + h) = C h^q with q = 2/(1-p) and C the dead-core edge amplitude;
    the curvature balance u'' = u^p fixes both. The neglected transport and
    potential terms are O(h) relative to the retained balance; that relative
    size is the remainder estimate.
    """
    regime = validate(problem)
    if regime is not Regime.SUBLINEAR:
        raise WrongRegime("dead cores exist only for p < 1")
    R, n, p = problem.radius, problem.dim_n, problem.power
    if not 0.0 < rho < R:
        raise NonPositive(f"rho must lie in (0, R), got {rho}")
    if h <= 0:
        raise NonPositive("launch step h must be positive")
    if rho + h >= R:
        raise HTooLarge("rho + h must stay below R")
    q = 2.0 / (1.0 - p)
    C = exponents(problem).deadcore_edge_amplitude
    u = C * h ** q
    rel = (n - 1) * h / ((q - 1.0) * rho) + abs(problem.mu) * h * h / (
        q * (q - 1.0) * (R - rho - h) ** 2
    )
    if rel > 0.1:
        raise HTooLarge(f"neglected terms are {rel:.2%} of the retained balance")
    if abs_tol is not None and rel * u > abs_tol:
        raise HTooLarge(
            f"remainder estimate {rel * u:.3g} exceeds abs_tol {abs_tol:.3g}"
        )
    return State(rho + h, u, C * q * h ** (q - 1.0))


def origin_touch_series(
    problem: Problem, h: float, abs_tol: float | None = None
) -> State:
    """Leading-order launch of the solution that vanishes at the center.

    u(h) = c'' h^q with q = 2/(1-p) and c'' the origin amplitude. The
    potential term is the first neglected contribution, O(h^2) relative.
    """
    regime = validate(problem)
    if regime is not Regime.SUBLINEAR:
        raise WrongRegime("the origin-touching solution requires p < 1")
    R, n, p = problem.radius, problem.dim_n, problem.power
    _check_h(h, R / 100.0)
    q = 2.0 / (1.0 - p)
    cdd = exponents(problem).origin_amplitude
    u = cdd * h ** q
    rel = abs(problem.mu) * h * h / (q * (q + n - 2.0) * (R - h) ** 2)
    if abs_tol is not None and rel * u > abs_tol:
        raise HTooLarge(
            f"remainder estimate {rel * u:.3g} exceeds abs_tol {abs_tol:.3g}"
        )
    return State(h, u, cdd * q * h ** (q - 1.0))


@dataclass(frozen=True)
class Launch:
    """Series launch recipe for refine_until.

    kind is "center" (parameter = u0), "deadcore" (parameter = rho), or
    "origin" (no parameter); h0 overrides the default initial launch step.
    """

    kind: str
    parameter: float | None = None
    h0: float | None = None


def launch_state(problem: Problem, launch: Launch, h: float) -> State:
    if launch.kind == "center":
        return center_series(problem, launch.parameter, h)
    if launch.kind == "deadcore":
        return dead_core_edge_series(problem, launch.parameter, h)
    if launch.kind == "origin":
        return origin_touch_series(problem, h)
    raise NonPositive(f"unknown launch kind {launch.kind!r}")


# ---- integration fronts ----

def integrate(problem: Problem, start: State, opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate from start toward the boundary until the first event.

    Events: ReachedBoundaryWindow (R - r <= delta_stop), BlowupDetected
    (u >= u_cap), HitZero (u <= 0), StepFailure (step underflow or
    non-finite state). MaxSteps is raised, not reported as an event.
    """
    regime = validate(problem)
    if start.u < 0:
        raise NonPositive("start.u must be nonnegative")
    o = _resolve(problem, start.u, opts)
    R = problem.radius
    if not 0.0 <= start.r < R - o.delta_stop:
        raise NonPositive("start.r must lie in [0, R - delta_stop)")
    if o.branch == "blowup":
        if regime is not Regime.SUPERLINEAR:
            raise WrongRegime("the blowup-scaled branch requires p > 1")
        e = -2.0 / (problem.power - 1.0)
    elif o.branch == "sub":
        e = indicial_roots(problem.mu)[0]
    else:
        raise NonPositive(f"unknown branch {o.branch!r}")
    latch_p = problem.power if regime is Regime.SUPERLINEAR else None
    r, u, du, ev, latch, ns = _drive(
        problem.dim_n, R, problem.mu, start, o,
        power=problem.power, e_exp=e, latch_power=latch_p,
    )
    return Trajectory(problem, o, r, u, du, ev, ns, latch)


def integrate_forced(
    problem: Problem,
    start: State,
    opts: IntegratorOptions | None,
    forcing: Callable[[float], float],
) -> Trajectory:
    """Forced linear variant: solves u'' + (N-1)/r u' + mu/(R-r)^2 u = F(r).

    Used by the manufactured-solution convergence check; the reaction term
    is absent and no blowup latch applies.
    """
    validate(problem)
    o = _resolve(problem, start.u, opts, linear=True)
    if not 0.0 <= start.r < problem.radius - o.delta_stop:
        raise NonPositive("start.r must lie in [0, R - delta_stop)")
    e = indicial_roots(problem.mu)[0]
    r, u, du, ev, latch, ns = _drive(
        problem.dim_n, problem.radius, problem.mu, start, o,
        power=None, e_exp=e, forcing=forcing,
    )
    return Trajectory(problem, o, r, u, du, ev, ns, latch)


def refine_until(
    problem: Problem,
    launch: Launch,
    target: Callable[[Trajectory], float],
    tol: float,
    opts: IntegratorOptions | None = None,
    max_refinements: int = 12,
) -> Trajectory:
    """Launch-and-integrate with h, h/2, h/4, ... until target settles.

    target is any functional of the trajectory (a boundary coefficient, a
    checkpoint value). Convergence means two successive values differ by
    strictly less than tol relative; the returned trajectory carries the
    full value history in refine_history. Raises NoConvergence when the
    budget runs out (tol = 0 is therefore never attainable).
    """
    if tol < 0:
        raise NonPositive("tol must be nonnegative")
    if launch.h0 is not None:
        h = launch.h0
    elif launch.kind == "deadcore":
        h = 1e-3 * (problem.radius - launch.parameter)
    else:
        h = 1e-3 * problem.radius
    history: list[float] = []
    prev: float | None = None
    for _ in range(max_refinements):
        state = launch_state(problem, launch, h)
        traj = integrate(problem, state, opts)
        val = float(target(traj))
        history.append(val)
        if prev is not None and abs(val - prev) < tol * max(abs(val), 1e-300):
            return replace(traj, refine_history=tuple(history))
        prev = val
        h *= 0.5
    raise NoConvergence(
        f"target did not settle to {tol:g} within {max_refinements} refinements"
    )
