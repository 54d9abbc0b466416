"""Quantitative acceptance battery for the package's headline claims.

Each criterion runs a self-contained experiment and reports measured
values, the expectation, and the tolerance it was judged against. The
battery is what `hardyshoot verify` executes; the test suite asserts the
same criteria one by one. Tolerances are fixed here and are not to be
loosened to make a failing criterion pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import (
    envelope_extrema_check,
    fit_power_coefficient,
    richardson,
    w_transform_limit,
)
from .errors import HardyShootError
from .linearfuchs import eta_profile, integrate_linear, linear_coefficient
from .model import Problem, exponents, indicial_roots, mu_star
from .shooting import (
    BLOWUP,
    GLOBAL_POSITIVE,
    boundary_coefficient,
    classify,
    find_ustar,
    solve_for_boundary_coefficient,
)
from .stepper import (
    IntegratorOptions,
    Launch,
    State,
    center_series,
    dead_core_edge_series,
    integrate,
    integrate_forced,
    refine_until,
)

__all__ = ["CriterionResult", "CRITERIA", "run", "report_lines"]

_P3 = Problem(dim_n=3, radius=1.0, mu=0.125, power=3.0)
_PH = Problem(dim_n=3, radius=1.0, mu=0.125, power=0.5)


@dataclass
class CriterionResult:
    cid: str
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        parts = []
        for k, v in self.measured.items():
            if isinstance(v, float):
                parts.append(f"{k}={v:.6g}")
            else:
                parts.append(f"{k}={v}")
        body = " ".join(parts)
        return f"[{mark}] {self.cid} {self.name}: {body} ({self.seconds:.1f}s)"


def _threshold(cache: dict, power: float):
    key = ("ustar", power)
    if key not in cache:
        prob = Problem(dim_n=3, radius=1.0, mu=0.125, power=power)
        cache[key] = find_ustar(prob, 1e-6)
    return cache[key]


def _log_sample(r, u, r_pts):
    """Power-law-faithful interpolation: linear in (log r, log u)."""
    xs = np.log(np.asarray(r))
    ys = np.log(np.asarray(u))
    return np.exp(np.interp(np.log(np.asarray(r_pts)), xs, ys))


def _c01_threshold_amplitude(cache):
    t0 = time.perf_counter()
    th = find_ustar(_P3, 1e-6)
    cache[("ustar", 3.0)] = th
    cl = classify(_P3, th.bracket[0])
    wl = w_transform_limit(cl.trajectory, _P3)
    target = math.sqrt(0.125 + mu_star(3.0))
    rel = abs(wl.coefficient - target) / target
    elapsed = time.perf_counter() - t0
    ok = (
        cl.kind == GLOBAL_POSITIVE
        and wl.converged
        and rel < 0.01
        and elapsed < 30.0
    )
    return ok, {
        "u_star": th.u_star,
        "w_limit": wl.coefficient,
        "expected": target,
        "rel_err": rel,
        "tol": 0.01,
        "runtime_s": elapsed,
        "runtime_limit_s": 30.0,
    }


def _c02_case_split(cache):
    worst = 0.0
    meas = {}
    ok = True
    for p in (2.0, 5.0, 7.0):
        prob = Problem(dim_n=3, radius=1.0, mu=0.125, power=p)
        th = _threshold(cache, p)
        cl = classify(prob, th.bracket[0])
        wl = w_transform_limit(cl.trajectory, prob)
        target = (0.125 + mu_star(p)) ** (1.0 / (p - 1.0))
        rel = abs(wl.coefficient - target) / target
        worst = max(worst, rel)
        meas[f"rel_err_p{p:g}"] = rel
        ok = ok and wl.converged and rel < 0.02
    meas["tol"] = 0.02
    meas["worst"] = worst
    return ok, meas


def _c03_boundary_law(cache):
    th = _threshold(cache, 3.0)
    cl = classify(_P3, th.u_star / 2.0)
    bm, bp = indicial_roots(_P3.mu)
    fit_minus = cl.coefficient
    fit_plus = fit_power_coefficient(cl.trajectory, bp, strict=False)
    ok = (
        cl.kind == GLOBAL_POSITIVE
        and fit_minus is not None
        and fit_minus.converged
        and fit_minus.coefficient > 0
        and fit_minus.residual < 1e-3
        and not fit_plus.converged
    )
    return ok, {
        "c_minus": fit_minus.coefficient if fit_minus else float("nan"),
        "resid_minus": fit_minus.residual if fit_minus else float("nan"),
        "tol": 1e-3,
        "plus_converged": fit_plus.converged,
    }


def _c04_blowup_amplitude(cache):
    th = _threshold(cache, 3.0)
    cl = classify(_P3, 2.0 * th.u_star)
    target = math.sqrt(2.0)
    amp = cl.amplitude_check.coefficient if cl.amplitude_check else float("nan")
    rel = abs(amp - target) / target
    ok = cl.kind == BLOWUP and rel < 0.02
    return ok, {
        "kind": cl.kind,
        "amplitude": amp,
        "expected": target,
        "rel_err": rel,
        "tol": 0.02,
        "r_blow": cl.r_blow if cl.r_blow is not None else float("nan"),
    }


def _c05_origin_touching(cache):
    target = exponents(_PH).origin_amplitude

    def monitor(traj):
        return float(_log_sample(traj.r, traj.u, [0.1])[0]) / 0.1**4

    traj = refine_until(_PH, Launch("origin"), monitor, 1e-6)
    rks = 0.1 * 2.0 ** (-np.arange(5))
    qv = _log_sample(traj.r, traj.u, rks) / rks**4
    ext = float(richardson(qv, 2.0, [2.0])[-1])
    rel = abs(ext - target) / target
    fit = fit_power_coefficient(traj, indicial_roots(_PH.mu)[0], strict=False)
    ok = rel < 0.01 and fit.converged and fit.coefficient > 0
    return ok, {
        "origin_amplitude": ext,
        "expected": target,
        "rel_err": rel,
        "tol": 0.01,
        "boundary_coefficient": fit.coefficient,
        "boundary_resid": fit.residual,
    }


def _c06_deadcore_family(cache):
    bm = indicial_roots(_PH.mu)[0]
    rhos = (0.3, 0.5, 0.7)
    coeffs = []
    shifts = []
    ok = True
    for rho in rhos:
        h = 1e-3 * (_PH.radius - rho)
        traj = integrate(_PH, dead_core_edge_series(_PH, rho, h))
        fit = fit_power_coefficient(traj, bm, strict=False)
        ok = ok and fit.converged and fit.coefficient > 0
        ok = ok and float(np.min(traj.u)) > 0
        tight = IntegratorOptions(rel_tol=0.5e-9)
        traj2 = integrate(_PH, dead_core_edge_series(_PH, rho, h), tight)
        fit2 = fit_power_coefficient(traj2, bm, strict=False)
        shift = abs(fit2.coefficient - fit.coefficient) / abs(fit.coefficient)
        shifts.append(shift)
        ok = ok and shift < 1e-3
        coeffs.append(fit.coefficient)
    decreasing = coeffs[0] > coeffs[1] > coeffs[2]
    ok = ok and decreasing
    meas = {f"c_rho{r:g}": c for r, c in zip(rhos, coeffs)}
    meas["decreasing"] = decreasing
    meas["max_tol_shift"] = max(shifts)
    meas["tol"] = 1e-3
    return ok, meas


def _c07_no_crossing(cache):
    th = _threshold(cache, 3.0)
    R = _P3.radius
    trajs = [
        integrate(_P3, center_series(_P3, th.u_star * j / 11.0, 1e-3))
        for j in range(1, 11)
    ]
    dgrid = np.geomspace(1e-8, R - 2e-3, 400)
    rgrid = np.sort(R - dgrid)

    def on_grid(tr):
        xs = np.log(R - tr.r)[::-1]
        ys = np.log(tr.u)[::-1]
        return np.exp(np.interp(np.log(R - rgrid), xs, ys))

    grids = [on_grid(t) for t in trajs]
    worst = -np.inf
    for a, b in zip(grids, grids[1:]):
        worst = max(worst, float(np.max((a - b) / np.maximum(b, 1e-300))))
    ok = worst <= 1e-9
    return ok, {"n_shots": 10, "worst_violation": worst, "tol": 1e-9}


def _c08_linear_scaling(cache):
    prob = Problem(dim_n=3, radius=1.0, mu=0.1875, power=3.0)
    fit1 = linear_coefficient(integrate_linear(prob, 1.0))
    devs = {}
    ok = fit1.converged and fit1.coefficient > 0
    for lam in (2.0, 10.0):
        fl = linear_coefficient(integrate_linear(prob, lam))
        dev = abs(fl.coefficient - lam * fit1.coefficient) / (
            lam * fit1.coefficient
        )
        devs[f"dev_lam{lam:g}"] = dev
        ok = ok and dev < 1e-10
    meas = {
        "c0": fit1.coefficient,
        "exponent": fit1.exponent,
        "resid": fit1.residual,
        **devs,
        "tol": 1e-10,
    }
    return ok, meas


def _c09_eta_profile(cache):
    traj, c_eta = eta_profile(-1.0, 1.0)
    min_slope = float(np.min(traj.dh))
    tight = IntegratorOptions(rel_tol=1e-10)
    _, c_eta2 = eta_profile(-1.0, 1.0, tight)
    shift = abs(c_eta2 - c_eta) / abs(c_eta)
    ok = c_eta > 0 and min_slope >= -1e-12 * float(np.max(np.abs(traj.h)))
    ok = ok and shift < 1e-3
    return ok, {
        "C_eta": c_eta,
        "min_slope": min_slope,
        "refine_shift": shift,
        "tol": 1e-3,
    }


def _c10_envelope(cache):
    th = _threshold(cache, 3.0)
    fracs = np.linspace(0.3, 1.6, 20)
    tot_max = tot_min = ok_max = ok_min = 0
    for f in fracs:
        cl = classify(_P3, float(f) * th.u_star)
        a, b, c, d = envelope_extrema_check(cl.trajectory, _P3)
        ok_max += a
        tot_max += b
        ok_min += c
        tot_min += d
    ok = ok_max == tot_max and ok_min == tot_min and (tot_max + tot_min) > 0
    return ok, {
        "n_shots": 20,
        "maxima_ok": f"{ok_max}/{tot_max}",
        "minima_ok": f"{ok_min}/{tot_min}",
    }


def _c11_manufactured_order(cache):
    a = 0.3
    N, R, mu = _P3.dim_n, _P3.radius, _P3.mu

    def forcing(r):
        d = R - r
        return (
            a * (a - 1.0) * d ** (a - 2.0)
            - (N - 1) / r * a * d ** (a - 1.0)
            + mu * d ** (a - 2.0)
        )

    errs, hbars = [], []
    for rt in (1e-5, 1e-7, 1e-9):
        opts = IntegratorOptions(rel_tol=rt, max_step=R / 4.0)
        start = State(R / 4.0, (R - R / 4.0) ** a, -a * (R - R / 4.0) ** (a - 1.0))
        tr = integrate_forced(_P3, start, opts, forcing)
        r, u = tr.r, tr.u
        msk = (r >= R / 4.0) & (r <= R - 1e-3)
        exact = (R - r[msk]) ** a
        errs.append(float(np.max(np.abs(u[msk] - exact) / exact)))
        inner = msk & (r <= R - R / 100.0)
        hbars.append(float(np.mean(np.diff(r[inner]))))
    order = float(np.polyfit(np.log(hbars), np.log(errs), 1)[0])
    ok = order >= 4.0
    return ok, {
        "order": order,
        "min_order": 4.0,
        "errs": "/".join(f"{e:.2e}" for e in errs),
    }


def _c12_exponent_identities(cache):
    rng = np.random.default_rng(20260817)
    worst_sum = worst_prod = worst_mustar = 0.0
    n = 0
    while n < 1000:
        mu = float(rng.uniform(-4.0, 0.25))
        p = float(rng.uniform(0.0, 8.0))
        if mu == 0.0 or mu >= 0.25 or p <= 0.0 or abs(p - 1.0) < 1e-3:
            continue
        n += 1
        bm, bp = indicial_roots(mu)
        worst_sum = max(worst_sum, abs(bm + bp - 1.0))
        worst_prod = max(worst_prod, abs(bm * bp - mu))
        ms = mu_star(p)
        ref = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0))
        worst_mustar = max(worst_mustar, abs(ms - ref) / ref)
    ok = worst_sum < 1e-14 and worst_prod < 1e-13 and worst_mustar < 1e-13
    return ok, {
        "n": n,
        "worst_sum": worst_sum,
        "worst_prod": worst_prod,
        "worst_mustar_rel": worst_mustar,
        "tols": "1e-14/1e-13/1e-13",
    }


def _c13_roundtrip(cache):
    th = _threshold(cache, 3.0)
    cases = [
        (_PH, 0.3),
        (_PH, 0.7),
        (_PH, 1.5),
        (_P3, 0.3 * th.u_star),
        (_P3, 0.6 * th.u_star),
    ]
    worst = 0.0
    ok = True
    for prob, u0 in cases:
        c = boundary_coefficient(prob, u0).coefficient
        desc, _ = solve_for_boundary_coefficient(prob, c, tol=1e-6)
        rel = abs(desc.parameter - u0) / u0
        worst = max(worst, rel)
        ok = ok and desc.family == "center" and rel < 1e-4
    return ok, {"n_cases": 5, "worst_rel_err": worst, "tol": 1e-4}


CRITERIA = (
    ("C1", "threshold and maximal amplitude (p=3)", _c01_threshold_amplitude),
    ("C2", "threshold case split p in {2,5,7}", _c02_case_split),
    ("C3", "sub-threshold boundary law at u*/2", _c03_boundary_law),
    ("C4", "interior blowup amplitude at 2u*", _c04_blowup_amplitude),
    ("C5", "origin-touching solution (p=1/2)", _c05_origin_touching),
    ("C6", "dead-core family (p=1/2)", _c06_deadcore_family),
    ("C7", "no-crossing of ordered shots", _c07_no_crossing),
    ("C8", "linear limit and scaling", _c08_linear_scaling),
    ("C9", "eta profile monotone (mu=-1)", _c09_eta_profile),
    ("C10", "envelope extrema bounds", _c10_envelope),
    ("C11", "manufactured-solution order", _c11_manufactured_order),
    ("C12", "exponent identities", _c12_exponent_identities),
    ("C13", "inverse-problem round trip", _c13_roundtrip),
)


def run(filter: str | None = None, cache: dict | None = None) -> list[CriterionResult]:
    """Run the battery, optionally restricted by a substring filter.

    The filter matches case-insensitively against "<cid> <name>". A shared
    cache holds the expensive threshold results across criteria. Criteria
    that raise report as failures with the error attached; they never
    abort the battery.
    """
    cache = cache if cache is not None else {}
    results = []
    for cid, name, fn in CRITERIA:
        if filter and filter.lower() not in f"{cid} {name}".lower():
            continue
        t0 = time.perf_counter()
        try:
            passed, measured = fn(cache)
        except HardyShootError as exc:
            passed, measured = False, {"error": exc.code, "message": str(exc)}
        except Exception as exc:  # honest report, not a crash
            passed, measured = False, {"error": type(exc).__name__, "message": str(exc)}
        results.append(
            CriterionResult(cid, name, passed, measured, time.perf_counter() - t0)
        )
    return results


def report_lines(results: list[CriterionResult]) -> list[str]:
    lines = [res.line() for res in results]
    n_pass = sum(1 for r in results if r.passed)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return lines
