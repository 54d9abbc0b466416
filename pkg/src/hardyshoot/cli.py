"""Command-line front end.

Subcommands cover single shots, the solution families, threshold search,
the inverse boundary problem, parameter sweeps, certificates, the linear
runs, and the acceptance battery. Summaries are JSON (stdout or --out),
trajectories are CSV via --csv. Exit codes: 0 success, 1 domain error
(machine-readable JSON on stderr), 2 usage error.

A config file (--config, key=value lines, # comments) mirrors the flags;
explicit flags win. The only environment override is HARDYSHOOT_OUTDIR,
which prefixes relative output paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import verify as verify_mod
from .asymptotics import (
    fit_power_coefficient,
    subsolution_check,
    supersolution_margin,
    w_transform_limit,
)
from .errors import HardyShootError, NonPositive
from .linearfuchs import eta_profile, integrate_linear, linear_coefficient
from .model import Problem, Regime, exponents, validate
from .shooting import (
    GLOBAL_POSITIVE,
    classify,
    find_ustar,
    solve_for_boundary_coefficient,
)
from .stepper import (
    IntegratorOptions,
    center_series,
    dead_core_edge_series,
    integrate,
    origin_touch_series,
)

_INTEGRATOR_FLAGS = (
    ("rel_tol", float),
    ("abs_tol", float),
    ("u_cap", float),
    ("delta_stop", float),
    ("delta_switch", float),
    ("max_step", float),
    ("max_steps", int),
    ("branch", str),
)


def _add_problem(sp, require=True):
    sp.add_argument("--n", type=int, default=3, help="space dimension (default 3)")
    sp.add_argument("--r", type=float, default=1.0, help="ball radius (default 1)")
    sp.add_argument("--mu", type=float, required=require, help="potential strength")
    sp.add_argument("--p", type=float, required=require, help="reaction power")


def _add_integrator(sp):
    for name, typ in _INTEGRATOR_FLAGS:
        flag = "--" + name.replace("_", "-")
        if name == "branch":
            sp.add_argument(flag, choices=("sub", "blowup"))
        else:
            sp.add_argument(flag, type=typ)


def _add_output(sp, csv=True):
    sp.add_argument("--config", help="key=value file mirroring the flags")
    sp.add_argument("--out", help="write the summary JSON here instead of stdout")
    if csv:
        sp.add_argument("--csv", help="write the trajectory CSV here")


def _problem(args) -> Problem:
    return Problem(dim_n=args.n, radius=args.r, mu=args.mu, power=args.p)


def _options(args) -> IntegratorOptions | None:
    overrides = {}
    for name, _ in _INTEGRATOR_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    return IntegratorOptions(**overrides) if overrides else None


def _outpath(path: str) -> str:
    outdir = os.environ.get("HARDYSHOOT_OUTDIR")
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _emit(doc, args) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(_outpath(out), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(traj, args) -> str | None:
    path = getattr(args, "csv", None)
    if not path or traj is None:
        return None
    path = _outpath(path)
    with open(path, "w") as fh:
        fh.write(traj.to_csv())
    return path


def _fit_doc(fit) -> dict | None:
    if fit is None:
        return None
    return {
        "coefficient": fit.coefficient,
        "exponent": fit.exponent,
        "residual": fit.residual,
        "history": list(fit.history),
        "converged": fit.converged,
    }


def _traj_doc(traj) -> dict:
    return {
        "event": asdict(traj.event),
        "n_steps": traj.n_steps,
        "latch_r": traj.latch_r,
    }


# ---- handlers ----

def _cmd_exponents(args) -> int:
    prob = _problem(args)
    ex = exponents(prob)
    doc = {"problem": asdict(prob), "regime": validate(prob).value, **asdict(ex)}
    _emit(doc, args)
    return 0


def _shot_doc(prob, traj, u0=None, rho=None):
    from .model import indicial_roots

    fit = fit_power_coefficient(traj, indicial_roots(prob.mu)[0], strict=False)
    doc = {
        "problem": asdict(prob),
        **({"u0": u0} if u0 is not None else {}),
        **({"rho": rho} if rho is not None else {}),
        **_traj_doc(traj),
        "boundary_fit": _fit_doc(fit),
    }
    return doc


def _cmd_solve(args) -> int:
    prob = _problem(args)
    if args.u0 <= 0:
        raise NonPositive("u0 must be positive")
    traj = integrate(prob, center_series(prob, args.u0, args.launch_h * prob.radius), _options(args))
    doc = _shot_doc(prob, traj, u0=args.u0)
    doc["csv"] = _write_csv(traj, args)
    _emit(doc, args)
    return 0


def _cmd_deadcore(args) -> int:
    prob = _problem(args)
    h = args.launch_h * (prob.radius - args.rho)
    traj = integrate(prob, dead_core_edge_series(prob, args.rho, h), _options(args))
    doc = _shot_doc(prob, traj, rho=args.rho)
    doc["csv"] = _write_csv(traj, args)
    _emit(doc, args)
    return 0


def _cmd_origin(args) -> int:
    prob = _problem(args)
    traj = integrate(
        prob, origin_touch_series(prob, args.launch_h * prob.radius), _options(args)
    )
    doc = _shot_doc(prob, traj)
    doc["csv"] = _write_csv(traj, args)
    _emit(doc, args)
    return 0


def _cmd_classify(args) -> int:
    prob = _problem(args)
    cl = classify(prob, args.u0, _options(args))
    doc = {
        "problem": asdict(prob),
        "u0": args.u0,
        "kind": cl.kind,
        "coefficient": _fit_doc(cl.coefficient),
        "r_blow": cl.r_blow,
        "amplitude_check": _fit_doc(cl.amplitude_check),
        "band": list(cl.band) if cl.band else None,
        **_traj_doc(cl.trajectory),
    }
    doc["csv"] = _write_csv(cl.trajectory, args)
    _emit(doc, args)
    return 0


def _cmd_threshold(args) -> int:
    prob = _problem(args)
    th = find_ustar(prob, args.tol, _options(args))
    w_doc = None
    if args.with_limit:
        cl = classify(prob, th.bracket[0], _options(args))
        w_doc = _fit_doc(w_transform_limit(cl.trajectory, prob))
    doc = {
        "problem": asdict(prob),
        "tol": args.tol,
        "u_star": th.u_star,
        "bracket": list(th.bracket),
        "evaluations": th.evaluations,
        "w_transform_limit": w_doc,
    }
    _emit(doc, args)
    return 0


def _cmd_blowup_radius(args) -> int:
    prob = _problem(args)
    cl = classify(prob, args.u0, _options(args))
    from .errors import NotBlowup

    if cl.kind != "Blowup":
        raise NotBlowup(f"classification at u0={args.u0:.17g} is {cl.kind}")
    doc = {
        "problem": asdict(prob),
        "u0": args.u0,
        "r_blow": cl.r_blow,
        "amplitude_check": _fit_doc(cl.amplitude_check),
    }
    doc["csv"] = _write_csv(cl.trajectory, args)
    _emit(doc, args)
    return 0


def _cmd_boundary(args) -> int:
    prob = _problem(args)
    desc, traj = solve_for_boundary_coefficient(
        prob, args.c, tol=args.tol, opts=_options(args)
    )
    csv_path = _write_csv(traj, args)
    doc = {
        "problem": asdict(prob),
        "query": {"coefficient": args.c, "tol": args.tol},
        "result": {
            "family": desc.family,
            "parameter": desc.parameter,
            "coefficient": desc.coefficient,
            "trajectory_ref": csv_path,
        },
        "diagnostics": {
            "evaluations": desc.evaluations,
            "bracket": list(desc.bracket),
        },
    }
    _emit(doc, args)
    return 0


def _sweep_point(payload) -> dict:
    n, radius, mu, p, u0, overrides, label, value = payload
    try:
        prob = Problem(dim_n=n, radius=radius, mu=mu, power=p)
        opts = IntegratorOptions(**overrides) if overrides else None
        cl = classify(prob, u0, opts)
        fit = cl.coefficient
        return {
            label: value,
            "u0": u0,
            "kind": cl.kind,
            "coefficient": fit.coefficient if fit and fit.converged else None,
            "r_blow": cl.r_blow,
            "amplitude": cl.amplitude_check.coefficient if cl.amplitude_check else None,
        }
    except HardyShootError as exc:
        return {label: value, "u0": u0, "error": exc.code, "message": str(exc)}


def _cmd_sweep(args) -> int:
    if (args.values is None) == (args.linspace is None):
        raise NonPositive("pass exactly one of --values or --linspace")
    if args.values is not None:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    else:
        a, b, count = args.linspace.split(",")
        values = list(np.linspace(float(a), float(b), int(count)))
    if not values:
        raise NonPositive("empty sweep grid")
    overrides = {}
    for name, _ in _INTEGRATOR_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    payloads = []
    for v in values:
        n, radius, mu, p, u0 = args.n, args.r, args.mu, args.p, args.u0
        if args.param == "u0":
            u0 = v
        elif args.param == "mu":
            mu = v
        else:
            p = v
        payloads.append((n, radius, mu, p, u0, overrides, args.param, v))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(pl) for pl in payloads]
    doc = {
        "param": args.param,
        "base": {"n": args.n, "r": args.r, "mu": args.mu, "p": args.p, "u0": args.u0},
        "rows": rows,
    }
    _emit(doc, args)
    return 0


def _cmd_certify(args) -> int:
    prob = _problem(args)
    R = prob.radius
    if not 0 < args.r0 < R:
        raise NonPositive("r0 must lie in (0, R)")
    doc = {"problem": asdict(prob)}
    grid = np.linspace(args.r0, R * (1 - 1e-12), args.grid)
    if args.c_plus is not None:
        # margin is decreasing in r, so the annulus certificate hinges on r0
        margins = supersolution_margin(prob, args.c_plus, grid)
        i = int(np.argmax(margins))
        doc["c_plus"] = {
            "value": args.c_plus,
            "r0": args.r0,
            "max_margin": float(margins[i]),
            "argmax_r": float(grid[i]),
            "boundary_margin": float(margins[-1]),
            "supersolution": bool(margins[i] < 0),
        }
    if args.c_minus is not None:
        doc["c_minus"] = {
            "value": args.c_minus,
            "subsolution": bool(subsolution_check(prob, args.c_minus)),
        }
    if args.c_plus is None and args.c_minus is None:
        raise NonPositive("pass --c-plus and/or --c-minus")
    _emit(doc, args)
    return 0


def _cmd_linear(args) -> int:
    if args.eta:
        traj, c_eta = eta_profile(args.mu, args.delta0, _options(args), dim_n=args.n)
        doc = {
            "mode": "eta",
            "mu": args.mu,
            "delta0": args.delta0,
            "dim_n": args.n,
            "C_eta": c_eta,
            "min_slope": float(np.min(traj.dh)),
            **{"event": asdict(traj.event), "n_steps": traj.n_steps},
        }
    else:
        prob = _problem(args)
        traj = integrate_linear(prob, args.h0, _options(args))
        fit = linear_coefficient(traj, strict=False)
        doc = {
            "mode": "harmonic",
            "problem": asdict(prob),
            "h0": args.h0,
            "coefficient": _fit_doc(fit),
            "event": asdict(traj.event),
            "n_steps": traj.n_steps,
        }
    doc["csv"] = _write_csv(traj, args)
    _emit(doc, args)
    return 0


def _cmd_verify(args) -> int:
    results = verify_mod.run(filter=args.filter)
    if not results:
        print(f"no criteria match filter {args.filter!r}", file=sys.stderr)
        return 2
    if args.json:
        doc = [
            {
                "cid": r.cid,
                "name": r.name,
                "passed": r.passed,
                "measured": r.measured,
                "seconds": r.seconds,
            }
            for r in results
        ]
        _emit(doc, args)
    else:
        lines = verify_mod.report_lines(results)
        out = getattr(args, "out", None)
        text = "\n".join(lines) + "\n"
        if out:
            with open(_outpath(out), "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0 if all(r.passed for r in results) else 1


# ---- parser ----

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardyshoot",
        description="radial shooting for the Hardy-potential reaction equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("exponents", help="indicial exponents and derived constants")
    _add_problem(sp)
    _add_output(sp, csv=False)
    sp.set_defaults(handler=_cmd_exponents)

    sp = sub.add_parser("solve", help="one center shot from u0")
    _add_problem(sp)
    sp.add_argument("--u0", type=float, required=True)
    sp.add_argument("--launch-h", type=float, default=1e-3,
                    help="launch step as a fraction of R (default 1e-3)")
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_solve)

    sp = sub.add_parser("deadcore", help="dead-core solution from its free edge rho")
    _add_problem(sp)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--launch-h", type=float, default=1e-3,
                    help="launch step as a fraction of R - rho (default 1e-3)")
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_deadcore)

    sp = sub.add_parser("origin", help="solution vanishing at the center")
    _add_problem(sp)
    sp.add_argument("--launch-h", type=float, default=1e-3,
                    help="launch step as a fraction of R (default 1e-3)")
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_origin)

    sp = sub.add_parser("classify", help="classify a center shot")
    _add_problem(sp)
    sp.add_argument("--u0", type=float, required=True)
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_classify)

    sp = sub.add_parser("threshold", help="bisect for the blowup threshold u*")
    _add_problem(sp)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--with-limit", action="store_true",
                    help="also report the w-transform limit of the u*-shot")
    _add_integrator(sp)
    _add_output(sp, csv=False)
    sp.set_defaults(handler=_cmd_threshold)

    sp = sub.add_parser("blowup-radius", help="blowup location of a supercritical shot")
    _add_problem(sp)
    sp.add_argument("--u0", type=float, required=True)
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_blowup_radius)

    sp = sub.add_parser("boundary", help="solve the inverse boundary-coefficient problem")
    _add_problem(sp)
    sp.add_argument("--c", type=float, required=True, help="target boundary coefficient")
    sp.add_argument("--tol", type=float, default=1e-6)
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_boundary)

    sp = sub.add_parser("sweep", help="classify over a grid of u0, mu, or p")
    _add_problem(sp)
    sp.add_argument("--u0", type=float, default=1.0, help="base u0 (overridden when param=u0)")
    sp.add_argument("--param", choices=("u0", "mu", "p"), required=True)
    sp.add_argument("--values", help="comma-separated grid values")
    sp.add_argument("--linspace", help="start,stop,count")
    sp.add_argument("--jobs", type=int, default=1)
    _add_integrator(sp)
    _add_output(sp, csv=False)
    sp.set_defaults(handler=_cmd_sweep)

    sp = sub.add_parser("certify", help="super/subsolution certificates")
    _add_problem(sp)
    sp.add_argument("--c-plus", type=float,
                    help="supersolution amplitude, checked on the annulus [r0, R)")
    sp.add_argument("--c-minus", type=float,
                    help="subsolution amplitude, checked on the whole ball")
    sp.add_argument("--r0", type=float, default=0.5,
                    help="inner radius of the supersolution annulus (default 0.5)")
    sp.add_argument("--grid", type=int, default=200)
    _add_output(sp, csv=False)
    sp.set_defaults(handler=_cmd_certify)

    sp = sub.add_parser("linear", help="mu-harmonic run or the eta boundary weight")
    _add_problem(sp)
    sp.add_argument("--h0", type=float, default=1.0, help="harmonic center value")
    sp.add_argument("--eta", action="store_true", help="compute the eta profile instead")
    sp.add_argument("--delta0", type=float, default=1.0, help="eta outer radius")
    _add_integrator(sp)
    _add_output(sp)
    sp.set_defaults(handler=_cmd_linear)

    sp = sub.add_parser("verify", help="run the acceptance battery")
    sp.add_argument("--filter", help="substring filter on criterion id/name")
    sp.add_argument("--json", action="store_true")
    _add_output(sp, csv=False)
    sp.set_defaults(handler=_cmd_verify)

    return parser


def _read_config_tokens(path: str) -> list[str]:
    tokens: list[str] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"config line without '=': {raw.strip()!r}")
            flag = "--" + key.strip().replace("_", "-").lstrip("-")
            val = val.strip()
            if val.lower() in ("true", "false"):
                if val.lower() == "true":
                    tokens.append(flag)
            else:
                tokens.extend([flag, val])
    return tokens


def _inject_config(argv: list[str]) -> list[str]:
    """Insert config-file tokens after the subcommand so explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config needs a file path")
    tokens = _read_config_tokens(argv[i + 1])
    return argv[:1] + tokens + argv[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        argv = _inject_config(argv)
    except (OSError, ValueError) as exc:
        print(f"hardyshoot: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except HardyShootError as exc:
        doc = {"error": exc.code, "message": str(exc)}
        print(json.dumps(doc), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        doc = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(doc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
