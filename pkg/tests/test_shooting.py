import math

import numpy as np
import pytest

from hardyshoot import (
    BLOWUP,
    GLOBAL_POSITIVE,
    INDETERMINATE,
    BracketFailure,
    IntegratorOptions,
    NonPositive,
    NonPositiveTarget,
    NotBlowup,
    Problem,
    TargetUnreachable,
    WrongRegime,
    blowup_radius,
    boundary_coefficient,
    classify,
    find_ustar,
    solve_for_boundary_coefficient,
)


def test_classify_global_positive(p3):
    cl = classify(p3, 1.0)
    assert cl.kind == GLOBAL_POSITIVE
    assert cl.coefficient is not None and cl.coefficient.converged
    assert cl.coefficient.coefficient > 0
    assert cl.trajectory is not None
    assert cl.r_blow is None


def test_classify_blowup(p3, th3):
    cl = classify(p3, 2.0 * th3.u_star)
    assert cl.kind == BLOWUP
    assert 0 < cl.r_blow < 1.0
    assert cl.amplitude_check.converged
    assert abs(cl.amplitude_check.coefficient - math.sqrt(2.0)) < 0.02 * math.sqrt(2.0)
    assert cl.trajectory.latch_r is not None


def test_classify_sublinear_always_global(ph):
    for u0 in (0.1, 1.0, 10.0):
        cl = classify(ph, u0)
        assert cl.kind == GLOBAL_POSITIVE


def test_classify_validates_u0(p3):
    with pytest.raises(NonPositive):
        classify(p3, 0.0)
    with pytest.raises(NonPositive):
        classify(p3, -1.0)


def test_classify_indeterminate_and_escalation(p3, th3):
    # a separatrix-riding shot exceeds a frozen low cap without latching;
    # the default escalation then resolves the same shot
    lo = th3.bracket[0]
    opts = IntegratorOptions(u_cap=1e3)
    frozen = classify(p3, lo, opts, cap_boosts=(1.0,))
    assert frozen.kind == INDETERMINATE
    assert frozen.band is not None
    escalated = classify(p3, lo, opts)
    assert escalated.kind == GLOBAL_POSITIVE


def test_find_ustar_value_and_bracket(p3, th3):
    # frozen reference value for N=3, R=1, p=3, mu=1/8
    assert abs(th3.u_star - 2.6258097) < 2e-5
    lo, hi = th3.bracket
    assert lo < th3.u_star < hi
    assert (hi - lo) <= 1e-6 * hi
    assert th3.evaluations > 10
    assert classify(p3, lo).kind == GLOBAL_POSITIVE
    assert classify(p3, hi).kind == BLOWUP


def test_find_ustar_monotone_in_mu():
    # the maximal amplitude (mu + mu_star)^(1/(p-1)) grows with mu and the
    # threshold tracks it upward
    a = find_ustar(Problem(3, 1.0, 0.05, 3.0), 1e-4)
    b = find_ustar(Problem(3, 1.0, 0.2, 3.0), 1e-4)
    assert b.u_star > a.u_star


def test_find_ustar_guards(ph, p3):
    with pytest.raises(WrongRegime):
        find_ustar(ph, 1e-6)
    with pytest.raises(NonPositive):
        find_ustar(p3, 0.0)


def test_blowup_radius_decreasing(p3, th3):
    radii = [blowup_radius(p3, f * th3.u_star) for f in (1.5, 2.5, 4.0)]
    assert all(0 < r < 1 for r in radii)
    assert radii[0] > radii[1] > radii[2]
    with pytest.raises(NotBlowup):
        blowup_radius(p3, th3.u_star / 2.0)


def test_boundary_coefficient_monotone(p3, th3):
    c1 = boundary_coefficient(p3, 0.3 * th3.u_star).coefficient
    c2 = boundary_coefficient(p3, 0.6 * th3.u_star).coefficient
    assert 0 < c1 < c2


def test_solve_superlinear_roundtrip(p3, th3):
    u0 = 0.5 * th3.u_star
    c = boundary_coefficient(p3, u0).coefficient
    desc, traj = solve_for_boundary_coefficient(p3, c, tol=1e-6)
    assert desc.family == "center"
    assert abs(desc.parameter - u0) / u0 < 1e-4
    assert abs(desc.coefficient - c) / c <= 1e-6
    assert traj.event.kind == "ReachedBoundaryWindow"
    assert desc.evaluations > 0


def test_solve_sublinear_families(ph):
    # center family above the origin coefficient, dead cores below
    from hardyshoot import fit_power_coefficient, indicial_roots, integrate
    from hardyshoot import origin_touch_series

    traj = integrate(ph, origin_touch_series(ph, 1e-3))
    c_org = fit_power_coefficient(traj, indicial_roots(ph.mu)[0], strict=False).coefficient

    desc, _ = solve_for_boundary_coefficient(ph, c_org, tol=1e-6)
    assert desc.family == "origin"
    assert desc.parameter == 0.0

    desc_hi, _ = solve_for_boundary_coefficient(ph, 10.0 * c_org, tol=1e-6)
    assert desc_hi.family == "center"
    assert desc_hi.parameter > 0

    desc_lo, _ = solve_for_boundary_coefficient(ph, 0.1 * c_org, tol=1e-6)
    assert desc_lo.family == "deadcore"
    assert 0 < desc_lo.parameter < 1.0


def test_solve_deadcore_roundtrip(ph):
    from hardyshoot import dead_core_edge_series, fit_power_coefficient
    from hardyshoot import indicial_roots, integrate

    rho = 0.4
    traj = integrate(ph, dead_core_edge_series(ph, rho, 1e-3 * 0.6))
    c = fit_power_coefficient(traj, indicial_roots(ph.mu)[0], strict=False).coefficient
    desc, _ = solve_for_boundary_coefficient(ph, c, tol=1e-6)
    assert desc.family == "deadcore"
    assert abs(desc.parameter - rho) < 1e-4


def test_solve_guards(ph, p3):
    with pytest.raises(NonPositiveTarget):
        solve_for_boundary_coefficient(ph, 0.0)
    with pytest.raises(NonPositiveTarget):
        solve_for_boundary_coefficient(p3, -1.0)


def test_solve_unreachable_target(p3):
    # the sub-threshold coefficient is bounded on the accessible bracket;
    # far beyond it the search must refuse rather than extrapolate
    with pytest.raises(TargetUnreachable):
        solve_for_boundary_coefficient(p3, 1e12, tol=1e-6)
