import math

import numpy as np
import pytest

from hardyshoot import (
    NonPositive,
    NotConverged,
    Problem,
    TooFewSamples,
    WrongRegime,
    center_series,
    envelope_extrema_check,
    fit_power_coefficient,
    fit_power_samples,
    indicial_roots,
    integrate,
    richardson,
    subsolution_check,
    supersolution_margin,
    v_transform,
    w0_profile,
    w_transform_limit,
)


@pytest.fixture(scope="module")
def sub_shot(p3):
    return integrate(p3, center_series(p3, 1.0, 1e-3))


def test_richardson_kills_known_mode():
    g = 1.37
    ratio = 2.0
    k = np.arange(6)
    vals = 3.0 + 0.4 * ratio ** (-g * k)
    out = richardson(vals, ratio, [g])
    assert abs(out[-1] - 3.0) < 1e-12


def test_richardson_two_modes():
    k = np.arange(7)
    vals = 1.0 + 0.3 * 2.0 ** (-1.0 * k) + 0.05 * 2.0 ** (-2.0 * k)
    out = richardson(vals, 2.0, [1.0, 2.0])
    assert abs(out[-1] - 1.0) < 1e-12


@pytest.mark.parametrize("e", [-5.0, -2.3, -1.0, -0.25, 0.3, 1.0, 2.7, 5.0])
def test_fit_exact_on_power_laws(e):
    # synthetic trajectory samples u = c delta^e over the fit window
    c, radius, delta_stop = 0.8137, 1.0, 1e-10
    d = np.geomspace(5e-11, 5e-2, 4000)
    r = np.sort(radius - d)
    u = c * (radius - r) ** e
    fit = fit_power_samples(r, u, radius, delta_stop, exponent=e, gap=0.7)
    assert fit.converged
    assert abs(fit.coefficient - c) / c <= 1e-12


def test_fit_diverges_on_wrong_exponent(sub_shot, p3):
    bm, bp = indicial_roots(p3.mu)
    good = fit_power_coefficient(sub_shot, bm, strict=False)
    bad = fit_power_coefficient(sub_shot, bp, strict=False)
    assert good.converged and good.coefficient > 0
    assert not bad.converged
    with pytest.raises(NotConverged):
        fit_power_coefficient(sub_shot, bp, strict=True)


def test_fit_needs_window(p3):
    traj = integrate(
        p3,
        center_series(p3, 3.0, 1e-3),
    )  # blowup shot never reaches the window
    with pytest.raises(TooFewSamples):
        fit_power_coefficient(traj, indicial_roots(p3.mu)[0])


def test_w_limit_and_fit_mutually_exclusive(p3):
    # a loose bracket departs early enough for both fitters to stabilize,
    # so the exclusivity only shows up against a tight one
    from hardyshoot import classify, find_ustar

    th = find_ustar(p3, 1e-9)
    cl = classify(p3, th.bracket[0])
    assert cl.kind == "GlobalPositive"
    wl = w_transform_limit(cl.trajectory, p3, strict=False)
    fit = fit_power_coefficient(cl.trajectory, indicial_roots(p3.mu)[0], strict=False)
    assert wl.converged and not fit.converged
    sub = integrate(p3, center_series(p3, th.u_star / 2.0, 1e-3))
    wl2 = w_transform_limit(sub, p3, strict=False)
    fit2 = fit_power_coefficient(sub, indicial_roots(p3.mu)[0], strict=False)
    assert fit2.converged and not wl2.converged


def test_w_limit_value(p3, th3):
    lo_shot = integrate(p3, center_series(p3, th3.bracket[0], 1e-3))
    wl = w_transform_limit(lo_shot, p3)
    target = math.sqrt(2.125)
    assert abs(wl.coefficient - target) / target < 0.01
    assert wl.exponent == -1.0


def test_w_limit_wrong_regime(ph):
    traj = integrate(ph, center_series(ph, 1.0, 1e-3))
    with pytest.raises(WrongRegime):
        w_transform_limit(traj, ph)


def test_w0_profile(p3):
    # boundary value (mu + mu_star)^(1/(p-1)), divergence at the center
    val = w0_profile(p3, 1.0 - 1e-13)
    assert abs(val - math.sqrt(2.125)) < 1e-6
    assert w0_profile(p3, 1e-6) > 1e2
    arr = w0_profile(p3, np.array([0.25, 0.5, 0.75]))
    assert arr.shape == (3,)
    assert np.all(np.diff(arr) < 0)


def test_supersolution_margin_pinned(p3):
    # at r=1/2 the bracket is mu_star + mu + eta(1/2) = 4.125
    m = supersolution_margin(p3, 2.0, 0.5)
    assert abs(m - (4.125 - 4.0)) < 1e-12
    assert supersolution_margin(p3, 2.04, 0.5) < 0
    # equality case in the boundary limit
    c_eq = math.sqrt(2.125)
    assert abs(supersolution_margin(p3, c_eq, 1.0 - 1e-14)) < 1e-10
    # decreasing in c_plus
    assert supersolution_margin(p3, 1.0, 0.5) > supersolution_margin(p3, 1.5, 0.5)


def test_subsolution_check(p3):
    c_eq = math.sqrt(2.125)
    assert subsolution_check(p3, c_eq)
    assert not subsolution_check(p3, 2.0 * c_eq)
    # mu near -mu_star: admissible amplitude shrinks toward zero
    tight = Problem(3, 1.0, -1.99, 3.0)
    bound = math.sqrt(2.0 - 1.99)
    assert subsolution_check(tight, 0.9 * bound)
    assert not subsolution_check(tight, 1.1 * bound)


def test_subsolution_guards(ph, p3):
    with pytest.raises(WrongRegime):
        subsolution_check(ph, 0.5)
    with pytest.raises(NonPositive):
        subsolution_check(p3, 0.0)


def test_v_transform_residual(sub_shot, p3):
    res = v_transform(sub_shot, p3)
    assert len(res.delta) == len(res.v) == len(res.residual)
    assert len(res.delta) >= 5
    assert np.all(res.v > 0)
    assert float(np.max(np.abs(res.residual))) < 0.05


def test_v_transform_window(sub_shot, p3):
    with pytest.raises(TooFewSamples):
        v_transform(sub_shot, p3, window=(0.999, 1.0))


def test_envelope_extrema(p3, th3, ph):
    blow = integrate(p3, center_series(p3, 2.0 * th3.u_star, 1e-3))
    ok_max, n_max, ok_min, n_min = envelope_extrema_check(blow, p3)
    assert n_min == 1 and ok_min == 1
    assert ok_max == n_max
    with pytest.raises(WrongRegime):
        sub = integrate(ph, center_series(ph, 1.0, 1e-3))
        envelope_extrema_check(sub, ph)
