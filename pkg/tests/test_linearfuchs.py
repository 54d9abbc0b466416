import json
import math

import numpy as np
import pytest

from hardyshoot import (
    Degenerate,
    NonPositive,
    Problem,
    WrongSign,
    eta_profile,
    integrate_linear,
    perturbed_exponent,
)
from hardyshoot.linearfuchs import linear_coefficient


@pytest.fixture(scope="module")
def harmonic():
    prob = Problem(dim_n=3, radius=1.0, mu=0.1875, power=3.0)
    return prob, integrate_linear(prob, 1.0)


def test_harmonic_coefficient(harmonic):
    prob, traj = harmonic
    fit = linear_coefficient(traj)
    assert fit.converged
    assert fit.coefficient > 0
    assert fit.exponent == 0.25
    assert traj.coefficient_hint == fit.coefficient


def test_harmonic_positive_samples(harmonic):
    _, traj = harmonic
    assert np.all(traj.h > 0)
    assert traj.event.kind == "ReachedBoundaryWindow"


def test_scaling_linearity(harmonic):
    prob, traj = harmonic
    c1 = linear_coefficient(traj).coefficient
    c2 = linear_coefficient(integrate_linear(prob, 2.0)).coefficient
    assert abs(c2 - 2.0 * c1) / (2.0 * c1) < 1e-12


def test_h0_validation(harmonic):
    prob, _ = harmonic
    with pytest.raises(NonPositive):
        integrate_linear(prob, 0.0)


def test_eta_profile_monotone():
    traj, c_eta = eta_profile(-1.0, 1.0)
    assert c_eta > 0
    assert float(np.min(traj.dh)) >= -1e-12 * float(np.max(np.abs(traj.h)))
    assert traj.h[0] == pytest.approx(1.0)
    assert traj.r[0] == pytest.approx(0.5, abs=1e-12)


def test_eta_profile_guards():
    with pytest.raises(WrongSign):
        eta_profile(0.1, 1.0)
    with pytest.raises(NonPositive):
        eta_profile(-1.0, 0.0)


def test_linear_trajectory_serialization(harmonic):
    _, traj = harmonic
    doc = json.loads(traj.to_json())
    assert doc["mu"] == 0.1875
    assert len(doc["samples"]) == len(traj.r)
    csv = traj.to_csv()
    assert csv.splitlines()[0] == "r,h,dh"


def test_perturbed_exponent_limits():
    bm = 0.5 - math.sqrt(0.25 - 0.125)
    assert perturbed_exponent(0.125, 3.0, 0.0) == bm
    # continuous and decreasing in eps
    vals = [perturbed_exponent(0.125, 3.0, e) for e in (0.0, 0.1, 0.5, 1.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert abs(perturbed_exponent(0.125, 3.0, 1e-8) - bm) < 1e-8


def test_perturbed_exponent_blowup_end():
    # mu - eps^(p-1) = -mu_star gives the blowup exponent -2/(p-1)
    p, mu = 3.0, 0.125
    eps = math.sqrt(mu + 2.0)  # eps^2 = mu + mu_star
    got = perturbed_exponent(mu, p, eps)
    assert abs(got - (-1.0)) < 1e-12


def test_perturbed_exponent_degenerate():
    with pytest.raises(Degenerate):
        perturbed_exponent(0.3, 3.0, 0.0)
    with pytest.raises(NonPositive):
        perturbed_exponent(0.125, 3.0, -0.1)
