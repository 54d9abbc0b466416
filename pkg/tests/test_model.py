import math

import numpy as np
import pytest

from hardyshoot import (
    Exponents,
    MuAboveHardy,
    MuZero,
    NonPositive,
    NoSolutionRegime,
    PowerOne,
    Problem,
    Regime,
    exponents,
    indicial_roots,
    mu_star,
    validate,
)


def test_indicial_roots_exact_quarter():
    bm, bp = indicial_roots(0.1875)
    assert bm == 0.25
    assert bp == 0.75


def test_indicial_roots_identities():
    rng = np.random.default_rng(7)
    for _ in range(200):
        mu = float(rng.uniform(-6.0, 0.2499))
        if mu == 0.0:
            continue
        bm, bp = indicial_roots(mu)
        assert abs(bm + bp - 1.0) < 1e-14
        assert abs(bm * bp - mu) < 1e-13
        assert bm < bp


def test_indicial_roots_rejects_hardy_bound():
    with pytest.raises(MuAboveHardy):
        indicial_roots(0.25)
    with pytest.raises(MuAboveHardy):
        indicial_roots(0.3)


def test_mu_star_values():
    assert mu_star(3.0) == 2.0
    assert mu_star(2.0) == 6.0
    assert abs(mu_star(5.0) - 0.75) < 1e-15
    assert abs(mu_star(0.5) - 2.0 * 1.5 / 0.25) < 1e-15


def test_validate_regimes():
    assert validate(Problem(3, 1.0, 0.125, 3.0)) is Regime.SUPERLINEAR
    assert validate(Problem(3, 1.0, 0.125, 0.5)) is Regime.SUBLINEAR


@pytest.mark.parametrize(
    "prob,err",
    [
        (Problem(0, 1.0, 0.1, 2.0), NonPositive),
        (Problem(2.5, 1.0, 0.1, 2.0), NonPositive),
        (Problem(3, 0.0, 0.1, 2.0), NonPositive),
        (Problem(3, 1.0, 0.1, 0.0), NonPositive),
        (Problem(3, 1.0, 0.1, -1.0), NonPositive),
        (Problem(3, 1.0, 0.0, 2.0), MuZero),
        (Problem(3, 1.0, 0.1, 1.0), PowerOne),
        (Problem(3, 1.0, 0.25, 2.0), MuAboveHardy),
        (Problem(3, 1.0, 0.5, 2.0), MuAboveHardy),
        (Problem(3, 1.0, -2.0, 3.0), NoSolutionRegime),
        (Problem(3, 1.0, -6.1, 2.0), NoSolutionRegime),
    ],
)
def test_validate_errors(prob, err):
    with pytest.raises(err):
        validate(prob)


def test_superlinear_exponents(p3):
    ex = exponents(p3)
    assert isinstance(ex, Exponents)
    assert abs(ex.beta_minus - (0.5 - math.sqrt(0.125))) < 1e-15
    assert abs(ex.beta_plus - (0.5 + math.sqrt(0.125))) < 1e-15
    assert ex.mu_star == 2.0
    assert ex.blowup_exponent == 1.0
    assert abs(ex.blowup_amplitude**2 - 2.125) < 1e-14
    assert abs(ex.interior_blowup_amplitude - math.sqrt(2.0)) < 1e-15
    assert ex.deadcore_exponent is None
    assert ex.origin_amplitude is None
    assert ex.deadcore_edge_amplitude is None


def test_sublinear_exponents(ph):
    ex = exponents(ph)
    assert ex.deadcore_exponent == 4.0
    assert abs(ex.deadcore_edge_amplitude - 1.0 / 144.0) < 1e-12 / 144.0
    assert abs(ex.origin_amplitude - 0.0025) < 1e-12 * 0.0025
    assert ex.blowup_exponent is None
    assert ex.blowup_amplitude is None


def test_problem_frozen(p3):
    with pytest.raises(Exception):
        p3.mu = 0.2
