"""Acceptance battery.

Each criterion prints one [PASS]/[FAIL] line with its measured numbers;
the assertions pin the tolerances. The same battery backs the verify
subcommand, so a green run here matches `hardyshoot verify`.
"""

import time

import pytest

from hardyshoot import verify


@pytest.fixture(scope="module")
def cache():
    # shared across criteria so the threshold search runs once
    return {}


@pytest.mark.parametrize(
    "cid,name,fn", verify.CRITERIA, ids=[c[0] for c in verify.CRITERIA]
)
def test_criterion(cid, name, fn, cache):
    t0 = time.perf_counter()
    passed, measured = fn(cache)
    res = verify.CriterionResult(cid, name, passed, measured, time.perf_counter() - t0)
    line = res.line()
    print(line)
    assert passed, line
