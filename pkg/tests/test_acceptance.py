"""Acceptance battery: one PASS/FAIL line per criterion.

The level comes from ACCEPTANCE_LEVEL (default full). Lines are printed as each
check finishes and repeated in the terminal summary.
"""
import os

import pytest

from lincomplex.suite import CHECKS, run_check

LEVEL = os.environ.get("ACCEPTANCE_LEVEL", "full")
RESULTS = []


@pytest.mark.parametrize("number", [c[0] for c in CHECKS], ids=[f"criterion_{c[0]}" for c in CHECKS])
def test_criterion(number, capsys):
    r = run_check(number, LEVEL)
    RESULTS.append(r)
    with capsys.disabled():
        print("\n" + r.line(), flush=True)
    assert r.passed, r.detail
    assert r.in_time, f"took {r.elapsed:.1f} s, limit {r.limit:g} s"
