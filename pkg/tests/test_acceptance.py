"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the report.
"""

import pytest

from shipctl.cli import verify
from shipctl.cli.main import run

CRITERIA = list(enumerate(verify.CHECKS, start=1))


@pytest.mark.parametrize("number, check", CRITERIA, ids=[f"{n:02d}-{c}" for n, c in CRITERIA])
def test_criterion(number, check):
    res = verify.CHECKS[check]()
    print(f"\n[{number:2d}] {res.line()}")
    assert res.passed, res.detail


def test_verify_command_exit_code(capsys):
    # every check above is cached, so the full CLI pass is cheap here
    code = run(["verify"])
    out = capsys.readouterr().out
    print("\n" + out)
    assert out.count("PASS") == len(verify.CHECKS)
    assert code == 0
