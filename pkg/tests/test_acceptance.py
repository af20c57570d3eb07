"""Acceptance suite: one test per criterion, each check at its stated tolerance.

A pass/fail line per criterion is printed immediately and repeated in the
terminal summary.
"""

import pytest

from conformal_cauchy.acceptance import CRITERIA, run_criterion

SEED = 7


def _fmt(c):
    value = "n/a" if c["value"] is None else f"{c['value']:.3g}"
    return f"{c['check']}={value} (tol {c['tolerance']:.3g})"


@pytest.mark.acceptance
@pytest.mark.parametrize("k", sorted(CRITERIA), ids=lambda k: f"{k:02d}-{CRITERIA[k][0]}")
def test_criterion(k, acceptance_log):
    report = run_criterion(k, SEED)
    status = "PASS" if report["pass"] else "FAIL"
    detail = report["error"] or "; ".join(_fmt(c) for c in report["checks"])
    line = f"[{status}] criterion {k:2d} {report['name']}: {detail}"
    acceptance_log.append(line)
    print(line)
    failing = [c for c in report["checks"] if not c["pass"]]
    assert report["error"] is None, report["error"]
    assert not failing, failing
