"""Acceptance suite: one test per criterion, each at its pinned tolerance.

Every criterion prints a single PASS/FAIL summary line (also collected in the
terminal summary); the individual sub-checks are printed underneath.
Run standalone with ``python tests/test_acceptance.py``.
"""

import pytest

from bn4d.checks import CRITERIA, run_criterion

TITLES = {
    1: "constants suite",
    2: "ball potential theory",
    3: "projection expansion slope",
    4: "error norm rates",
    5: "reduced expansion ratio",
    6: "local Pohozaev identity",
    7: "reduced solve",
    8: "blow-up law from radial sweep",
    9: "determinism",
}

RESULTS = {}


def summary_line(n, checks):
    ok = all(c.passed for c in checks)
    worst = [c.name for c in checks if not c.passed]
    tail = "" if ok else f" (failed: {', '.join(worst)})"
    return f"criterion {n} [{'PASS' if ok else 'FAIL'}] {TITLES[n]}{tail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    checks = run_criterion(n)
    line = summary_line(n, checks)
    RESULTS[n] = line
    print(line)
    for c in checks:
        print("    " + c.line())
    assert all(c.passed for c in checks), line


if __name__ == "__main__":
    import sys

    bad = 0
    for n in sorted(CRITERIA):
        checks = run_criterion(n)
        print(summary_line(n, checks))
        for c in checks:
            print("    " + c.line())
        bad += not all(c.passed for c in checks)
    sys.exit(1 if bad else 0)
