"""Every acceptance criterion at full scale; one PASS/FAIL line per criterion.

The lines are printed as the tests run (visible with ``-s``) and repeated in
the pytest terminal summary.  Run ``python tests/test_acceptance.py`` for the
lines alone.
"""
import pytest

from artincube import suite
from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("key", [k for k, _, _ in suite.CRITERIA])
def test_criterion(key):
    res = suite.run_criterion(key, full=True)
    line = res.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    for c in res.checks:
        print(f"    {'ok ' if c.ok else 'BAD'} {c.name}: {c.detail}")
    assert res.ok, line


if __name__ == "__main__":
    import sys

    results = suite.run_all(full=True)
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.ok for r in results) else 1)
