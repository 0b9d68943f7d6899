"""The eleven acceptance checks, each with a pinned tolerance and wall-clock cap.

Run alone with ``pytest tests/test_acceptance.py -s`` to see one line per check.
"""

from __future__ import annotations

import pytest

from northcott_lab.verify import CRITERIA, run_criterion

TOL = 1e-6

# wall-clock caps in seconds, pinned here so a slower verify module cannot relax them
CAPS = {1: 60, 2: 60, 3: 120, 4: 30, 5: 10, 6: 60, 7: 30, 8: 10, 9: 60, 10: 120, 11: 120}


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, capsys):
    r = run_criterion(number, TOL)
    with capsys.disabled():
        print("\n" + r.line())
    assert r.cap == CAPS[number]
    assert r.passed, r.details
    assert r.elapsed <= CAPS[number], f"{r.elapsed:.1f}s over the {CAPS[number]}s cap"
