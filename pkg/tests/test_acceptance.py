"""Acceptance gate: one test per exit criterion, at its stated tolerance.

Run with `pytest -s tests/test_acceptance.py` (or `starlab verify`) to see
one pass/fail line per criterion.
"""

import pytest

from starlab.acceptance import CRITERIA

_ids = [f"c{cid:02d}-{name.replace(' ', '-')}" for cid, name, _ in CRITERIA]


@pytest.mark.parametrize(("cid", "name", "fn"), CRITERIA, ids=_ids)
def test_criterion(cid, name, fn):
    details = fn()
    print(f"PASS criterion {cid:2d} ({name}): "
          + ", ".join(f"{k}={v}" for k, v in details.items()))
