"""End-to-end acceptance checks.

One test per criterion, each printing its own pass/fail line.  Suite-level
runs are shared through a session-scoped runner and use tiered seed
counts sized for a single-core box; set HAMMERSIM_ACCEPT_SEEDS=100 to
reproduce the full-fidelity numbers (much slower).
"""

import pytest

from hammersim.acceptance import AcceptanceRunner

CRITERIA = {
    1: "baseline high disturbance",
    2: "sampling at p=0.01",
    3: "sampling scaled with mitigation rate",
    4: "para anchors and ordering",
    5: "miss-stream sampling worse than request-stream",
    6: "random eviction no worse than LFU",
    7: "bigger tracker helps monotonically",
    8: "eviction rule sensitivity under thrash",
    9: "analytic vs empirical sampling rates",
    10: "extra activation overhead",
    11: "decay/two-table models stay weaker",
    12: "static arithmetic",
    13: "determinism",
    14: "ledger conservation",
    15: "oracle equivalence",
    16: "statistical hygiene",
    17: "bathtub shape",
}

# Cheap criteria run first so a broken build fails fast; the expensive
# suite-level ones share the runner's memoized suites.
ORDER = (12, 14, 10, 13, 16, 15, 1, 2, 11, 3, 4, 17, 5, 9, 6, 7, 8)


@pytest.fixture(scope="module")
def runner():
    return AcceptanceRunner()


@pytest.mark.parametrize("cid", ORDER, ids=[f"c{c:02d}_{CRITERIA[c]}".replace(" ", "_")
                                            for c in ORDER])
def test_criterion(runner, cid):
    res = getattr(runner, f"criterion_{cid}")()
    status = "PASS" if res.passed else "FAIL"
    print(f"[{status}] criterion {res.cid:2d} ({res.name}): {res.detail}")
    assert res.passed, f"criterion {res.cid} ({res.name}): {res.detail}"
