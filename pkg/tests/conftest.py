"""Independent oracles shared by the test modules.

None of these reuse the code paths they check: pair counts come from a
double loop, counts from a linear scan, Lemma 1 from a per-t interval scan.
"""

from collections import Counter

import pytest

from addrep.numset import NaturalSet, generate
from addrep.walkgraph import MultiGraph


def brute_rep_count(elements, n):
    els = list(elements)
    return sum(1 for i, a in enumerate(els) for b in els[i:] if a + b == n)


def brute_rep_table(elements, n_max):
    """r(n) for all n <= n_max, by enumerating every pair once."""
    els = [e for e in elements if e <= n_max]
    r = Counter()
    for i, a in enumerate(els):
        for b in els[i:]:
            if a + b <= n_max:
                r[a + b] += 1
    return r


def linear_count(elements, x):
    return sum(1 for e in elements if e <= x)


def empty_doubling_ts(elements, t_lo, t_hi):
    """Every integer t in [t_lo, t_hi] for which (t, 2t] contains no element."""
    s = set(elements)
    return [t for t in range(t_lo, t_hi + 1) if not any(e in s for e in range(t + 1, 2 * t + 1))]


@pytest.fixture
def powers2():
    return generate("powers(2)", 2**14)


@pytest.fixture
def triangle():
    return MultiGraph(range(3), [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def bowtie():
    # two triangles sharing vertex 0
    return MultiGraph(range(5), [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])


@pytest.fixture
def single_loop():
    return MultiGraph([0], [(0, 0)])


def sparse_set(rng, horizon):
    """Random set with ratio-between-consecutive-elements in (1, 2]: Lemma 1 holds."""
    out = [rng.randint(1, 8)]
    while True:
        nxt = out[-1] + rng.randint(1, out[-1])
        if nxt > horizon:
            break
        out.append(nxt)
    return NaturalSet(out, horizon)


ACCEPTANCE = []


def record(criterion, passed, detail=""):
    ACCEPTANCE.append((criterion, bool(passed), detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")
