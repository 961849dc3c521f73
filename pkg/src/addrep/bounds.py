"""Finite-x evaluation of the counting-function bounds.

All formulas use the natural logarithm.  The log-log formulas need
ln ln x > 0, i.e. x > e; reports additionally require x >= 16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .numset import NaturalSet, counting, scan_hypothesis

THM1_CONST = 0.5
BP_CONST = 1 / 2904
REPORT_MIN_X = 16


def _loglog_ratio_sq(x: float) -> float:
    if not x > math.e:
        raise DomainError(f"ln ln x must be positive, got x={x}")
    return (math.log(x) / math.log(math.log(x))) ** 2


def thm1_bound(x: float) -> float:
    """½ (ln x / ln ln x)²."""
    return _loglog_ratio_sq(x) / 2


def bp_bound(x: float) -> float:
    """(1/2904) (ln x / ln ln x)²."""
    return _loglog_ratio_sq(x) / 2904


def nrs_upper(x: float, c: float = 1.0) -> float:
    """c (ln x)²; c is a free parameter."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    return c * math.log(x) ** 2


def limsup_statistic(x: float, count: int) -> float:
    """count · (ln ln x / ln x)^{3/2}; a statistic, not a verdict."""
    if not x > math.e:
        raise DomainError(f"ln ln x must be positive, got x={x}")
    lx = math.log(x)
    return count * (math.log(lx) / lx) ** 1.5


@dataclass(frozen=True)
class BoundReport:
    x: int
    count: int
    thm1: float
    nrs_c: float
    nrs_value: float
    bp: float
    limsup_stat: float
    verdict: str
    hypothesis: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "x": self.x,
            "count": self.count,
            "log_base": "natural",
            "thm1": self.thm1,
            "nrs": {"c": self.nrs_c, "value": self.nrs_value},
            "bp": self.bp,
            "limsup_stat": self.limsup_stat,
            "verdict": self.verdict,
            "verdicts": {
                "thm1": self.verdict,
                "bp": "consistent" if self.count > self.bp else "inconclusive-finite-x",
                "nrs": "within" if self.count <= self.nrs_value else "above",
            },
        }
        if self.hypothesis is not None:
            out["hypothesis"] = self.hypothesis
        return out


def bound_report(
    A: NaturalSet, x: int, nrs_c: float = 1.0, scan_from: Optional[int] = None
) -> BoundReport:
    """Compare |A(x)| with every bound at x.

    The Theorem 1 verdict is ``consistent`` or ``inconclusive-finite-x``; a
    finite truncation can never refute an asymptotic, conditional statement.
    With ``scan_from`` set, r(A, n) = 1 is scanned on [scan_from, x] and the
    result attached as a hypothesis annotation.
    """
    if x < REPORT_MIN_X:
        raise DomainError(f"x must be >= {REPORT_MIN_X}, got {x}")
    count = counting(A, x)
    thm1 = thm1_bound(x)
    hyp = None
    if scan_from is not None:
        w = scan_hypothesis(A, scan_from, x)
        hyp = {
            "window": [w.n_lo, w.n_hi],
            "exceptional_count": len(w.exceptional),
            "max_exceptional": w.exceptional[-1] if w.exceptional else None,
            "holds_on_window": not w.exceptional,
        }
    return BoundReport(
        x=x,
        count=count,
        thm1=thm1,
        nrs_c=nrs_c,
        nrs_value=nrs_upper(x, nrs_c),
        bp=bp_bound(x),
        limsup_stat=limsup_statistic(x, count),
        verdict="consistent" if count > thm1 else "inconclusive-finite-x",
        hypothesis=hyp,
    )
