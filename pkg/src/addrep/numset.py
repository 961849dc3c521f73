"""Finite truncations of integer sets with exact representation queries.

A :class:`NaturalSet` stands in for an infinite set A of naturals.  It stores
the elements up to a horizon H and promises that membership is exact for
every n <= H.  Queries that would need information beyond H raise
:class:`~addrep.errors.HorizonExceeded` instead of guessing.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import EmptyRange, HorizonExceeded, SpecError

MAX_HORIZON = 2**63


@dataclass(frozen=True)
class NaturalSet:
    elements: tuple[int, ...]
    horizon: int
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __init__(self, elements: Iterable[int], horizon: Optional[int] = None):
        elems = tuple(int(e) for e in elements)
        if horizon is None:
            horizon = elems[-1] if elems else 0
        horizon = int(horizon)
        if horizon < 0:
            raise SpecError(f"horizon must be non-negative, got {horizon}")
        if horizon > MAX_HORIZON:
            raise SpecError(f"horizon {horizon} exceeds 2^63")
        for prev, cur in zip(elems, elems[1:]):
            if cur <= prev:
                raise SpecError(f"elements not strictly increasing at {prev}, {cur}")
        if elems and elems[0] < 0:
            raise SpecError(f"negative element {elems[0]}")
        if elems and elems[-1] > horizon:
            raise SpecError(f"element {elems[-1]} above horizon {horizon}")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "_members", frozenset(elems))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, n: int) -> bool:
        self.require(n)
        return n in self._members

    def require(self, n: int) -> None:
        if n > self.horizon:
            raise HorizonExceeded(f"query at {n} beyond horizon {self.horizon}")

    def least_at_least(self, n: int) -> Optional[int]:
        """Smallest element >= n, or None if there is none up to the horizon."""
        i = bisect.bisect_left(self.elements, n)
        return self.elements[i] if i < len(self.elements) else None

    def least_in(self, lo_exclusive: int, hi_inclusive: int) -> Optional[int]:
        """Smallest element of (lo, hi], or None."""
        self.require(hi_inclusive)
        e = self.least_at_least(lo_exclusive + 1)
        if e is None or e > hi_inclusive:
            return None
        return e

    def union(self, extra: Iterable[int]) -> "NaturalSet":
        return NaturalSet(sorted(self._members.union(extra)), self.horizon)


@dataclass(frozen=True)
class RepCountWindow:
    n_lo: int
    n_hi: int
    exceptional: tuple[int, ...]
    zero_count: int

    @property
    def inferred_n0(self) -> int:
        """1 + max(exceptional); only meaningful relative to this window."""
        return self.exceptional[-1] + 1 if self.exceptional else self.n_lo

    def to_dict(self) -> dict:
        return {
            "n_lo": self.n_lo,
            "n_hi": self.n_hi,
            "exceptional": list(self.exceptional),
            "zero_count": self.zero_count,
            "inferred_n0": self.inferred_n0,
            "caveat": (
                f"n0 inferred from the window [{self.n_lo}, {self.n_hi}] only; "
                "values of r(A, n) beyond the window are unknown"
            ),
        }


@dataclass(frozen=True)
class Lemma1Violation:
    """An integer t in the checked range with (t, 2t] free of elements.

    ``t`` is the least such t in its run; ``next_element`` is the least element
    above t (None when it lies beyond the horizon).
    """

    t: int
    next_element: Optional[int]

    def as_tuple(self) -> tuple:
        return (self.t, self.next_element)


def rep_count(A: NaturalSet, n: int) -> int:
    """Number of pairs a <= b in A with a + b = n (two-pointer scan)."""
    A.require(n)
    if n < 0:
        return 0
    elems = A.elements
    i, j = 0, bisect.bisect_right(elems, n) - 1
    count = 0
    while i <= j:
        s = elems[i] + elems[j]
        if s == n:
            count += 1
            i += 1
            j -= 1
        elif s < n:
            i += 1
        else:
            j -= 1
    return count


def counting(A: NaturalSet, x: int) -> int:
    """|A(x)|, the number of elements <= x."""
    A.require(x)
    return bisect.bisect_right(A.elements, x)


def interval_count(A: NaturalSet, lo_exclusive: int, hi_inclusive: int) -> int:
    """|A ∩ (lo, hi]|."""
    if lo_exclusive > hi_inclusive:
        raise EmptyRange(f"({lo_exclusive}, {hi_inclusive}] is empty")
    A.require(hi_inclusive)
    elems = A.elements
    return bisect.bisect_right(elems, hi_inclusive) - bisect.bisect_right(elems, lo_exclusive)


def representation_counts(A: NaturalSet, n_max: int) -> np.ndarray:
    """r(A, n) for every 0 <= n <= n_max, as an int64 array.

    Uses the self-convolution of the indicator vector: the convolution counts
    ordered pairs, so r(n) = (conv[n] + [n/2 in A]) / 2.
    """
    A.require(n_max)
    ind = np.zeros(n_max + 1, dtype=np.int64)
    idx = np.asarray(A.elements[: counting(A, n_max)], dtype=np.int64)
    ind[idx] = 1
    if n_max + 1 <= 1 << 15:
        ordered = np.convolve(ind, ind)[: n_max + 1]
    else:
        size = 1 << int(2 * (n_max + 1) - 1).bit_length()
        f = np.fft.rfft(ind.astype(np.float64), size)
        raw = np.fft.irfft(f * f, size)[: n_max + 1]
        ordered = np.rint(raw).astype(np.int64)
        if np.max(np.abs(raw - ordered)) > 0.25:
            raise ArithmeticError("FFT convolution lost integer precision")
    halves = np.zeros(n_max + 1, dtype=np.int64)
    evens = np.arange(0, n_max + 1, 2)
    halves[evens] = ind[evens // 2]
    return (ordered + halves) // 2


def scan_hypothesis(A: NaturalSet, n_lo: int, n_hi: int) -> RepCountWindow:
    """Find every n in [n_lo, n_hi] with r(A, n) = 1, and count the r = 0 ones."""
    if n_lo > n_hi:
        raise EmptyRange(f"window [{n_lo}, {n_hi}] is empty")
    A.require(n_hi)
    n_lo = max(n_lo, 0)
    r = representation_counts(A, n_hi)[n_lo:]
    exceptional = tuple(int(n) + n_lo for n in np.flatnonzero(r == 1))
    return RepCountWindow(n_lo, n_hi, exceptional, int(np.count_nonzero(r == 0)))


def lemma1_check(A: NaturalSet, t_lo: int, t_hi: int) -> list[Lemma1Violation]:
    """Integers t in [t_lo, t_hi] where (t, 2t] misses A, one witness per run.

    Between consecutive elements e < f, the t most likely to fail is the
    smallest one, max(e, t_lo); it fails iff f > 2t.  Checking integer t is
    enough: if (n, 2n] meets A then so does (t, 2t] for every real t in (n, n+1).
    """
    if t_lo < 1:
        raise SpecError("t_lo must be >= 1")
    if t_lo > t_hi:
        raise EmptyRange(f"t range [{t_lo}, {t_hi}] is empty")
    A.require(2 * t_hi)
    elems = A.elements
    out = []
    i = bisect.bisect_right(elems, t_lo) - 1
    while True:
        t = t_lo if i < 0 else max(elems[i], t_lo)
        if t > t_hi:
            break
        nxt = elems[i + 1] if i + 1 < len(elems) else None
        if nxt is None or nxt > 2 * t:
            out.append(Lemma1Violation(t, nxt))
        if nxt is None:
            break
        i += 1
    return out


_SPEC_RE = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def generate(family: str, horizon: int, seed: Optional[int] = None) -> NaturalSet:
    """Build a set from a family spec.

    Families: ``evens`` and ``all`` include 0; ``powers(b)`` is {1, b, b^2, ...}
    (no 0); ``ap(start, step)``; ``random(e)`` includes each n >= 1
    independently with probability min(1, n^-e) and never includes 0;
    ``from_file(path)`` reads the set file format.
    """
    if horizon < 0:
        raise SpecError("horizon must be non-negative")
    m = _SPEC_RE.match(family)
    if not m:
        raise SpecError(f"malformed generator spec {family!r}")
    name, argstr = m.group(1), m.group(2)
    args = [a.strip() for a in argstr.split(",")] if argstr else []

    def want(k):
        if len(args) != k:
            raise SpecError(f"{name} takes {k} argument(s), got {len(args)}")

    try:
        if name == "evens":
            want(0)
            return NaturalSet(range(0, horizon + 1, 2), horizon)
        if name == "all":
            want(0)
            return NaturalSet(range(horizon + 1), horizon)
        if name == "powers":
            want(1)
            base = int(args[0])
            if base < 2:
                raise SpecError("powers base must be >= 2")
            out, p = [], 1
            while p <= horizon:
                out.append(p)
                p *= base
            return NaturalSet(out, horizon)
        if name == "ap":
            want(2)
            start, step = int(args[0]), int(args[1])
            if start < 0 or step < 1:
                raise SpecError("ap needs start >= 0 and step >= 1")
            return NaturalSet(range(start, horizon + 1, step), horizon)
        if name == "random":
            want(1)
            expo = float(args[0])
            rng = np.random.default_rng(seed)
            n = np.arange(1, horizon + 1, dtype=np.float64)
            keep = rng.random(horizon) < np.minimum(1.0, n ** (-expo))
            return NaturalSet((np.flatnonzero(keep) + 1).tolist(), horizon)
        if name == "from_file":
            want(1)
            A = read_set_file(args[0])
            if A.horizon < horizon:
                raise SpecError(f"file horizon {A.horizon} below requested {horizon}")
            return A
    except ValueError as exc:
        raise SpecError(f"bad argument in {family!r}: {exc}") from exc
    raise SpecError(f"unknown family {name!r}")


def read_set_file(path) -> NaturalSet:
    horizon = None
    elems = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read set file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*horizon\s*=\s*(\d+)\s*$", line)
            if m and lineno == 1:
                horizon = int(m.group(1))
            continue
        if not line.isdigit():
            raise SpecError(f"{path}:{lineno}: not a non-negative integer: {line!r}")
        elems.append(int(line))
    return NaturalSet(elems, horizon)


def write_set_file(A: NaturalSet, path) -> None:
    lines = [f"# horizon={A.horizon}"] + [str(e) for e in A.elements]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
