"""Empirical estimators for the degree of twisted commutativity and the
twisted conjugacy ratio over balls in a Cayley graph.

Any group can be plugged in through a ``GroupOracle``: identity, product,
inverse, endomorphism application, a generator list closed under inversion
and a canonical key used for equality and hashing.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Protocol, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from . import finite_groups as fg
from .free_words import FreeEndo, inv_codes, letter_order, mul_codes

DEFAULT_CAP = 10**7
STRATEGIES = ("pairs", "stabiliser", "fixed")


class BallCapExceeded(RuntimeError):
    def __init__(self, cap: int, completed_radius: int):
        super().__init__(f"ball exceeds {cap} elements beyond radius {completed_radius}")
        self.cap = cap
        self.completed_radius = completed_radius


class InvariantViolation(RuntimeError):
    pass


class GroupOracle(Protocol):
    name: str
    gens_id: str

    def identity(self) -> Any: ...

    def multiply(self, x, y) -> Any: ...

    def invert(self, x) -> Any: ...

    def apply_endo(self, phi, x) -> Any: ...

    def generators(self) -> list: ...

    def canonical_key(self, x) -> Hashable: ...

    def class_key(self, phi, x) -> Hashable | None:
        """Exact invariant of the phi-twisted class of x, or None if unknown."""
        ...


class FreeGroupOracle:
    """F_m on its standard basis; elements are reduced code tuples."""

    def __init__(self, rank: int):
        self.rank = rank
        self.name = f"F{rank}"
        self.gens_id = "basis"

    def identity(self):
        return ()

    def multiply(self, x, y):
        return mul_codes(x, y)

    def invert(self, x):
        return inv_codes(x)

    def apply_endo(self, phi: FreeEndo, x):
        return phi.apply_codes(x)

    def generators(self):
        return [(c,) for c in letter_order(self.rank)]

    def canonical_key(self, x):
        return x

    def class_key(self, phi, x):
        return None


class FiniteGroupOracle:
    """A Cayley table with its generator list (closed under inversion)."""

    def __init__(self, F: fg.FiniteGroupTable, gens: Sequence[int] | None = None, gens_id: str = "table-gens"):
        self.F = F
        self.name = F.name
        self.gens_id = gens_id
        gens = list(gens if gens is not None else F.gens)
        closed = []
        for g in gens + [int(F.inv[g]) for g in gens]:
            if g not in closed:
                closed.append(g)
        self._gens = closed
        self._classes: dict[int, tuple[int, ...]] = {}

    def identity(self):
        return self.F.id

    def multiply(self, x, y):
        return int(self.F.mul[x, y])

    def invert(self, x):
        return int(self.F.inv[x])

    def apply_endo(self, phi: fg.FiniteEndo, x):
        return int(phi.map[x])

    def generators(self):
        return list(self._gens)

    def canonical_key(self, x):
        return x

    def class_key(self, phi: fg.FiniteEndo, x):
        h = hash(phi)
        if h not in self._classes:
            self._classes[h] = fg.twisted_classes(self.F, phi).class_of
        return self._classes[h][x]


@dataclass
class BallIndex:
    elements: list
    lengths: list[int]
    index: dict
    slice_ends: list[int]  # slice_ends[n] = |B(n)|
    saturated: bool = False

    @property
    def radius(self) -> int:
        return len(self.slice_ends) - 1

    def size(self, n: int) -> int:
        return self.slice_ends[min(n, self.radius)]

    def slice(self, n: int) -> list:
        start = self.slice_ends[n - 1] if n > 0 else 0
        return self.elements[start : self.slice_ends[n]]

    def __contains__(self, key) -> bool:
        return key in self.index


def build_ball(o: GroupOracle, n: int, cap: int = DEFAULT_CAP) -> BallIndex:
    """Breadth-first ball of radius n; stops early if the group is exhausted."""
    e = o.identity()
    key = o.canonical_key
    elements = [e]
    lengths = [0]
    index = {key(e): 0}
    ends = [1]
    layer = [e]
    gens = o.generators()
    saturated = False
    for r in range(1, n + 1):
        nxt = []
        for x in layer:
            for g in gens:
                y = o.multiply(x, g)
                k = key(y)
                pos = index.get(k)
                if pos is None:
                    if len(elements) >= cap:
                        raise BallCapExceeded(cap, r - 1)
                    index[k] = len(elements)
                    elements.append(y)
                    lengths.append(r)
                    nxt.append(y)
                elif elements[pos] != y:
                    raise InvariantViolation(f"canonical_key collision between {elements[pos]!r} and {y!r}")
        if not nxt:
            saturated = True
            break
        ends.append(len(elements))
        layer = nxt
    return BallIndex(elements, lengths, index, ends, saturated)


@dataclass(frozen=True)
class SeriesEntry:
    n: int
    numerator: int
    denominator: int
    flags: tuple[str, ...] = ()

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


@dataclass
class EstimateSeries:
    entries: list[SeriesEntry]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        dens = [e.denominator for e in self.entries]
        if any(b <= a for a, b in zip(dens, dens[1:])):
            raise InvariantViolation("denominators must increase strictly with n")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, n: int) -> SeriesEntry:
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)

    def ratios(self) -> list[Fraction]:
        return [e.ratio for e in self.entries]

    def last(self) -> SeriesEntry:
        return self.entries[-1]

    def top_quartile_max(self) -> Fraction:
        """Stand-in for the limsup: largest ratio over the top quarter of radii."""
        k = max(1, math.ceil(len(self.entries) / 4))
        return max(e.ratio for e in self.entries[-k:])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "numerator", "denominator", "ratio_decimal", "flags"])
        for e in self.entries:
            w.writerow([e.n, e.numerator, e.denominator, f"{float(e.ratio):.12g}", "|".join(e.flags)])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "metadata": self.metadata,
            "entries": [
                {
                    "n": e.n,
                    "numerator": str(e.numerator),
                    "denominator": str(e.denominator),
                    "ratio": str(e.ratio),
                    "flags": list(e.flags),
                }
                for e in self.entries
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EstimateSeries":
        data = json.loads(text)
        entries = [
            SeriesEntry(d["n"], int(d["numerator"]), int(d["denominator"]), tuple(d["flags"]))
            for d in data["entries"]
        ]
        return cls(entries, data["metadata"])


# --- tdc ----------------------------------------------------------------------


def _count_chunk(args) -> list[int]:
    """Per-radius hit counts for one strategy over a slice of y values."""
    o, strategy, xs, phxs, lens, ys = args
    mul, inv, key = o.multiply, o.invert, o.canonical_key
    hits = [0] * (max(lens) + 1)
    for yi in ys:
        y = xs[yi]
        ly = lens[yi]
        if strategy == "pairs":
            for x, phx, lx in zip(xs, phxs, lens):
                if key(mul(x, y)) == key(mul(y, phx)):
                    hits[lx if lx > ly else ly] += 1
        elif strategy == "stabiliser":
            ky = key(y)
            for x, phx, lx in zip(xs, phxs, lens):
                if key(mul(mul(x, y), inv(phx))) == ky:
                    hits[lx if lx > ly else ly] += 1
        elif strategy == "fixed":
            yinv = inv(y)
            for x, phx, lx in zip(xs, phxs, lens):
                if key(mul(mul(y, phx), yinv)) == key(x):
                    hits[lx if lx > ly else ly] += 1
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
    return hits


def twisted_pair_counts(
    o: GroupOracle, phi, ball: BallIndex, strategy: str = "pairs", jobs: int = 1
) -> list[int]:
    """numerator(n) = |{(x, y) in B(n)^2 : xy = y phi(x)}| for n = 0..radius.

    ``pairs`` tests xy = y phi(x) directly, ``stabiliser`` tests
    x y phi(x)^-1 = y, ``fixed`` tests y phi(x) y^-1 = x.  Work is split by y;
    the partial counts are summed exactly, so the result does not depend on
    ``jobs``.
    """
    xs = ball.elements
    lens = ball.lengths
    phxs = [o.apply_endo(phi, x) for x in xs]
    idx = list(range(len(xs)))
    if jobs <= 1:
        chunks = [idx]
    else:
        chunks = [idx[i::jobs] for i in range(jobs)]
    tasks = [(o, strategy, xs, phxs, lens, c) for c in chunks]
    if jobs <= 1:
        parts = [_count_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_count_chunk, tasks))
    hits = [sum(col) for col in zip(*parts)]
    out, acc = [], 0
    for h in hits[: ball.radius + 1]:
        acc += h
        out.append(acc)
    return out


def tdc_series(
    o: GroupOracle,
    phi,
    n_max: int,
    *,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
    strategies: Sequence[str] = STRATEGIES,
    phi_id: str = "phi",
    ball: BallIndex | None = None,
) -> EstimateSeries:
    """Pair-count series; every strategy must produce the same numerators."""
    if ball is None:
        ball = build_ball(o, n_max, cap)
    results = {s: twisted_pair_counts(o, phi, ball, s, jobs) for s in strategies}
    first = results[strategies[0]]
    for s, r in results.items():
        if r != first:
            raise InvariantViolation(f"strategy {s} disagrees with {strategies[0]}: {r} vs {first}")
    top = min(n_max, ball.radius)
    entries = [SeriesEntry(n, first[n], ball.size(n) ** 2) for n in range(top + 1)]
    meta = {
        "group": o.name,
        "endomorphism": phi_id,
        "generating_set": o.gens_id,
        "estimator": "tdc",
        "strategies": list(strategies),
        "saturated": ball.saturated,
    }
    return EstimateSeries(entries, meta)


# --- tcr ----------------------------------------------------------------------


def _has_exact_classes(o: GroupOracle, phi) -> bool:
    fn = getattr(o, "class_key", None)
    return fn is not None and fn(phi, o.identity()) is not None


def tcr_series(
    o: GroupOracle,
    phi,
    n_max: int,
    conj_radius: Callable[[int], int] | None = None,
    *,
    exact: bool | None = None,
    cap: int = DEFAULT_CAP,
    phi_id: str = "phi",
) -> EstimateSeries:
    """Number of phi-twisted classes meeting B(n), over |B(n)|.

    With an exact class invariant from the oracle the counts are exact.
    Otherwise classes are merged by union-find using conjugators from
    B(conj_radius(n)) (default 2n) and moves staying inside B(n); this can
    only over-count, so those entries are flagged as upper estimates.
    """
    if exact is None:
        exact = _has_exact_classes(o, phi)
    elif exact and not _has_exact_classes(o, phi):
        raise ValueError(f"oracle {o.name} has no exact class invariant")
    if conj_radius is None:
        conj_radius = lambda n: 2 * n  # noqa: E731
    entries = []
    if exact:
        ball = build_ball(o, n_max, cap)
        seen: set = set()
        for n in range(ball.radius + 1):
            for x in ball.slice(n):
                seen.add(o.class_key(phi, x))
            entries.append(SeriesEntry(n, len(seen), ball.size(n), ("exact",)))
    else:
        big = build_ball(o, max([n_max] + [conj_radius(n) for n in range(n_max + 1)]), cap)
        top = min(n_max, big.radius)
        key = o.canonical_key
        for n in range(top + 1):
            size = big.size(n)
            members = big.elements[:size]
            ds = DisjointSet(range(size))
            for s in big.elements[: big.size(conj_radius(n))]:
                sinv = o.invert(o.apply_endo(phi, s))
                for i, x in enumerate(members):
                    j = big.index.get(key(o.multiply(o.multiply(s, x), sinv)))
                    if j is not None and j < size:
                        ds.merge(i, j)
            entries.append(SeriesEntry(n, ds.n_subsets, size, ("upper-estimate",)))
        ball = big
    meta = {
        "group": o.name,
        "endomorphism": phi_id,
        "generating_set": o.gens_id,
        "estimator": "tcr",
        "exact": bool(exact),
        "saturated": ball.saturated,
    }
    return EstimateSeries(entries, meta)


# --- growth -------------------------------------------------------------------


def growth_rate(counts: Sequence[int]) -> tuple[float, float]:
    """(exponential rate, polynomial degree) of a count series c(0..N).

    The rate is c(N)/c(N-1); for ball counts this converges to the same
    limit as c(N)^(1/N) but without its slow 1/N bias.  The degree is the
    least-squares slope of log c(n) against log n over the top half of radii.
    """
    c = [float(x) for x in counts]
    N = len(c) - 1
    if N < 1:
        return 1.0, 0.0
    rate = c[N] / c[N - 1] if c[N - 1] > 0 else c[N] ** (1.0 / N)
    ns = [n for n in range(max(1, math.ceil(N / 2)), N + 1) if c[n] > 0]
    if len(ns) < 2:
        return rate, 0.0
    slope = np.polyfit(np.log(ns), np.log([c[n] for n in ns]), 1)[0]
    return rate, float(slope)


def relative_growth_series(o: GroupOracle, member: Callable[[Any], bool], n_max: int, cap: int = DEFAULT_CAP) -> list[int]:
    """Cumulative counts |H cap B(n)| for a membership predicate."""
    ball = build_ball(o, n_max, cap)
    out, acc = [], 0
    for n in range(ball.radius + 1):
        acc += sum(1 for x in ball.slice(n) if member(x))
        out.append(acc)
    return out
