"""Minimal-form words in torus-knot groups <x, y | x^2 = y^m>, m = 2k+1.

A minimal form is x^a1 y^b1 ... x^a_tau y^b_tau with

  (i)   a1 = 0 iff b_tau = 0,
  (ii)  a_i = +-1 for 2 <= i <= tau,
  (iii) -k <= b_i <= k for 1 <= i <= tau-1.

Blocks are taken maximal (b_i != 0 for i < tau), so forms and the strings
they spell correspond one to one.  The empty word is tau = 1, a1 = b1 = 0.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .density import EstimateSeries, SeriesEntry


def _half(m: int) -> int:
    if m < 3 or m % 2 == 0:
        raise ValueError(f"m must be odd and >= 3, got {m}")
    return (m - 1) // 2


@dataclass(frozen=True)
class MinForm:
    m: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def tau(self) -> int:
        return len(self.a)

    @property
    def length(self) -> int:
        return sum(map(abs, self.a)) + sum(map(abs, self.b))

    def is_valid(self) -> bool:
        try:
            self.validate()
        except ValueError:
            return False
        return True

    def validate(self) -> None:
        k = _half(self.m)
        a, b, tau = self.a, self.b, self.tau
        if tau < 1 or len(b) != tau:
            raise ValueError("need tau >= 1 blocks with one a and one b each")
        if (a[0] == 0) != (b[-1] == 0):
            raise ValueError("(i) fails: a1 = 0 must hold exactly when b_tau = 0")
        if any(x not in (1, -1) for x in a[1:]):
            raise ValueError("(ii) fails: a_i must be +-1 for i >= 2")
        if any(not -k <= x <= k for x in b[:-1]):
            raise ValueError(f"(iii) fails: b_i must lie in [-{k}, {k}] for i < tau")
        if any(x == 0 for x in b[:-1]):
            raise ValueError("blocks are not maximal: b_i = 0 for some i < tau")

    def word(self) -> str:
        out = []
        for ai, bi in zip(self.a, self.b):
            out.append(("x" if ai > 0 else "X") * abs(ai))
            out.append(("y" if bi > 0 else "Y") * abs(bi))
        return "".join(out)

    @classmethod
    def from_word(cls, m: int, w: str) -> "MinForm":
        """Read a form off its maximal runs; validity is checked separately."""
        runs: list[tuple[str, int]] = []
        for ch in w:
            if ch not in "xXyY":
                raise ValueError(f"bad letter {ch!r}")
            s = 1 if ch.islower() else -1
            g = ch.lower()
            if runs and runs[-1][0] == g:
                prev = runs[-1][1]
                if (prev > 0) != (s > 0):
                    raise ValueError(f"word {w!r} is not freely reduced")
                runs[-1] = (g, prev + s)
            else:
                runs.append((g, s))
        a: list[int] = []
        b: list[int] = []
        for g, e in runs:
            if g == "x":
                a.append(e)
                b.append(0)
            else:
                if not a:
                    a.append(0)
                    b.append(0)
                b[-1] = e
        if not a:
            a, b = [0], [0]
        return cls(m, tuple(a), tuple(b))


def count_min_forms(m: int, n_max: int) -> list[int]:
    """g(0..n_max) by a letter-level automaton.

    States: start; inside the leading x-run; inside a y-run (sign, length
    capped at k+1, whether the word began with x); just after a single x.
    A y-run longer than k can only be the final block.
    """
    k = _half(m)
    START = ("S",)
    dead_free = {START: 1}
    g = [1]
    cur = dead_free
    for _ in range(n_max):
        nxt: dict[tuple, int] = {}

        def add(state, c):
            nxt[state] = nxt.get(state, 0) + c

        for st, c in cur.items():
            kind = st[0]
            if kind == "S":
                for s in (1, -1):
                    add(("A1", s), c)
                    add(("Y", s, 1, False), c)
            elif kind == "A1":
                s = st[1]
                add(("A1", s), c)
                for t in (1, -1):
                    add(("Y", t, 1, True), c)
            elif kind == "Y":
                _, s, ln, from_x = st
                nl = min(ln + 1, k + 1)
                if from_x or nl <= k:
                    add(("Y", s, nl, from_x), c)
                if ln <= k:
                    for t in (1, -1):
                        add(("X", t, from_x), c)
            elif kind == "X":
                _, _, from_x = st
                for u in (1, -1):
                    add(("Y", u, 1, from_x), c)
        cur = nxt
        g.append(sum(c for st, c in cur.items() if _accepting(st)))
    return g


def _accepting(st: tuple) -> bool:
    if st[0] == "Y":
        return st[3]
    if st[0] == "X":
        return not st[2]
    return st[0] == "S"


def enumerate_min_forms(m: int, n: int):
    """Every MinForm of length exactly n, built block by block from (i)-(iii)."""
    k = _half(m)

    def tails(rest: int, a: list[int], b: list[int], a1_zero: bool):
        # choose b for the current block, then either stop or open another block
        if a1_zero:
            # b_tau must be 0: stop here only with nothing left
            if rest == 0 and len(a) >= 2:
                yield MinForm(m, tuple(a), tuple(b + [0]))
        else:
            if rest >= 1:
                for s in (1, -1):
                    yield MinForm(m, tuple(a), tuple(b + [s * rest]))
        for bl in range(1, min(k, rest - 1) + 1):
            for s in (1, -1):
                for ai in (1, -1):
                    yield from tails(rest - bl - 1, a + [ai], b + [s * bl], a1_zero)

    if n == 0:
        yield MinForm(m, (0,), (0,))
        return
    for a1 in range(1, n):
        for s in (1, -1):
            yield from tails(n - a1, [s * a1], [], False)
    yield from tails(n, [0], [], True)


def brute_force_counts(m: int, n_max: int) -> list[int]:
    return [sum(1 for _ in enumerate_min_forms(m, n)) for n in range(n_max + 1)]


def tcr_upper_series(m: int, n_max: int) -> tuple[EstimateSeries, list[int]]:
    """The bound 1/(2n) on the twisted conjugacy ratio, with g(n) alongside."""
    g = count_min_forms(m, n_max)
    entries = [SeriesEntry(n, 1, 2 * n, ("upper-bound",)) for n in range(1, n_max + 1)]
    meta = {"group": f"T(2,{m})", "endomorphism": "invert-generators", "generating_set": "x,y", "estimator": "tcr-bound"}
    return EstimateSeries(entries, meta), g


def bound_ratio(n: int) -> Fraction:
    return Fraction(1, 2 * n)


def artin_csv(m: int, n_max: int) -> str:
    series, g = tcr_upper_series(m, n_max)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "g", "g_over_2n", "bound_1_over_2n"])
    for e in series.entries:
        w.writerow([e.n, g[e.n], str(Fraction(g[e.n], 2 * e.n)), str(e.ratio)])
    return buf.getvalue()
