"""Core (Stallings) graphs of subgroups of free groups, topological graphs and
their entropies.

Entropy is the growth rate of non-backtracking closed walks, computed as the
spectral radius of the directed-edge transfer operator.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .free_words import ALPHABET, Word

ENTROPY_RTOL = 1e-9
ENTROPY_MAX_ITER = 2_000_000


@dataclass(frozen=True)
class CoreGraph:
    num_vertices: int
    edges: tuple[tuple[int, int, int], ...]  # (source, target, generator index)
    base: int
    rank_m: int

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for s, t, _ in self.edges:
            deg[s] += 1
            deg[t] += 1
        return deg

    def transitions(self) -> list[dict[int, int]]:
        """Per vertex, the target reached by reading each letter code."""
        out: list[dict[int, int]] = [{} for _ in range(self.num_vertices)]
        for s, t, g in self.edges:
            out[s][g + 1] = t
            out[t][-(g + 1)] = s
        return out


@dataclass(frozen=True)
class UGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    base: int | None = None

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        for u, v in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
        if not _connected(self.num_vertices, self.edges):
            raise ValueError("graph is not connected")

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def betti(self) -> int:
        return len(self.edges) - self.num_vertices + 1


def _connected(n: int, edges: Iterable[tuple[int, ...]]) -> bool:
    adj: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        adj[e[0]].add(e[1])
        adj[e[1]].add(e[0])
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


# --- folding ----------------------------------------------------------------


def core_graph(generators: Sequence[Word]) -> CoreGraph:
    """Wedge the generator loops at the base, fold to a fixpoint, trim."""
    if not generators:
        raise ValueError("need at least one generator")
    m = generators[0].rank
    edges: set[tuple[int, int, int]] = set()
    nv = 1
    for w in generators:
        code = w.code
        if not code:
            continue
        cur = 0
        for i, c in enumerate(code):
            nxt = 0 if i == len(code) - 1 else nv
            if nxt:
                nv += 1
            edges.add((cur, nxt, c - 1) if c > 0 else (nxt, cur, -c - 1))
            cur = nxt
    edges = _fold(edges)
    edges = _trim(edges, 0)
    return _canonical(edges, 0, m)


def _fold(edges: set[tuple[int, int, int]]) -> set[tuple[int, int, int]]:
    while True:
        seen: dict[tuple[int, int, int], int] = {}
        merge = None
        for s, t, g in edges:
            for key, other in (((s, g, 1), t), ((t, g, -1), s)):
                if key in seen and seen[key] != other:
                    merge = (seen[key], other)
                    break
                seen[key] = other
            if merge:
                break
        if merge is None:
            return edges
        keep, drop = min(merge), max(merge)
        edges = {(keep if s == drop else s, keep if t == drop else t, g) for s, t, g in edges}


def _trim(edges: set[tuple[int, int, int]], base: int) -> set[tuple[int, int, int]]:
    while True:
        deg: dict[int, int] = {}
        for s, t, _ in edges:
            deg[s] = deg.get(s, 0) + 1
            deg[t] = deg.get(t, 0) + 1
        leaves = {v for v, d in deg.items() if d == 1 and v != base}
        if not leaves:
            return edges
        edges = {e for e in edges if e[0] not in leaves and e[1] not in leaves}


def _canonical(edges: set[tuple[int, int, int]], base: int, m: int) -> CoreGraph:
    """Relabel vertices in breadth-first order from the base, reading letters
    a, A, b, B, ...; isomorphic based graphs get identical edge lists."""
    trans: dict[int, dict[int, int]] = {}
    for s, t, g in edges:
        trans.setdefault(s, {})[g + 1] = t
        trans.setdefault(t, {})[-(g + 1)] = s
    order = [c for g in range(m) for c in (g + 1, -(g + 1))]
    label = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for c in order:
            w = trans.get(v, {}).get(c)
            if w is not None and w not in label:
                label[w] = len(label)
                queue.append(w)
    new = tuple(sorted((label[s], label[t], g) for s, t, g in edges))
    return CoreGraph(len(label), new, 0, m)


def read_word(C: CoreGraph, w: Word) -> int | None:
    """Vertex reached from the base by reading w, or None if it falls off."""
    trans = C.transitions()
    v = C.base
    for c in w.code:
        v = trans[v].get(c)
        if v is None:
            return None
    return v


def contains(C: CoreGraph, w: Word) -> bool:
    return read_word(C, w) == C.base


def has_finite_index(C: CoreGraph) -> bool:
    return all(d == 2 * C.rank_m for d in C.degrees())


def subgroup_rank(C: CoreGraph) -> int:
    return len(C.edges) - C.num_vertices + 1


def relative_growth_by_graph(C: CoreGraph, n: int) -> list[int]:
    """Cumulative counts |H cap B(j)| for j = 0..n via reduced paths at the base."""
    trans = C.transitions()
    counts = {(C.base, 0): 1}
    out = [1]
    for _ in range(n):
        nxt: dict[tuple[int, int], int] = {}
        for (v, last), k in counts.items():
            for c, w in trans[v].items():
                if c != -last:
                    nxt[(w, c)] = nxt.get((w, c), 0) + k
        counts = nxt
        out.append(out[-1] + sum(k for (v, _), k in counts.items() if v == C.base))
    return out


def underlying(C: CoreGraph) -> UGraph:
    return UGraph(C.num_vertices, tuple((s, t) for s, t, _ in C.edges), C.base)


# --- topological graphs -----------------------------------------------------


class CycleGraph(ValueError):
    """Raised when topologizing a graph with no vertex of degree >= 3."""


def topologize(U: UGraph) -> UGraph:
    """Suppress every degree-2 vertex (the base included)."""
    deg = U.degrees()
    if min(deg) < 2:
        raise ValueError("topologize needs minimum degree 2")
    if max(deg) < 3:
        raise CycleGraph("graph is a cycle; it has rank 1")
    edges = list(U.edges)
    alive = set(range(U.num_vertices))
    base = U.base
    while True:
        deg = {v: 0 for v in alive}
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        v = next((x for x in sorted(alive) if deg[x] == 2), None)
        if v is None:
            break
        inc = [i for i, e in enumerate(edges) if v in e]
        if len(inc) == 1:
            raise CycleGraph("graph is a cycle; it has rank 1")
        (i, j) = inc
        ends = [edges[i][0] if edges[i][1] == v else edges[i][1], edges[j][0] if edges[j][1] == v else edges[j][1]]
        edges = [e for k, e in enumerate(edges) if k not in (i, j)] + [tuple(sorted(ends))]
        alive.discard(v)
        if base == v:
            base = None
    relabel = {v: i for i, v in enumerate(sorted(alive))}
    new_edges = tuple(sorted(tuple(sorted((relabel[a], relabel[b]))) for a, b in edges))
    return UGraph(len(alive), new_edges, relabel.get(base) if base is not None else None)


def subdivide(U: UGraph, e: int) -> UGraph:
    """Replace edge e by a path of length two through a new vertex."""
    u, v = U.edges[e]
    w = U.num_vertices
    edges = U.edges[:e] + U.edges[e + 1 :] + ((u, w), (v, w))
    return UGraph(w + 1, edges, U.base)


def nonbacktracking_matrix(U: UGraph) -> np.ndarray:
    """Transfer operator on directed edges; 2i is edge i forwards, 2i+1 backwards."""
    heads, tails = [], []
    for u, v in U.edges:
        tails += [u, v]
        heads += [v, u]
    d = len(heads)
    B = np.zeros((d, d))
    for a in range(d):
        for b in range(d):
            if heads[a] == tails[b] and b != (a ^ 1):
                B[a, b] = 1.0
    return B


def entropy_bounds(U: UGraph, rtol: float = ENTROPY_RTOL) -> tuple[float, float]:
    """Collatz-Wielandt bracket for the non-backtracking spectral radius.

    Power iteration on B + I (the damped operator shares the Perron vector and
    is aperiodic), started from the all-ones vector.
    """
    if min(U.degrees()) < 2:
        raise ValueError("entropy needs minimum degree 2")
    if not U.edges:
        raise ValueError("graph has no edges")
    A = nonbacktracking_matrix(U) + np.eye(2 * len(U.edges))
    x = np.ones(A.shape[0])
    for _ in range(ENTROPY_MAX_ITER):
        y = A @ x
        q = y / x
        lo, hi = q.min(), q.max()
        if hi - lo <= rtol * hi:
            return float(lo) - 1.0, float(hi) - 1.0
        x = y / y.max()
    raise RuntimeError("power iteration did not converge")


def entropy(U: UGraph) -> float:
    lo, hi = entropy_bounds(U)
    return float((lo + hi) / 2)


def bouquet(k: int) -> UGraph:
    return UGraph(1, ((0, 0),) * k, 0)


def theta() -> UGraph:
    return UGraph(2, ((0, 1),) * 3)


def dumbbell() -> UGraph:
    return UGraph(2, ((0, 0), (0, 1), (1, 1)))


def cycle(n: int) -> UGraph:
    return UGraph(n, tuple((i, (i + 1) % n) if n > 1 else (0, 0) for i in range(n)))


# --- enumeration of Top(k) --------------------------------------------------


def canonical_form(U: UGraph) -> tuple:
    """Minimum over vertex permutations of the upper-triangular multiplicities."""
    n = U.num_vertices
    mult = [[0] * n for _ in range(n)]
    for u, v in U.edges:
        mult[u][v] += 1
        if u != v:
            mult[v][u] += 1
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(mult[perm[i]][perm[j]] for i in range(n) for j in range(i, n))
        if best is None or key < best:
            best = key
    return (n, best)


def _from_cells(n: int, cells: Sequence[tuple[int, int]], counts: Sequence[int]) -> UGraph:
    edges = []
    for (i, j), c in zip(cells, counts):
        edges += [(i, j)] * c
    return UGraph(n, tuple(edges))


def enumerate_top(k: int, max_degree: int | None = None) -> list[UGraph]:
    """Connected multigraphs with all degrees in [3, max_degree] and Betti
    number k, one per isomorphism class."""
    if k < 2:
        raise ValueError("Top(k) needs k >= 2")
    found: dict[tuple, UGraph] = {}
    for n in range(1, 2 * k - 1):
        e = n + k - 1
        cap = 2 * e - 3 * (n - 1)
        if max_degree is not None:
            cap = min(cap, max_degree)
        cells = [(i, j) for i in range(n) for j in range(i, n)]
        for counts in _fill(n, cells, e, cap):
            deg = [0] * n
            for (i, j), c in zip(cells, counts):
                deg[i] += c
                deg[j] += c
            if min(deg) < 3 or not _connected(n, [c for c, k_ in zip(cells, counts) if k_]):
                continue
            U = _from_cells(n, cells, counts)
            found.setdefault(canonical_form(U), U)
    return [found[key] for key in sorted(found)]


def _fill(n: int, cells: list[tuple[int, int]], total: int, cap: int):
    """Yield multiplicity vectors over cells summing to total, degrees <= cap.

    Cells are ordered row by row, so vertex i is complete once its row is
    done; incomplete vertices are pruned for exceeding cap and completed ones
    for falling below 3.
    """
    deg = [0] * n
    counts = [0] * len(cells)
    last_cell = {}
    for idx, (i, j) in enumerate(cells):
        last_cell[i] = max(last_cell.get(i, -1), idx)
        last_cell[j] = max(last_cell.get(j, -1), idx)
    finishing: dict[int, list[int]] = {}
    for v, idx in last_cell.items():
        finishing.setdefault(idx, []).append(v)

    def rec(idx: int, left: int):
        if idx == len(cells):
            if left == 0:
                yield tuple(counts)
            return
        i, j = cells[idx]
        w = 2 if i == j else 1
        room = cap - deg[i] if i == j else min(cap - deg[i], cap - deg[j])
        top = min(left, room // w)
        for c in range(top + 1):
            deg[i] += w * c if i == j else c
            if i != j:
                deg[j] += c
            counts[idx] = c
            if all(deg[v] >= 3 for v in finishing.get(idx, [])):
                yield from rec(idx + 1, left - c)
            deg[i] -= w * c if i == j else c
            if i != j:
                deg[j] -= c
        counts[idx] = 0

    yield from rec(0, total)


def gamma_k_candidates(m: int, k: int) -> list[tuple[str, UGraph, float]]:
    """The finite candidate set behind gamma_k: for every rank 2 <= j <= k,
    topological graphs with a degree other than 2m, and single subdivisions
    of the 2m-regular ones.  Degrees are capped at 2m."""
    out = []
    for j in range(2, k + 1):
        for idx, T in enumerate(enumerate_top(j, 2 * m)):
            if any(d != 2 * m for d in T.degrees()):
                out.append((f"Top({j})#{idx}", T, entropy(T)))
            else:
                seen = set()
                for e in range(len(T.edges)):
                    S = subdivide(T, e)
                    key = canonical_form(S)
                    if key not in seen:
                        seen.add(key)
                        out.append((f"s_{e}(Top({j})#{idx})", S, entropy(S)))
    return out


def gamma_k(m: int, k: int) -> float:
    """Upper bound on the growth rate of infinite-index subgroups of F_m of
    rank at most k.  Rank-1 subgroups contribute 1."""
    if m < 2 or k < 1:
        raise ValueError("need m >= 2 and k >= 1")
    return max([1.0] + [rho for _, _, rho in gamma_k_candidates(m, k)])


# --- text formats -----------------------------------------------------------


def dump_graph(C: CoreGraph) -> str:
    lines = [f"vertices {C.num_vertices} base {C.base} rank {C.rank_m}"]
    lines += [f"{s} {t} {ALPHABET[g]}" for s, t, g in C.edges]
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> CoreGraph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    head = lines[0]
    if len(head) != 6 or head[0] != "vertices" or head[2] != "base" or head[4] != "rank":
        raise ValueError("header must read 'vertices N base B rank M'")
    n, base, m = int(head[1]), int(head[3]), int(head[5])
    edges = []
    for parts in lines[1:]:
        s, t, lab = parts
        g = ALPHABET.index(lab)
        if g >= m:
            raise ValueError(f"label {lab} outside rank {m}")
        edges.append((int(s), int(t), g))
    return CoreGraph(n, tuple(sorted(edges)), base, m)


def to_dot(C: CoreGraph) -> str:
    lines = ["digraph core {"]
    for v in range(C.num_vertices):
        shape = "doublecircle" if v == C.base else "circle"
        lines.append(f'  {v} [shape={shape}];')
    for s, t, g in C.edges:
        lines.append(f'  {s} -> {t} [label="{ALPHABET[g]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
