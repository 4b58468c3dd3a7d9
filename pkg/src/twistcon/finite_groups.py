"""Finite groups as Cayley tables: twisted conjugacy classes, Reidemeister
numbers, degrees of (twisted) commutativity and a small fixture corpus.

Group elements are indices ``0..N-1``; an endomorphism is an index array of
length N.  Semidirect products ``H x|_phi Z/m`` use elements ``t^a u`` with
``(t^a u)(t^b v) = t^{a+b} phi^b(u) v``, so that ``t^-1 u t = phi(u)``.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

ASSOC_FULL_CHECK = 64
ASSOC_SAMPLES = 20000


class InvalidGroup(ValueError):
    pass


class InvalidEndomorphism(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    mul: np.ndarray
    inv: np.ndarray
    id: int
    labels: tuple | None = None
    gens: tuple[int, ...] | None = None
    name: str = "F"

    def __post_init__(self):
        mul = np.asarray(self.mul, dtype=np.int64)
        n = mul.shape[0]
        if mul.shape != (n, n):
            raise InvalidGroup("multiplication table must be square")
        inv = np.asarray(self.inv, dtype=np.int64)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        mul.setflags(write=False)
        inv.setflags(write=False)
        if mul.min() < 0 or mul.max() >= n:
            raise InvalidGroup("table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(mul[self.id], ar) and np.array_equal(mul[:, self.id], ar)):
            raise InvalidGroup("id is not a two-sided identity")
        if inv.shape != (n,) or not (
            np.all(mul[ar, inv] == self.id) and np.all(mul[inv, ar] == self.id)
        ):
            raise InvalidGroup("inv is not a two-sided inverse table")
        if n <= ASSOC_FULL_CHECK:
            left = mul[mul][:, :, :]  # left[x, y, z] = (xy)z
            right = mul[:, mul]  # right[x, y, z] = x(yz)
            if not np.array_equal(left, right):
                raise InvalidGroup("multiplication is not associative")
        else:
            rng = np.random.default_rng(0)
            x, y, z = rng.integers(0, n, size=(3, ASSOC_SAMPLES))
            if not np.array_equal(mul[mul[x, y], z], mul[x, mul[y, z]]):
                raise InvalidGroup("multiplication is not associative (sampled)")
        if self.gens is None:
            object.__setattr__(self, "gens", tuple(_greedy_generators(mul, self.id)))

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroupTable({self.name}, order={self.order})"

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def label(self, x: int) -> str:
        return str(self.labels[x]) if self.labels is not None else str(x)

    def power(self, x: int, k: int) -> int:
        r = self.id
        base = x if k >= 0 else int(self.inv[x])
        for _ in range(abs(k)):
            r = int(self.mul[r, base])
        return r

    def identity_endo(self) -> "FiniteEndo":
        return FiniteEndo(np.arange(self.order))

    def trivial_endo(self) -> "FiniteEndo":
        return FiniteEndo(np.full(self.order, self.id))

    def inner(self, g: int) -> "FiniteEndo":
        """Conjugation x -> g x g^-1."""
        return FiniteEndo(self.mul[self.mul[g], self.inv[g]])


@dataclass(frozen=True, eq=False)
class FiniteEndo:
    map: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.map, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "map", arr)

    def __call__(self, x):
        return self.map[x]

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteEndo) and np.array_equal(self.map, other.map)

    def __hash__(self) -> int:
        return hash(self.map.tobytes())

    def compose(self, other: "FiniteEndo") -> "FiniteEndo":
        """self o other."""
        return FiniteEndo(self.map[other.map])

    def power(self, k: int) -> "FiniteEndo":
        out = np.arange(len(self.map))
        for _ in range(k):
            out = self.map[out]
        return FiniteEndo(out)


@dataclass(frozen=True)
class TwistedPartition:
    class_of: tuple[int, ...]
    class_count: int

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.class_count)]
        for x, c in enumerate(self.class_of):
            out[c].append(x)
        return out


def _greedy_generators(mul: np.ndarray, ident: int) -> list[int]:
    n = mul.shape[0]
    gens: list[int] = []
    inside = np.zeros(n, dtype=bool)
    inside[ident] = True
    for x in range(n):
        if not inside[x]:
            gens.append(x)
            inside = np.zeros(n, dtype=bool)
            inside[list(_closure(mul, ident, gens))] = True
    return gens


def _closure(mul: np.ndarray, ident: int, gens: Iterable[int]) -> set[int]:
    gens = list(gens)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(mul[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def subgroup_generated(F: FiniteGroupTable, gens: Iterable[int]) -> list[int]:
    return sorted(_closure(F.mul, F.id, gens))


# --- construction ---------------------------------------------------------


def from_elements(
    elements: Sequence[Hashable],
    op: Callable,
    identity_element: Hashable,
    gens: Sequence[Hashable] | None = None,
    name: str = "F",
) -> FiniteGroupTable:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            mul[i, j] = index[op(a, b)]
    ident = index[identity_element]
    inv = np.empty(n, dtype=np.int64)
    rows, cols = np.nonzero(mul == ident)
    inv[rows] = cols
    g = tuple(index[x] for x in gens) if gens is not None else None
    return FiniteGroupTable(mul, inv, ident, tuple(elements), g, name)


def generate(
    gens: Sequence[Hashable], op: Callable, identity_element: Hashable, name: str = "F"
) -> FiniteGroupTable:
    """Close a set of generators under ``op`` (breadth-first, deterministic)."""
    elements = [identity_element]
    seen = {identity_element}
    queue = deque([identity_element])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = op(x, g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                queue.append(y)
    return from_elements(elements, op, identity_element, gens, name)


def cyclic(n: int) -> FiniteGroupTable:
    return generate([1 % n], lambda a, b: (a + b) % n, 0, name=f"Z/{n}")


def _perm_mul(p, q):
    # apply q first, then p
    return tuple(p[i] for i in q)


def symmetric3() -> FiniteGroupTable:
    return generate([(1, 0, 2), (1, 2, 0)], _perm_mul, (0, 1, 2), name="S3")


def alternating4() -> FiniteGroupTable:
    return generate([(1, 2, 0, 3), (1, 0, 3, 2)], _perm_mul, (0, 1, 2, 3), name="A4")


def dihedral(n: int) -> FiniteGroupTable:
    """Dihedral group of order 2n, the quotient of D_inf by the translations nZ.

    Elements (s, k) stand for r^k s^s with r a rotation and s a reflection.
    """

    def op(a, b):
        sa, ka = a
        sb, kb = b
        return ((sa + sb) % 2, (ka + (kb if sa == 0 else -kb)) % n)

    return generate([(0, 1), (1, 0)], op, (0, 0), name=f"D{n}")


def quaternion() -> FiniteGroupTable:
    def op(a, b):
        (a11, a12, a21, a22), (b11, b12, b21, b22) = a, b
        return (
            a11 * b11 + a12 * b21,
            a11 * b12 + a12 * b22,
            a21 * b11 + a22 * b21,
            a21 * b12 + a22 * b22,
        )

    i = (1j, 0, 0, -1j)
    j = (0, 1, -1, 0)
    return generate([i, j], op, (1, 0, 0, 1), name="Q8")


def heisenberg(p: int) -> FiniteGroupTable:
    """Upper unitriangular 3x3 matrices over Z/p, stored as (a, b, c)."""

    def op(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    return generate([(1, 0, 0), (0, 1, 0)], op, (0, 0, 0), name=f"Heis({p})")


def direct_product(G: FiniteGroupTable, H: FiniteGroupTable) -> FiniteGroupTable:
    n, k = G.order, H.order
    mul = (G.mul[:, None, :, None] * k + H.mul[None, :, None, :]).reshape(n * k, n * k)
    inv = (G.inv[:, None] * k + H.inv[None, :]).reshape(-1)
    gens = tuple(g * k + H.id for g in G.gens) + tuple(G.id * k + h for h in H.gens)
    return FiniteGroupTable(mul, inv, G.id * k + H.id, None, gens, f"{G.name}x{H.name}")


def semidirect_extension(H: FiniteGroupTable, phi: FiniteEndo, m: int) -> FiniteGroupTable:
    """H x|_phi Z/m with t^-1 u t = phi(u); element t^a u has index a*|H| + u."""
    validate_endo(H, phi)
    if m < 1:
        raise ValueError("m must be positive")
    if phi.power(m) != H.identity_endo():
        raise InvalidEndomorphism(f"phi^{m} is not the identity")
    n = H.order
    powers = [phi.power(b).map for b in range(m)]
    mul = np.empty((m * n, m * n), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            block = H.mul[powers[b]]  # block[u, v] = phi^b(u) v
            mul[a * n : (a + 1) * n, b * n : (b + 1) * n] = ((a + b) % m) * n + block
    ident = H.id
    inv = np.empty(m * n, dtype=np.int64)
    rows, cols = np.nonzero(mul == ident)
    inv[rows] = cols
    labels = tuple(f"t^{a}*{H.label(u)}" for a in range(m) for u in range(n))
    gens = tuple(H.gens) + ((1 % m) * n + H.id,)
    return FiniteGroupTable(mul, inv, ident, labels, gens, f"{H.name}x|Z/{m}")


def subgroup_table(F: FiniteGroupTable, members: Sequence[int]) -> tuple[FiniteGroupTable, np.ndarray]:
    """Relabel a subgroup as a table; returns (table, global indices)."""
    members = np.asarray(sorted(members), dtype=np.int64)
    local = {int(x): i for i, x in enumerate(members)}
    try:
        mul = np.vectorize(local.__getitem__)(F.mul[np.ix_(members, members)])
        inv = np.array([local[int(F.inv[x])] for x in members])
    except KeyError:
        raise InvalidGroup("subset is not closed under the group operations") from None
    return FiniteGroupTable(mul, inv, local[F.id], None, None, f"sub({F.name})"), members


def is_normal(F: FiniteGroupTable, members: Iterable[int]) -> bool:
    s = np.zeros(F.order, dtype=bool)
    s[list(members)] = True
    idx = np.flatnonzero(s)
    conj = F.mul[F.mul[:, idx], F.inv[:, None]]  # g n g^-1
    return bool(s[conj].all())


def quotient(F: FiniteGroupTable, members: Iterable[int]) -> tuple[FiniteGroupTable, np.ndarray]:
    """Quotient F/N by a normal subgroup; returns (table, projection array)."""
    members = sorted(set(members))
    if not is_normal(F, members):
        raise InvalidGroup("subgroup is not normal")
    proj = np.full(F.order, -1, dtype=np.int64)
    reps: list[int] = []
    for x in range(F.order):
        if proj[x] < 0:
            proj[F.mul[x, members]] = len(reps)
            reps.append(x)
    k = len(reps)
    mul = np.array([[proj[F.mul[a, b]] for b in reps] for a in reps], dtype=np.int64)
    inv = np.array([proj[F.inv[a]] for a in reps], dtype=np.int64)
    return FiniteGroupTable(mul, inv, int(proj[F.id]), None, None, f"{F.name}/N"), proj


def induced_endo(F: FiniteGroupTable, phi: FiniteEndo, proj: np.ndarray, k: int) -> FiniteEndo:
    out = np.full(k, -1, dtype=np.int64)
    for x in range(F.order):
        img = proj[phi.map[x]]
        if out[proj[x]] < 0:
            out[proj[x]] = img
        elif out[proj[x]] != img:
            raise InvalidEndomorphism("endomorphism does not preserve the subgroup")
    return FiniteEndo(out)


# --- endomorphisms ----------------------------------------------------------


def validate_endo(F: FiniteGroupTable, phi: FiniteEndo) -> None:
    m = phi.map
    if m.shape != (F.order,) or m.min() < 0 or m.max() >= F.order:
        raise InvalidEndomorphism("map has wrong length or entries out of range")
    if m[F.id] != F.id:
        raise InvalidEndomorphism("identity not mapped to identity")
    if not np.array_equal(m[F.mul], F.mul[m[:, None], m[None, :]]):
        raise InvalidEndomorphism("map is not a homomorphism")


def endo_from_images(F: FiniteGroupTable, images: Sequence[int], gens: Sequence[int] | None = None) -> FiniteEndo:
    """Extend generator images to a homomorphism, or raise if impossible."""
    phi = _extend(F, list(gens if gens is not None else F.gens), list(images))
    if phi is None:
        raise InvalidEndomorphism("generator images do not extend to a homomorphism")
    return phi


def _extend(F: FiniteGroupTable, gens: list[int], images: list[int]) -> FiniteEndo | None:
    n = F.order
    out = np.full(n, -1, dtype=np.int64)
    out[F.id] = F.id
    queue = deque([F.id])
    while queue:
        x = queue.popleft()
        for g, img in zip(gens, images):
            y = int(F.mul[x, g])
            val = F.mul[out[x], img]
            if out[y] < 0:
                out[y] = val
                queue.append(y)
            elif out[y] != val:
                return None
    if (out < 0).any():
        raise InvalidGroup("gens do not generate the group")
    phi = FiniteEndo(out)
    try:
        validate_endo(F, phi)
    except InvalidEndomorphism:
        return None
    return phi


def endomorphisms(F: FiniteGroupTable, limit: int = 12) -> list[FiniteEndo]:
    """All endomorphisms, by exhaustive search over generator images."""
    if F.order > limit:
        raise ValueError(f"exhaustive endomorphism search is limited to order <= {limit}")
    gens = list(F.gens)
    out = []
    for images in itertools.product(range(F.order), repeat=len(gens)):
        phi = _extend(F, gens, list(images))
        if phi is not None:
            out.append(phi)
    return out


def is_automorphism(phi: FiniteEndo) -> bool:
    return len(set(phi.map.tolist())) == len(phi.map)


def fixed_points(F: FiniteGroupTable, phi: FiniteEndo) -> list[int]:
    return np.flatnonzero(phi.map == np.arange(F.order)).tolist()


# --- twisted conjugacy ------------------------------------------------------


def _canonical_ids(F: FiniteGroupTable, ds: DisjointSet) -> tuple[int, ...]:
    ids: dict[int, int] = {}
    out = []
    for x in range(F.order):
        root = ds[x]
        if root not in ids:
            ids[root] = len(ids)
        out.append(ids[root])
    return tuple(out)


def _twisted_targets(F: FiniteGroupTable, phi: FiniteEndo, zs) -> np.ndarray:
    """targets[i, x] = z_i x phi(z_i)^-1."""
    zs = np.asarray(list(zs), dtype=np.int64)
    return F.mul[F.mul[zs], F.inv[phi.map[zs]][:, None]]


def twisted_classes(F: FiniteGroupTable, phi: FiniteEndo) -> TwistedPartition:
    """Orbits of the twisted action z.x = z x phi(z)^-1."""
    validate_endo(F, phi)
    n = F.order
    ds = DisjointSet(range(n))
    for row in _twisted_targets(F, phi, F.gens):
        for x, y in enumerate(row.tolist()):
            ds.merge(x, y)
    class_of = np.array(_canonical_ids(F, ds))
    full = _twisted_targets(F, phi, range(n))
    if not np.array_equal(class_of[full], np.broadcast_to(class_of, full.shape)):
        # generator moves did not close up; fall back to all conjugators
        for row in full:
            for x, y in enumerate(row.tolist()):
                ds.merge(x, y)
        class_of = np.array(_canonical_ids(F, ds))
    return TwistedPartition(tuple(class_of.tolist()), int(class_of.max()) + 1)


def reidemeister(F: FiniteGroupTable, phi: FiniteEndo) -> int:
    return twisted_classes(F, phi).class_count


def conjugacy_classes(F: FiniteGroupTable) -> TwistedPartition:
    return twisted_classes(F, F.identity_endo())


def twisted_pair_count(F: FiniteGroupTable, phi: FiniteEndo) -> int:
    """|{(x, y) in F^2 : xy = y phi(x)}| by direct scan of all pairs."""
    validate_endo(F, phi)
    lhs = F.mul  # lhs[x, y] = xy
    rhs = F.mul.T[phi.map]  # rhs[x, y] = y phi(x)
    return int(np.count_nonzero(lhs == rhs))


def tdc_finite(F: FiniteGroupTable, phi: FiniteEndo) -> Fraction:
    return Fraction(twisted_pair_count(F, phi), F.order**2)


def dc_finite(F: FiniteGroupTable) -> Fraction:
    return tdc_finite(F, F.identity_endo())


def fixed_conjugacy_class_count(F: FiniteGroupTable, phi: FiniteEndo) -> int:
    """Number of ordinary conjugacy classes [g] with [phi(g)] = [g]."""
    validate_endo(F, phi)
    cls = np.array(conjugacy_classes(F).class_of)
    fixed = {int(c) for x, c in enumerate(cls) if cls[phi.map[x]] == c}
    return len(fixed)


def check_summation_bounds(F: FiniteGroupTable, members: Sequence[int], phi: FiniteEndo) -> bool:
    """Two-sided bound on R(phi) through the twisted restrictions to N.

    (1/[F:N]) sum_{gN} R(i_g o phi|_N) <= R(phi) <= sum_{gN} R(i_g o phi|_N)
    """
    validate_endo(F, phi)
    members = sorted(set(int(x) for x in members))
    if not is_normal(F, members):
        raise InvalidGroup("N is not normal")
    in_n = np.zeros(F.order, dtype=bool)
    in_n[members] = True
    if not in_n[phi.map[members]].all():
        raise InvalidEndomorphism("phi(N) is not contained in N")
    sub, glob = subgroup_table(F, members)
    local = {int(x): i for i, x in enumerate(glob)}
    _, proj = quotient(F, members)
    reps = {}
    for x in range(F.order):
        reps.setdefault(int(proj[x]), x)
    total = 0
    for g in reps.values():
        psi = F.mul[F.mul[g, phi.map[glob]], F.inv[g]]
        total += reidemeister(sub, FiniteEndo([local[int(y)] for y in psi]))
    r = reidemeister(F, phi)
    index = F.order // len(members)
    return Fraction(total, index) <= r <= total


def extension_conjugacy_correspondence(H: FiniteGroupTable, phi: FiniteEndo, m: int) -> bool:
    """Compare conjugacy in H x|_phi Z/m with twisted conjugacy in H.

    Slice ``t^a`` of the extension is matched against the partition of H
    generated by twisted conjugacy for phi^-a (which is phi^(m-a), as phi^m
    is the identity) together with u ~ phi^k(u).  Classes never meet two
    different slices.
    """
    G = semidirect_extension(H, phi, m)
    n = H.order
    cls = conjugacy_classes(G).class_of
    for a in range(m):
        slice_cls = cls[a * n : (a + 1) * n]
        elsewhere = set(cls[: a * n]) | set(cls[(a + 1) * n :])
        if elsewhere & set(slice_cls):
            return False
        twist = phi.power((m - a) % m)
        tw = twisted_classes(H, twist).class_of
        ds = DisjointSet(range(n))
        for u in range(n):
            ds.merge(u, int(phi.map[u]))
            ds.merge(u, tw.index(tw[u]))
        expected = _partition_signature([ds[u] for u in range(n)])
        if expected != _partition_signature(slice_cls):
            return False
    return True


def _partition_signature(labels: Sequence) -> tuple[int, ...]:
    ids: dict = {}
    return tuple(ids.setdefault(x, len(ids)) for x in labels)


# --- subgroups, corpus ------------------------------------------------------


def normal_subgroups(F: FiniteGroupTable) -> list[tuple[int, ...]]:
    """Normal subgroups generated by at most two elements."""
    found = set()
    for a in range(F.order):
        for b in range(a, F.order):
            found.add(tuple(subgroup_generated(F, [a, b])))
    return sorted((s for s in found if is_normal(F, s)), key=lambda s: (len(s), s))


def corpus() -> dict[str, FiniteGroupTable]:
    groups = {f"Z/{n}": cyclic(n) for n in range(1, 17)}
    groups["S3"] = symmetric3()
    groups["D4"] = dihedral(4)
    groups["Q8"] = quaternion()
    groups["A4"] = alternating4()
    for n in (3, 5, 6):
        groups[f"D{n}"] = dihedral(n)
    groups["Z/2xZ/2"] = direct_product(cyclic(2), cyclic(2))
    groups["Z/2xZ/4"] = direct_product(cyclic(2), cyclic(4))
    for p in (2, 3, 5):
        groups[f"Heis({p})"] = heisenberg(p)
    z5 = cyclic(5)
    groups["F20"] = semidirect_extension(z5, FiniteEndo([(2 * x) % 5 for x in range(5)]), 4)
    z7 = cyclic(7)
    groups["F21"] = semidirect_extension(z7, FiniteEndo([(2 * x) % 7 for x in range(7)]), 3)
    return groups


def named_endos(F: FiniteGroupTable) -> dict[str, FiniteEndo]:
    """Identity, trivial and inner endomorphisms by generators, plus powers of
    an outer-looking generator swap when one extends."""
    out = {"id": F.identity_endo(), "trivial": F.trivial_endo()}
    for g in F.gens:
        out[f"inner:{g}"] = F.inner(g)
    if len(F.gens) >= 2:
        g0, g1 = F.gens[0], F.gens[1]
        for name, imgs in (("swap", [g1, g0]), ("swapinv", [F.inv[g1], F.inv[g0]])):
            phi = _extend(F, [g0, g1] + list(F.gens[2:]), imgs + list(F.gens[2:]))
            if phi is not None:
                out[name] = phi
    if F.is_abelian():
        for k in range(2, min(F.order, 6)):
            out[f"pow:{k}"] = FiniteEndo([F.power(x, k) for x in range(F.order)])
    return out


def corpus_pairs(limit: int = 12) -> list[tuple[str, FiniteGroupTable, str, FiniteEndo]]:
    """Every (group, endomorphism) test pair: all endomorphisms of groups of
    order <= limit, named fixtures for the larger ones."""
    pairs = []
    for name, F in corpus().items():
        if F.order <= limit:
            for i, phi in enumerate(endomorphisms(F, limit)):
                pairs.append((name, F, f"endo#{i}", phi))
        else:
            for ename, phi in named_endos(F).items():
                pairs.append((name, F, ename, phi))
    return pairs


def random_summation_triples(count: int, seed: int = 0, max_order: int = 27):
    """Random (F, N, phi) with N normal and phi(N) <= N."""
    rng = random.Random(seed)
    pool = []
    for name, F in corpus().items():
        if F.order > max_order:
            continue
        endos = endomorphisms(F) if F.order <= 12 else list(named_endos(F).values())
        subs = normal_subgroups(F)
        for phi in endos:
            for N in subs:
                if set(phi.map[list(N)].tolist()) <= set(N):
                    pool.append((name, F, N, phi))
    return [rng.choice(pool) for _ in range(count)]


# --- text formats -----------------------------------------------------------


def dump_cayley(F: FiniteGroupTable) -> str:
    lines = [str(F.order)]
    lines += [" ".join(str(int(v)) for v in row) for row in F.mul]
    return "\n".join(lines) + "\n"


def load_cayley(text: str, name: str = "F") -> FiniteGroupTable:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InvalidGroup("empty Cayley table")
    try:
        n = int(rows[0][0])
        mul = np.array([[int(v) for v in r] for r in rows[1:]], dtype=np.int64)
    except ValueError as exc:
        raise InvalidGroup(f"non-integer entry: {exc}") from None
    if mul.shape != (n, n):
        raise InvalidGroup(f"expected {n} rows of {n} entries, got shape {mul.shape}")
    ident = [i for i in range(n) if np.array_equal(mul[i], np.arange(n))]
    if not ident:
        raise InvalidGroup("no identity element")
    inv = np.empty(n, dtype=np.int64)
    rows_, cols = np.nonzero(mul == ident[0])
    if len(rows_) != n:
        raise InvalidGroup("not every element has a unique inverse")
    inv[rows_] = cols
    return FiniteGroupTable(mul, inv, ident[0], None, None, name)


def dump_endo(phi: FiniteEndo) -> str:
    return " ".join(str(int(v)) for v in phi.map) + "\n"


def load_endo(text: str) -> FiniteEndo:
    vals = [int(v) for ln in text.splitlines() if not ln.lstrip().startswith("#") for v in ln.split()]
    return FiniteEndo(vals)
