"""Split virtually abelian groups G = Z^r x| Q and their endomorphisms.

Elements are pairs (q, v) with q an index into the finite table Q and v an
integer vector.  The product is

    (q1, v1)(q2, v2) = (q1 q2, C_{q2}^-1 v1 + v2)

so conjugating a translation (e, a) by (q, 0) gives (e, C_q a).  An
endomorphism is (M, qmap, shift) acting by

    phi(q, v) = (qmap(q), shift(q) + M v).
"""
from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple, Sequence

from . import finite_groups as fg
from . import intlinalg as il
from .intlinalg import Matrix, Sublattice, Vector

QUOTIENT_CAP = 4096


class InvalidVAGroup(ValueError):
    pass


class VAParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class VAElement(NamedTuple):
    q: int
    v: Vector


class VAGroup:
    def __init__(
        self,
        r: int,
        Q: fg.FiniteGroupTable,
        action: Sequence[Sequence[Sequence[int]]],
        generators: Sequence[VAElement],
        name: str = "G",
    ):
        self.r = r
        self.Q = Q
        self.name = name
        self.action: tuple[Matrix, ...] = tuple(il.as_matrix(c) for c in action)
        self.generators = [VAElement(int(q), tuple(int(x) for x in v)) for q, v in generators]
        self._validate()

    @property
    def m(self) -> int:
        return self.Q.order

    def representatives(self) -> list[int]:
        """Coset representatives of G/A as Q indices, identity first."""
        return [self.Q.id] + [q for q in range(self.m) if q != self.Q.id]

    def C(self, q: int) -> Matrix:
        return self.action[q]

    def C_inv(self, q: int) -> Matrix:
        return self._inv_action[q]

    def _validate(self) -> None:
        Q, r = self.Q, self.r
        if len(self.action) != Q.order:
            raise InvalidVAGroup(f"need {Q.order} action matrices, got {len(self.action)}")
        for q, c in enumerate(self.action):
            if len(c) != r or any(len(row) != r for row in c):
                raise InvalidVAGroup(f"C_{q} is not {r}x{r}")
        if self.action[Q.id] != il.identity(r):
            raise InvalidVAGroup("C_id is not the identity matrix")
        for a in range(Q.order):
            for b in range(Q.order):
                if self.action[int(Q.mul[a, b])] != il.matmul(self.action[a], self.action[b]):
                    raise InvalidVAGroup(f"action is not a homomorphism at ({a}, {b})")
        self._inv_action = tuple(self.action[int(Q.inv[q])] for q in range(Q.order))
        for g in self.generators:
            if not 0 <= g.q < Q.order or len(g.v) != r:
                raise InvalidVAGroup(f"malformed generator {g}")
        self._check_generation()

    def _check_generation(self) -> None:
        # Q-parts must generate Q; Schreier generators must span Z^r
        gens = self.generators + [invert(self, g) for g in self.generators]
        rep = {self.Q.id: VAElement(self.Q.id, (0,) * self.r)}
        queue = deque([self.Q.id])
        while queue:
            q = queue.popleft()
            for g in gens:
                p = int(self.Q.mul[q, g.q])
                if p not in rep:
                    rep[p] = multiply(self, rep[q], g)
                    queue.append(p)
        if len(rep) != self.Q.order:
            raise InvalidVAGroup("generators do not map onto Q")
        schreier = []
        for q, t in rep.items():
            for g in gens:
                a = multiply(self, multiply(self, t, g), invert(self, rep[int(self.Q.mul[q, g.q])]))
                schreier.append(a.v)
        if Sublattice(schreier, self.r).index() != 1:
            raise InvalidVAGroup("generators do not generate the translation lattice")

    def element(self, q: int, v: Sequence[int]) -> VAElement:
        return VAElement(q, tuple(int(x) for x in v))

    def __repr__(self) -> str:
        return f"VAGroup({self.name}, r={self.r}, m={self.m})"


class VAEndo:
    def __init__(self, M: Sequence[Sequence[int]], qmap: fg.FiniteEndo | Sequence[int], shift=None, name: str = "phi"):
        self.M = il.as_matrix(M)
        self.qmap = qmap if isinstance(qmap, fg.FiniteEndo) else fg.FiniteEndo(list(qmap))
        r = len(self.M)
        m = len(self.qmap.map)
        if shift is None:
            shift = {}
        if isinstance(shift, dict):
            self.shift = tuple(tuple(int(x) for x in shift.get(q, (0,) * r)) for q in range(m))
        else:
            self.shift = tuple(tuple(int(x) for x in s) for s in shift)
        self.name = name

    @classmethod
    def identity(cls, G: VAGroup) -> "VAEndo":
        return cls(il.identity(G.r), G.Q.identity_endo(), name="id")

    def __repr__(self) -> str:
        return f"VAEndo({self.name}, M={self.M})"


def validate_endo(G: VAGroup, phi: VAEndo) -> None:
    Q = G.Q
    if len(phi.M) != G.r or any(len(row) != G.r for row in phi.M):
        raise fg.InvalidEndomorphism(f"M must be {G.r}x{G.r}")
    fg.validate_endo(Q, phi.qmap)
    if len(phi.shift) != Q.order or any(len(s) != G.r for s in phi.shift):
        raise fg.InvalidEndomorphism("shift must give one vector per element of Q")
    qm = phi.qmap.map
    for q in range(Q.order):
        if il.matmul(G.C(int(qm[q])), phi.M) != il.matmul(phi.M, G.C(q)):
            raise fg.InvalidEndomorphism(f"C_qmap(q) M != M C_q at q={q}")
    for a in range(Q.order):
        for b in range(Q.order):
            lhs = phi.shift[int(Q.mul[a, b])]
            rhs = _add(il.matvec(G.C_inv(int(qm[b])), phi.shift[a]), phi.shift[b])
            if lhs != rhs:
                raise fg.InvalidEndomorphism(f"shift is not a cocycle at ({a}, {b})")


def _add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def multiply(G: VAGroup, x: VAElement, y: VAElement) -> VAElement:
    return VAElement(int(G.Q.mul[x.q, y.q]), _add(il.matvec(G.C_inv(y.q), x.v), y.v))


def invert(G: VAGroup, x: VAElement) -> VAElement:
    return VAElement(int(G.Q.inv[x.q]), tuple(-c for c in il.matvec(G.C(x.q), x.v)))


def apply_endo(G: VAGroup, phi: VAEndo, x: VAElement) -> VAElement:
    return VAElement(int(phi.qmap.map[x.q]), _add(phi.shift[x.q], il.matvec(phi.M, x.v)))


def identity(G: VAGroup) -> VAElement:
    return VAElement(G.Q.id, (0,) * G.r)


# --- criteria and bounds ------------------------------------------------------


def _twist_matrices(G: VAGroup, phi: VAEndo) -> list[tuple[int, Matrix]]:
    return [(q, il.matmul(G.C(q), phi.M)) for q in G.representatives()]


def tdc_positive_criterion(G: VAGroup, phi: VAEndo) -> tuple[bool, int | None]:
    """Whether C_q M = I for some q; returns (verdict, first witness q)."""
    ident = il.identity(G.r)
    for q, cm in _twist_matrices(G, phi):
        if cm == ident:
            return True, q
    return False, None


def fix_rank(M: Sequence[Sequence[int]]) -> int:
    M = il.as_matrix(M)
    return len(M) - il.rank(il.sub(M, il.identity(len(M))))


def primes_upto(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, f in enumerate(sieve) if f]


def prime_set_P(G: VAGroup, phi: VAEndo, bound: int) -> list[int]:
    """Primes p <= bound with C_q M != I mod p for every q."""
    ident = il.identity(G.r)
    twists = [il.sub(cm, ident) for _, cm in _twist_matrices(G, phi)]
    return [p for p in primes_upto(bound) if all(any(x % p for row in d for x in row) for d in twists)]


def quotient_mod_p(G: VAGroup, phi: VAEndo, p: int, cap: int = QUOTIENT_CAP) -> tuple[fg.FiniteGroupTable, fg.FiniteEndo]:
    """G / A^p as a Cayley table with the induced endomorphism."""
    size = G.m * p**G.r
    if size > cap:
        raise ValueError(f"quotient of order {size} exceeds cap {cap}")
    elements = [
        (q, v) for q in range(G.m) for v in itertools.product(range(p), repeat=G.r)
    ]

    def red(x: VAElement):
        return (x.q, tuple(c % p for c in x.v))

    def op(a, b):
        return red(multiply(G, VAElement(*a), VAElement(*b)))

    gens = list(dict.fromkeys(red(g) for g in G.generators))
    F = fg.from_elements(elements, op, red(identity(G)), gens, name=f"{G.name}/A^{p}")
    index = {e: i for i, e in enumerate(elements)}
    phibar = fg.FiniteEndo([index[red(apply_endo(G, phi, VAElement(*e)))] for e in elements])
    fg.validate_endo(F, phibar)
    return F, phibar


def dl_exponent(G: VAGroup, phi: VAEndo) -> int:
    ident = il.identity(G.r)
    return G.r - min(il.rank(il.sub(ident, cm)) for _, cm in _twist_matrices(G, phi))


def tcr_lower_bound(G: VAGroup, phi: VAEndo) -> Fraction:
    ident = il.identity(G.r)
    k = sum(1 for _, cm in _twist_matrices(G, phi) if cm == ident)
    return Fraction(k, G.m**2)


# --- exact twisted classes ----------------------------------------------------


class TwistedClassKey:
    """Exact invariant of phi-twisted classes in G.

    Translations move the slice over q by L_q = (C_q^-1 - M) Z^r, so the
    A-orbit of (q, v) is (q, v + L_q); the full class is the union of the
    images of that orbit under z -> s_p z phi(s_p)^-1 for s_p = (p, 0).
    """

    def __init__(self, G: VAGroup, phi: VAEndo):
        validate_endo(G, phi)
        self.G = G
        self.phi = phi
        self.lattices = [Sublattice.image_of(il.sub(G.C_inv(q), phi.M)) for q in range(G.m)]
        zero = (0,) * G.r
        self._moves = []
        for p in range(G.m):
            s = VAElement(p, zero)
            self._moves.append((s, invert(G, apply_endo(G, phi, s))))

    def orbit_rep(self, x: VAElement) -> tuple:
        return (x.q, self.lattices[x.q].reduce(x.v))

    def __call__(self, x: VAElement) -> tuple:
        G = self.G
        return min(self.orbit_rep(multiply(G, multiply(G, s, x), t)) for s, t in self._moves)


class VAOracle:
    """GroupOracle for a VAGroup over its declared generators."""

    def __init__(self, G: VAGroup, gens_id: str = "declared"):
        self.G = G
        self.name = G.name
        self.gens_id = gens_id
        gens = list(G.generators) + [invert(G, g) for g in G.generators]
        self._gens = list(dict.fromkeys(gens))
        self._keys: dict[int, TwistedClassKey] = {}

    def identity(self):
        return identity(self.G)

    def multiply(self, x, y):
        return multiply(self.G, x, y)

    def invert(self, x):
        return invert(self.G, x)

    def apply_endo(self, phi: VAEndo, x):
        return apply_endo(self.G, phi, x)

    def generators(self):
        return list(self._gens)

    def canonical_key(self, x):
        return x

    def class_key(self, phi: VAEndo, x):
        k = self._keys.get(id(phi))
        if k is None:
            k = self._keys[id(phi)] = TwistedClassKey(self.G, phi)
        return k(x)

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_keys"] = {}
        return state


# --- pure lattices ------------------------------------------------------------


def _sphere(r: int, k: int, norm: str):
    """Integer points of Z^r with norm exactly k."""
    if norm == "l1":
        yield from _l1_sphere(r, k)
    elif norm == "linf":
        if k == 0:
            yield (0,) * r
            return
        for pt in itertools.product(range(-k, k + 1), repeat=r):
            if max(abs(c) for c in pt) == k:
                yield pt
    else:
        raise ValueError(f"norm must be 'l1' or 'linf', got {norm!r}")


def _l1_sphere(r: int, k: int):
    if r == 1:
        yield (k,)
        if k:
            yield (-k,)
        return
    for first in range(-k, k + 1):
        for rest in _l1_sphere(r - 1, k - abs(first)):
            yield (first,) + rest


def lattice_class_counts(M: Sequence[Sequence[int]], n_max: int, norm: str = "l1") -> list[int]:
    """Cosets of (I - M) Z^r meeting the norm ball of radius n, for n = 0..n_max."""
    M = il.as_matrix(M)
    r = len(M)
    L = Sublattice.image_of(il.sub(il.identity(r), M))
    total = L.index()
    seen: set = set()
    out = []
    for n in range(n_max + 1):
        if total is None or len(seen) < total:
            for pt in _sphere(r, n, norm):
                seen.add(L.reduce(pt))
                if total is not None and len(seen) == total:
                    break
        out.append(len(seen))
    return out


def lattice_twisted_class_count(r: int, M: Sequence[Sequence[int]], n: int, norm: str = "l1") -> int:
    M = il.as_matrix(M)
    if len(M) != r:
        raise ValueError(f"M must be {r}x{r}")
    return lattice_class_counts(M, n, norm)[-1]


# --- fixtures -----------------------------------------------------------------


def d_infinity() -> VAGroup:
    """Z x| Z/2 with the reflection acting by -1; generated by two reflections."""
    return VAGroup(1, fg.cyclic(2), [[[1]], [[-1]]], [VAElement(1, (0,)), VAElement(1, (1,))], name="Dinf")


def integers() -> VAGroup:
    return VAGroup(1, fg.cyclic(1), [[[1]]], [VAElement(0, (1,))], name="Z")


def lattice(r: int) -> VAGroup:
    gens = [VAElement(0, tuple(int(i == j) for j in range(r))) for i in range(r)]
    return VAGroup(r, fg.cyclic(1), [il.identity(r)], gens, name=f"Z^{r}")


def scalar_endo(G: VAGroup, k: int) -> VAEndo:
    return VAEndo([[k * int(i == j) for j in range(G.r)] for i in range(G.r)], G.Q.identity_endo(), name=f"x{k}")


def conjugation_endo(G: VAGroup, g: VAElement) -> VAEndo:
    """Inner automorphism x -> g x g^-1, written as (M, qmap, shift)."""
    Q = G.Q
    M = G.C(g.q)
    qmap = Q.inner(g.q)
    zero = (0,) * G.r
    shift = []
    for q in range(Q.order):
        img = multiply(G, multiply(G, g, VAElement(q, zero)), invert(G, g))
        shift.append(img.v)
    phi = VAEndo(M, qmap, shift, name=f"inner:{g.q},{','.join(map(str, g.v))}")
    validate_endo(G, phi)
    return phi


def fixtures() -> dict[str, tuple[VAGroup, VAEndo]]:
    """Named (group, endomorphism) pairs used by tests and demos."""
    D = d_infinity()
    Z = integers()
    Z2 = lattice(2)
    out = {
        "Dinf/id": (D, VAEndo.identity(D)),
        "Dinf/inner_t": (D, conjugation_endo(D, VAElement(1, (0,)))),
        "Dinf/x2": (D, scalar_endo(D, 2)),
        "Z/id": (Z, VAEndo.identity(Z)),
        "Z/x2": (Z, scalar_endo(Z, 2)),
        "Z/x4": (Z, scalar_endo(Z, 4)),
        "Z/neg": (Z, scalar_endo(Z, -1)),
        "Z2/swap": (Z2, VAEndo([[0, 1], [1, 0]], Z2.Q.identity_endo(), name="swap")),
    }
    for G, phi in out.values():
        validate_endo(G, phi)
    return out


# --- declarative text format --------------------------------------------------
#
#   rank 1
#   quotient cyclic 2          (or: quotient S3 / quotient file path.cayley)
#   action 1 : -1              (C_q row-major; identity is implicit)
#   gen 1 : 0
#   gen 1 : 1
#   endo id                    (any number of endo blocks)
#   M 1
#   qmap 0 1                   (optional, defaults to identity)
#   shift 1 : 0                (optional, defaults to zero)


def _ints(tokens: Sequence[str], line: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise VAParseError(line, f"expected integers, got {' '.join(tokens)!r}") from None


def _split_colon(rest: str, line: int) -> tuple[int, list[int]]:
    if ":" not in rest:
        raise VAParseError(line, "expected 'q : entries'")
    head, tail = rest.split(":", 1)
    q = _ints(head.split(), line)
    if len(q) != 1:
        raise VAParseError(line, "expected a single element index before ':'")
    return q[0], _ints(tail.split(), line)


def _quotient_table(args: list[str], line: int, base: Path | None) -> fg.FiniteGroupTable:
    if not args:
        raise VAParseError(line, "quotient needs an argument")
    if args[0] == "cyclic":
        if len(args) != 2:
            raise VAParseError(line, "usage: quotient cyclic N")
        n = _ints(args[1:], line)[0]
        if n < 1:
            raise VAParseError(line, "cyclic order must be positive")
        return fg.cyclic(n)
    if args[0] == "file":
        if len(args) != 2:
            raise VAParseError(line, "usage: quotient file PATH")
        path = Path(args[1])
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return fg.load_cayley(path.read_text(), name=path.stem)
        except OSError as exc:
            raise VAParseError(line, f"cannot read {path}: {exc.strerror}") from None
        except fg.InvalidGroup as exc:
            raise VAParseError(line, f"bad Cayley table {path}: {exc}") from None
    corpus = fg.corpus()
    if args[0] in corpus:
        return corpus[args[0]]
    raise VAParseError(line, f"unknown quotient {args[0]!r}")


def _close_action(Q: fg.FiniteGroupTable, given: dict[int, Matrix], r: int, line: int) -> list[Matrix]:
    act: dict[int, Matrix] = {Q.id: il.identity(r)}
    queue = deque([Q.id])
    while queue:
        a = queue.popleft()
        for g, cg in given.items():
            b = int(Q.mul[a, g])
            c = il.matmul(act[a], cg)
            if b not in act:
                act[b] = c
                queue.append(b)
            elif act[b] != c:
                raise VAParseError(line, f"action is not a homomorphism (conflict at element {b})")
    for q, c in given.items():
        if act[q] != c:
            raise VAParseError(line, f"action is not a homomorphism (conflict at element {q})")
    missing = [q for q in range(Q.order) if q not in act]
    if missing:
        raise VAParseError(line, f"action does not determine C_q for q in {missing}")
    return [act[q] for q in range(Q.order)]


def parse_vagroup(text: str, base: Path | None = None, name: str = "G") -> tuple[VAGroup, dict[str, VAEndo]]:
    r = None
    Q = None
    action: dict[int, Matrix] = {}
    gens: list[VAElement] = []
    endos: list[dict] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        last = lineno
        key, _, rest = ln.partition(" ")
        rest = rest.strip()
        if key == "name":
            name = rest
        elif key == "rank":
            vals = _ints(rest.split(), lineno)
            if len(vals) != 1 or vals[0] < 1:
                raise VAParseError(lineno, "rank must be one positive integer")
            r = vals[0]
        elif key == "quotient":
            Q = _quotient_table(rest.split(), lineno, base)
        elif key in ("action", "gen", "shift"):
            if r is None or Q is None:
                raise VAParseError(lineno, f"'{key}' before 'rank' and 'quotient'")
            q, vals = _split_colon(rest, lineno)
            if not 0 <= q < Q.order:
                raise VAParseError(lineno, f"element index {q} out of range 0..{Q.order - 1}")
            if key == "action":
                if len(vals) != r * r:
                    raise VAParseError(lineno, f"action needs {r * r} entries, got {len(vals)}")
                action[q] = il.as_matrix([vals[i * r : (i + 1) * r] for i in range(r)])
            elif key == "gen":
                if len(vals) != r:
                    raise VAParseError(lineno, f"generator needs {r} entries, got {len(vals)}")
                gens.append(VAElement(q, tuple(vals)))
            else:
                if not endos:
                    raise VAParseError(lineno, "'shift' outside an endo block")
                if len(vals) != r:
                    raise VAParseError(lineno, f"shift needs {r} entries, got {len(vals)}")
                endos[-1]["shift"][q] = tuple(vals)
        elif key == "endo":
            if not rest:
                raise VAParseError(lineno, "endo needs a name")
            endos.append({"name": rest, "M": None, "qmap": None, "shift": {}, "line": lineno})
        elif key == "M":
            if not endos or r is None:
                raise VAParseError(lineno, "'M' outside an endo block")
            vals = _ints(rest.split(), lineno)
            if len(vals) != r * r:
                raise VAParseError(lineno, f"M needs {r * r} entries, got {len(vals)}")
            endos[-1]["M"] = [vals[i * r : (i + 1) * r] for i in range(r)]
        elif key == "qmap":
            if not endos or Q is None:
                raise VAParseError(lineno, "'qmap' outside an endo block")
            vals = _ints(rest.split(), lineno)
            if len(vals) != Q.order:
                raise VAParseError(lineno, f"qmap needs {Q.order} entries, got {len(vals)}")
            endos[-1]["qmap"] = vals
        else:
            raise VAParseError(lineno, f"unknown key {key!r}")
    if r is None or Q is None:
        raise VAParseError(last, "missing 'rank' or 'quotient'")
    if not gens:
        raise VAParseError(last, "no generators declared")
    full_action = _close_action(Q, action, r, last)
    try:
        G = VAGroup(r, Q, full_action, gens, name=name)
    except InvalidVAGroup as exc:
        raise VAParseError(last, str(exc)) from None
    out = {}
    for e in endos:
        if e["M"] is None:
            raise VAParseError(e["line"], f"endo {e['name']} has no M")
        qmap = e["qmap"] if e["qmap"] is not None else list(range(Q.order))
        phi = VAEndo(e["M"], qmap, e["shift"], name=e["name"])
        try:
            validate_endo(G, phi)
        except fg.InvalidEndomorphism as exc:
            raise VAParseError(e["line"], f"endo {e['name']}: {exc}") from None
        out[e["name"]] = phi
    return G, out


def load_vagroup(path: str | Path) -> tuple[VAGroup, dict[str, VAEndo]]:
    path = Path(path)
    return parse_vagroup(path.read_text(), base=path.parent, name=path.stem)


def dump_vagroup(G: VAGroup, endos: dict[str, VAEndo] | None = None) -> str:
    lines = [f"name {G.name}", f"rank {G.r}"]
    if G.Q.order == 1 or G.Q.name.startswith("Z/"):
        lines.append(f"quotient cyclic {G.Q.order}")
    else:
        lines.append(f"quotient {G.Q.name}")
    for q in range(G.m):
        if q != G.Q.id:
            lines.append(f"action {q} : " + " ".join(str(x) for row in G.C(q) for x in row))
    for g in G.generators:
        lines.append(f"gen {g.q} : " + " ".join(map(str, g.v)))
    for name, phi in (endos or {}).items():
        lines.append(f"endo {name}")
        lines.append("M " + " ".join(str(x) for row in phi.M for x in row))
        lines.append("qmap " + " ".join(str(int(x)) for x in phi.qmap.map))
        for q, s in enumerate(phi.shift):
            if any(s):
                lines.append(f"shift {q} : " + " ".join(map(str, s)))
    return "\n".join(lines) + "\n"
