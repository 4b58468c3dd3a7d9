import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as hs

from twistcon import density as dn
from twistcon import finite_groups as fg
from twistcon import intlinalg as il
from twistcon import virtually_abelian as va
from twistcon.virtually_abelian import VAElement as E

from conftest import FIXTURES
from oracles import lattice_union_find

FX = va.fixtures()
small = hs.integers(-4, 4)
mat2 = hs.lists(hs.lists(small, min_size=2, max_size=2), min_size=2, max_size=2)
mat3 = hs.lists(hs.lists(small, min_size=3, max_size=3), min_size=3, max_size=3)


# --- integer linear algebra -----------------------------------------------------


@given(hs.one_of(mat2, mat3))
def test_rank_matches_sympy(m):
    assert il.rank(m) == sympy.Matrix(m).rank()


@given(hs.one_of(mat2, mat3))
def test_fix_rank_matches_sympy_kernel(m):
    M = sympy.Matrix(m)
    assert va.fix_rank(m) == len((M - sympy.eye(M.rows)).nullspace())


@given(hs.one_of(mat2, mat3))
def test_fix_rank_below_r_unless_identity(m):
    r = len(m)
    if il.as_matrix(m) != il.identity(r):
        assert va.fix_rank(m) < r
    else:
        assert va.fix_rank(m) == r


@given(mat2, hs.lists(small, min_size=2, max_size=2), hs.lists(small, min_size=2, max_size=2))
def test_sublattice_reduce_is_canonical(m, v, coeffs):
    L = il.Sublattice.image_of(il.as_matrix(m))
    lattice_vec = il.matvec(il.as_matrix(m), coeffs)
    shifted = tuple(a + b for a, b in zip(v, lattice_vec))
    assert L.reduce(v) == L.reduce(shifted)
    assert L.contains(tuple(a - b for a, b in zip(v, L.reduce(v))))


@given(mat2)
def test_sublattice_index_is_abs_det(m):
    d = abs(int(round(np.linalg.det(np.array(m)))))
    L = il.Sublattice.image_of(il.as_matrix(m))
    assert L.index() == (d if d else None)


# --- group arithmetic -----------------------------------------------------------------


def test_dinf_reflection_squares_to_identity():
    G = va.d_infinity()
    t = E(1, (0,))
    assert va.multiply(G, t, t) == va.identity(G)
    assert va.multiply(G, E(0, (2,)), E(0, (3,))) == E(0, (5,))


def test_doubling_endo():
    G = va.integers()
    phi = va.scalar_endo(G, 2)
    assert va.apply_endo(G, phi, E(0, (3,))) == E(0, (6,))


def _random_element(G, rng):
    return E(rng.randrange(G.m), tuple(rng.randint(-9, 9) for _ in range(G.r)))


@pytest.mark.parametrize("key", sorted(FX))
def test_homomorphism_on_random_pairs(key):
    G, phi = FX[key]
    rng = random.Random(key)
    for _ in range(1000):
        x, y = _random_element(G, rng), _random_element(G, rng)
        lhs = va.apply_endo(G, phi, va.multiply(G, x, y))
        rhs = va.multiply(G, va.apply_endo(G, phi, x), va.apply_endo(G, phi, y))
        assert lhs == rhs
        assert va.multiply(G, x, va.invert(G, x)) == va.identity(G)


def test_group_axioms_on_rotation_fixture():
    G, _ = va.load_vagroup(FIXTURES / "p4m_like.vab")
    rng = random.Random(3)
    for _ in range(300):
        x, y, z = (_random_element(G, rng) for _ in range(3))
        assert va.multiply(G, va.multiply(G, x, y), z) == va.multiply(G, x, va.multiply(G, y, z))


def test_invalid_action_rejected():
    with pytest.raises(va.InvalidVAGroup):
        va.VAGroup(1, fg.cyclic(2), [[[1]], [[2]]], [E(1, (0,)), E(0, (1,))])
    with pytest.raises(va.InvalidVAGroup):
        va.VAGroup(1, fg.cyclic(2), [[[1]], [[-1]]], [E(1, (0,)), E(1, (2,))])  # index-2 lattice
    with pytest.raises(va.InvalidVAGroup):
        va.VAGroup(1, fg.cyclic(2), [[[1]], [[-1]]], [E(0, (1,))])  # misses Q


def test_incompatible_endo_rejected():
    G = va.d_infinity()
    with pytest.raises(fg.InvalidEndomorphism):
        va.validate_endo(G, va.VAEndo([[1]], [0, 1], {0: (1,)}))  # shift nonzero at identity
    H = va.lattice(2)
    Z4 = fg.cyclic(4)
    rot = va.VAGroup(2, Z4, [il.identity(2), ((0, -1), (1, 0)), ((-1, 0), (0, -1)), ((0, 1), (-1, 0))],
                     [E(1, (0, 0)), E(0, (1, 0))])
    with pytest.raises(fg.InvalidEndomorphism):
        va.validate_endo(rot, va.VAEndo([[1, 0], [0, 2]], Z4.identity_endo()))
    assert H.m == 1


# --- criteria ---------------------------------------------------------------------------


def test_criterion_examples():
    assert va.tdc_positive_criterion(*FX["Dinf/id"]) == (True, 0)
    assert va.tdc_positive_criterion(*FX["Z/x2"]) == (False, None)
    assert va.tdc_positive_criterion(*FX["Dinf/inner_t"]) == (True, 1)


def test_fix_rank_examples():
    assert va.fix_rank([[1, 0], [0, 1]]) == 2
    assert va.fix_rank([[-1]]) == 0
    assert va.fix_rank([[0, 1], [1, 0]]) == 1


def test_prime_set_examples():
    primes = va.primes_upto(20)
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19]
    assert va.prime_set_P(*FX["Z/x2"], 20) == primes
    assert va.prime_set_P(*FX["Z/x4"], 20) == [p for p in primes if p != 3]
    assert va.prime_set_P(*FX["Dinf/id"], 20) == []


def test_quotient_examples():
    for p in (5, 7):
        F, pb = va.quotient_mod_p(*FX["Z/x2"], p)
        assert F.order == p and fg.tdc_finite(F, pb) == Fraction(1, p)
    F, pb = va.quotient_mod_p(*FX["Dinf/id"], 3)
    assert F.order == 6 and not F.is_abelian()
    assert fg.tdc_finite(F, pb) == Fraction(1, 2)
    with pytest.raises(ValueError):
        va.quotient_mod_p(*FX["Z2/swap"], 101)


@pytest.mark.parametrize("key", [k for k in sorted(FX) if not va.tdc_positive_criterion(*FX[k])[0]])
def test_first_five_primes_of_P_bound_quotient_tdc(key):
    G, phi = FX[key]
    P = va.prime_set_P(G, phi, 60)[:5]
    assert len(P) == 5
    for p in P:
        if G.m * p**G.r > va.QUOTIENT_CAP:
            continue
        F, pb = va.quotient_mod_p(G, phi, p)
        assert fg.tdc_finite(F, pb) <= Fraction(1, p)


def test_dl_exponent_examples():
    assert va.dl_exponent(*FX["Z2/swap"]) == 1
    assert va.dl_exponent(*FX["Dinf/id"]) == 1
    assert va.dl_exponent(*FX["Z/x2"]) == 0


def test_tcr_lower_bound_examples():
    assert va.tcr_lower_bound(*FX["Dinf/id"]) == Fraction(1, 4)
    assert va.tcr_lower_bound(va.lattice(3), va.VAEndo.identity(va.lattice(3))) == 1
    # only the reflection coset satisfies C_q M = I for the inner twist
    assert va.tcr_lower_bound(*FX["Dinf/inner_t"]) == Fraction(1, 4)


def test_lattice_count_examples():
    assert va.lattice_twisted_class_count(1, [[-1]], 3) == 2
    assert va.lattice_twisted_class_count(1, [[1]], 3) == 7
    assert va.lattice_twisted_class_count(2, [[0, 1], [1, 0]], 2) == 5


@pytest.mark.parametrize("M", [[[-1]], [[2]], [[3]], [[0, 1], [1, 0]], [[2, 1], [1, 1]], [[0, -1], [1, 0]], [[1, 1], [0, 1]]])
def test_lattice_count_matches_union_find(M):
    counts = va.lattice_class_counts(M, 6 if len(M) == 1 else 4)
    for n, c in enumerate(counts):
        assert c == lattice_union_find(M, n)


def test_lattice_linf_norm():
    # l-infinity ball of radius 1 in Z^2 hits sums -2..2
    assert va.lattice_class_counts([[0, 1], [1, 0]], 1, "linf") == [1, 5]


def test_lattice_growth_matches_dl_exponent():
    counts = va.lattice_class_counts([[0, 1], [1, 0]], 400)
    ns = list(range(100, 401, 25))
    slope = np.polyfit(np.log(ns), np.log([counts[n] for n in ns]), 1)[0]
    assert abs(slope - va.dl_exponent(*FX["Z2/swap"])) <= 0.15


# --- exact class key ---------------------------------------------------------------------


@pytest.mark.parametrize("key", sorted(FX))
def test_class_key_agrees_with_union_find(key):
    G, phi = FX[key]
    o = va.VAOracle(G)
    n = 5 if G.r == 1 else 3
    exact = dn.tcr_series(o, phi, n)
    approx = dn.tcr_series(o, phi, n, lambda r: 3 * r + 2, exact=False)
    assert [e.numerator for e in exact.entries] == [e.numerator for e in approx.entries]


@pytest.mark.parametrize("key", sorted(FX))
def test_class_key_invariant_under_twisted_moves(key):
    G, phi = FX[key]
    K = va.TwistedClassKey(G, phi)
    rng = random.Random(5)
    for _ in range(200):
        x, z = _random_element(G, rng), _random_element(G, rng)
        y = va.multiply(G, va.multiply(G, z, x), va.invert(G, va.apply_endo(G, phi, z)))
        assert K(x) == K(y)


# --- density-level properties ------------------------------------------------------------


def test_positive_criterion_series_bounded_below():
    for key in ("Dinf/id", "Dinf/inner_t", "Z/id"):
        G, phi = FX[key]
        s = dn.tdc_series(va.VAOracle(G), phi, 60, strategies=("pairs",))
        assert all(e.ratio >= Fraction(1, 2 * G.m**2) for e in s.entries if e.n >= 10)


@pytest.mark.parametrize("key", ["Z/x2", "Z/x4", "Z/neg"])
def test_decay_when_criterion_false(key):
    G, phi = FX[key]
    s = dn.tdc_series(va.VAOracle(G), phi, 200, strategies=("pairs",))
    for n in (50, 100):
        assert s[2 * n].ratio <= Fraction(7, 10) * s[n].ratio


@pytest.mark.parametrize("key", sorted(FX))
def test_estimate_below_quotient_tdc(key):
    G, phi = FX[key]
    n = 40 if G.r == 1 else 8
    est = dn.tdc_series(va.VAOracle(G), phi, n, strategies=("pairs",)).last().ratio
    for p in (2, 3, 5):
        if G.m * p**G.r > 200:
            continue
        F, pb = va.quotient_mod_p(G, phi, p)
        assert float(est) <= float(fg.tdc_finite(F, pb)) + 0.02


def test_coset_density_of_3z_in_dinf():
    G = va.d_infinity()
    ball = dn.build_ball(va.VAOracle(G), 1000)
    counts = {}
    for x in ball.elements:
        key = (x.q, x.v[0] % 3)
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / len(ball.elements) - 1 / 6) <= 0.01


# --- text format --------------------------------------------------------------------------


def test_load_fixture_files():
    G, endos = va.load_vagroup(FIXTURES / "dinf.vab")
    assert G.r == 1 and G.m == 2
    assert set(endos) == {"id", "inner_t", "double"}
    assert va.tdc_positive_criterion(G, endos["inner_t"]) == (True, 1)
    H, e2 = va.load_vagroup(FIXTURES / "z2_swap.vab")
    assert va.dl_exponent(H, e2["swap"]) == 1


def test_dump_parse_roundtrip():
    G, endos = va.load_vagroup(FIXTURES / "p4m_like.vab")
    H, e2 = va.parse_vagroup(va.dump_vagroup(G, endos))
    assert H.action == G.action and H.generators == G.generators
    assert {k: v.M for k, v in e2.items()} == {k: v.M for k, v in endos.items()}


@pytest.mark.parametrize(
    "text,line",
    [
        ("rank 1\nquotient cyclic 2\naction 1 : 2\ngen 1 : 0\ngen 0 : 1\n", 5),
        ("rank 1\nquotient cyclic 2\naction 1 : -1 0\n", 3),
        ("rank 1\nquotient cyclic 2\naction 1 : -1\ngen 1 : 0\ngen 1 : 1\nendo bad\nM 1\nshift 0 : 1\n", 6),
        ("rank x\n", 1),
        ("rank 1\nfrobnicate 2\n", 2),
        ("gen 0 : 1\n", 1),
        ("rank 1\nquotient cyclic 2\naction 1 : -1\ngen 1 : 0\ngen 1 : 1\nendo e\nqmap 0 1\n", 6),
    ],
)
def test_parse_errors_are_line_numbered(text, line):
    with pytest.raises(va.VAParseError) as info:
        va.parse_vagroup(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")
