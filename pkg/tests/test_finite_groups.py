from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs
from scipy.cluster.hierarchy import DisjointSet

from twistcon import finite_groups as fg

PAIRS = fg.corpus_pairs()
CORPUS = fg.corpus()


def brute_reidemeister(F, phi):
    """Orbits of z.x = z x phi(z)^-1 by explicit set closure."""
    seen = set()
    count = 0
    for x in range(F.order):
        if x in seen:
            continue
        count += 1
        orbit = {int(F.mul[F.mul[z, x], F.inv[phi.map[z]]]) for z in range(F.order)}
        seen |= orbit
    return count


def brute_pairs(F, phi):
    return sum(
        1
        for x in range(F.order)
        for y in range(F.order)
        if F.mul[x, y] == F.mul[y, phi.map[x]]
    )


def test_orders():
    expect = {"S3": 6, "D4": 8, "Q8": 8, "A4": 12, "Heis(3)": 27, "F20": 20, "F21": 21, "Z/2xZ/4": 8}
    for name, n in expect.items():
        assert CORPUS[name].order == n


def test_corpus_size():
    assert len(PAIRS) >= 30
    assert {"S3", "D4", "Q8", "A4", "Heis(3)", "Z/7"} <= {g for g, *_ in PAIRS}


def test_s3_identity_values():
    S3 = fg.symmetric3()
    assert fg.reidemeister(S3, S3.identity_endo()) == 3
    assert fg.tdc_finite(S3, S3.identity_endo()) == Fraction(1, 2)


@pytest.mark.parametrize("name,dc", [("D4", "5/8"), ("Q8", "5/8"), ("S3", "1/2"), ("Heis(3)", "11/27"), ("A4", "1/3")])
def test_dc_values(name, dc):
    assert fg.dc_finite(CORPUS[name]) == Fraction(dc)


@pytest.mark.parametrize("name,count", [("S3", 10), ("D4", 36), ("A4", 33), ("Z/6", 6), ("Z/2xZ/2", 16)])
def test_endomorphism_counts(name, count):
    assert len(fg.endomorphisms(CORPUS[name])) == count


@pytest.mark.parametrize("idx", range(0, len(PAIRS), 7))
def test_reidemeister_and_pairs_match_brute_force(idx):
    _, F, _, phi = PAIRS[idx]
    assert fg.reidemeister(F, phi) == brute_reidemeister(F, phi)
    assert fg.twisted_pair_count(F, phi) == brute_pairs(F, phi)


def test_identity_and_fixed_classes_on_corpus():
    for _, F, _, phi in PAIRS:
        r = fg.reidemeister(F, phi)
        assert fg.tdc_finite(F, phi) == Fraction(r, F.order)
        assert r == fg.fixed_conjugacy_class_count(F, phi)
        assert fg.tdc_finite(F, phi) <= fg.dc_finite(F)


def test_abelian_reidemeister_is_fixed_count():
    for _, F, _, phi in PAIRS:
        if F.is_abelian():
            assert fg.reidemeister(F, phi) == len(fg.fixed_points(F, phi))


@settings(max_examples=40, deadline=None)
@given(hs.integers(0, 10**6))
def test_summation_bounds(seed):
    for _, F, N, phi in fg.random_summation_triples(3, seed=seed):
        assert fg.check_summation_bounds(F, N, phi)


def test_summation_bounds_reject_bad_inputs():
    S3 = fg.symmetric3()
    sub = fg.subgroup_generated(S3, [S3.gens[0]])
    with pytest.raises(fg.InvalidGroup):
        fg.check_summation_bounds(S3, sub, S3.identity_endo())


@settings(max_examples=30, deadline=None)
@given(hs.sampled_from(range(len(PAIRS))))
def test_twisted_classes_are_orbits(idx):
    _, F, _, phi = PAIRS[idx]
    part = fg.twisted_classes(F, phi)
    cls = np.array(part.class_of)
    for z in range(F.order):
        moved = F.mul[F.mul[z], F.inv[phi.map[z]]]
        assert np.array_equal(cls[moved], cls)
    assert part.class_count == len(set(part.class_of))


def test_invalid_tables_rejected():
    with pytest.raises(fg.InvalidGroup):
        fg.load_cayley("2\n0 1\n0 1\n")
    with pytest.raises(fg.InvalidGroup):
        fg.load_cayley("3\n0 1 2\n1 2 0\n")
    bad = fg.cyclic(4).mul.copy()
    bad[1, 1], bad[1, 2] = bad[1, 2], bad[1, 1]
    with pytest.raises(fg.InvalidGroup):
        fg.FiniteGroupTable(bad, fg.cyclic(4).inv, 0)


def test_invalid_endomorphism_rejected():
    S3 = fg.symmetric3()
    with pytest.raises(fg.InvalidEndomorphism):
        fg.validate_endo(S3, fg.FiniteEndo([0, 1, 2, 3, 4, 0]))


def test_cayley_roundtrip():
    F = fg.quaternion()
    G = fg.load_cayley(fg.dump_cayley(F))
    assert np.array_equal(F.mul, G.mul)
    phi = F.inner(F.gens[0])
    assert fg.load_endo(fg.dump_endo(phi)) == phi


def test_quotient_and_induced_endo():
    D4 = CORPUS["D4"]
    centre = [x for x in range(8) if all(D4.mul[x, y] == D4.mul[y, x] for y in range(8))]
    Q, proj = fg.quotient(D4, centre)
    assert Q.order == 4 and Q.is_abelian()
    phi = D4.inner(D4.gens[1])
    assert fg.induced_endo(D4, phi, proj, Q.order) == Q.identity_endo()


def test_extension_examples():
    z3 = fg.cyclic(3)
    inv = fg.FiniteEndo([int(z3.inv[x]) for x in range(3)])
    assert fg.extension_conjugacy_correspondence(z3, inv, 2)
    G = fg.semidirect_extension(z3, inv, 2)
    assert G.order == 6 and fg.conjugacy_classes(G).class_count == 3
    s3 = fg.symmetric3()
    t = next(x for x in range(6) if x != s3.id and s3.mul[x, x] == s3.id)
    assert fg.extension_conjugacy_correspondence(s3, s3.inner(t), 2)


def test_extension_requires_finite_order():
    z5 = fg.cyclic(5)
    with pytest.raises(fg.InvalidEndomorphism):
        fg.semidirect_extension(z5, fg.FiniteEndo([(2 * x) % 5 for x in range(5)]), 2)


def _order3_q8():
    Q8 = fg.quaternion()
    i, j = Q8.gens
    k = int(Q8.mul[i, j])
    return Q8, fg.endo_from_images(Q8, [j, k])


def test_extension_convention_with_order_three_twist():
    # slice t^a matches phi^-a twisted classes under t^-1 u t = phi(u)
    Q8, phi = _order3_q8()
    assert phi.power(3) == Q8.identity_endo() and phi.power(2) != Q8.identity_endo()
    assert fg.extension_conjugacy_correspondence(Q8, phi, 3)


def test_literal_positive_power_reading_differs_for_order_three():
    Q8, phi = _order3_q8()
    G = fg.semidirect_extension(Q8, phi, 3)
    cls = fg.conjugacy_classes(G).class_of
    slice1 = cls[8:16]
    tw = fg.twisted_classes(Q8, phi).class_of  # phi^1, the literal reading
    ds = DisjointSet(range(8))
    for u in range(8):
        ds.merge(u, int(phi.map[u]))
        ds.merge(u, tw.index(tw[u]))
    literal = fg._partition_signature([ds[u] for u in range(8)])
    assert literal != fg._partition_signature(slice1)


def test_semidirect_convention():
    z5 = fg.cyclic(5)
    phi = fg.FiniteEndo([(2 * x) % 5 for x in range(5)])
    G = fg.semidirect_extension(z5, phi, 4)
    t = 5  # t^1 u_0
    for u in range(5):
        tinv_u_t = G.mul[G.mul[G.inv[t], u], t]
        assert tinv_u_t == phi.map[u]
