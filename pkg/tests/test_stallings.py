import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from twistcon import stallings as st
from twistcon.demos import index_two_subgroups, random_min3_multigraph
from twistcon.free_words import Word, enumerate_ball, format_code

from oracles import naive_core, subgroup_elements, top_graphs_networkx


def W(s):
    return Word.parse(s, 2)


def is_folded(C):
    out, inn = set(), set()
    for s, t, g in C.edges:
        if (s, g) in out or (t, g) in inn:
            return False
        out.add((s, g))
        inn.add((t, g))
    return True


def test_core_graph_of_a_bba():
    C = st.core_graph([W("a"), W("bba")])
    assert is_folded(C)
    assert C.num_vertices == 2 and len(C.edges) == 3
    assert sorted(C.degrees()) == [2, 4]
    assert not st.has_finite_index(C)
    assert st.subgroup_rank(C) == 2
    n, edges = naive_core(["a", "bba"])
    assert (n, len(edges)) == (C.num_vertices, len(C.edges))


def test_core_graph_language_matches_subgroup_oracle():
    C = st.core_graph([W("a"), W("bba")])
    members = subgroup_elements(["a", "bba"], 8, 4)
    for w in enumerate_ball(2, 4):
        assert st.contains(C, w) == (format_code(w.code).replace("e", "") in members)


@pytest.mark.parametrize(
    "gens",
    [["aa"], ["a", "b"], ["ab", "ba"], ["aab", "bAb", "abba"], ["aa", "b", "abA"], ["abAB"]],
)
def test_fold_matches_naive_oracle(gens):
    C = st.core_graph([W(g) for g in gens])
    n, edges = naive_core(gens)
    assert C.num_vertices == n and len(C.edges) == len(edges)
    assert is_folded(C)
    deg = C.degrees()
    assert all(d >= 2 for v, d in enumerate(deg) if v != C.base)


@settings(max_examples=40, deadline=None)
@given(hs.lists(hs.text(alphabet="aAbB", min_size=1, max_size=6), min_size=1, max_size=3))
def test_generators_are_read_by_core_graph(gens):
    words = [W(g) for g in gens]
    C = st.core_graph(words)
    assert is_folded(C)
    for w in words:
        assert st.contains(C, w)
        assert st.contains(C, ~w * w * w)


def test_index_two_subgroups_are_regular():
    for gens in index_two_subgroups().values():
        C = st.core_graph(gens)
        assert st.has_finite_index(C)
        assert set(C.degrees()) == {4}
        assert C.num_vertices <= 2


def test_finite_index_example():
    C = st.core_graph([W("aa"), W("b"), W("abA")])
    assert C.num_vertices == 2 and C.degrees() == [4, 4]
    assert st.has_finite_index(C)


def test_relative_growth_by_graph():
    assert st.relative_growth_by_graph(st.core_graph([W("a"), W("b")]), 3)[-1] == 53
    assert st.relative_growth_by_graph(st.core_graph([W("a")]), 5)[-1] == 11


def test_topologize_and_subdivide():
    C = st.core_graph([W("a"), W("bba")])
    T = st.topologize(st.underlying(C))
    assert T.num_vertices == 1 and len(T.edges) == 2
    S = st.subdivide(st.bouquet(2), 0)
    assert S.num_vertices == 2 and len(S.edges) == 3
    with pytest.raises(st.CycleGraph):
        st.topologize(st.cycle(3))


def test_named_entropies():
    assert st.entropy(st.bouquet(2)) == pytest.approx(3.0, abs=1e-6)
    assert st.entropy(st.theta()) == pytest.approx(2.0, abs=1e-6)
    assert st.entropy(st.dumbbell()) == pytest.approx(2.0, abs=1e-6)
    assert st.entropy(st.cycle(5)) == pytest.approx(1.0, abs=1e-6)


def test_subdivided_figure_eight_root():
    # closed non-backtracking walks: loops of length 1 and 2, so 1/rho solves
    # 2z/(1+z) + 2z^2/(1+z^2) = 1
    rho = st.entropy(st.subdivide(st.bouquet(2), 0))
    z = 1 / rho
    assert 2 * z / (1 + z) + 2 * z * z / (1 + z * z) == pytest.approx(1.0, abs=1e-8)


def test_entropy_matches_numpy_eigenvalues():
    import numpy as np

    for U in [st.theta(), st.dumbbell(), st.subdivide(st.theta(), 1), st.bouquet(3)]:
        B = st.nonbacktracking_matrix(U)
        rho = max(abs(np.linalg.eigvals(B)))
        assert st.entropy(U) == pytest.approx(rho, rel=1e-7)


def test_entropy_bracket():
    lo, hi = st.entropy_bounds(st.subdivide(st.theta(), 0))
    assert lo <= hi and hi - lo <= 1e-8 * hi


def test_hoffman_smith_drop_on_random_graphs():
    rng = random.Random(11)
    for _ in range(30):
        U = random_min3_multigraph(rng)
        assert min(U.degrees()) >= 3
        e = rng.randrange(len(U.edges))
        assert st.entropy(st.subdivide(U, e)) < st.entropy(U) - 1e-6
        assert st.entropy(U) <= max(U.degrees()) - 1 + 1e-9


def _to_nx(U):
    G = nx.MultiGraph()
    G.add_nodes_from(range(U.num_vertices))
    G.add_edges_from(U.edges)
    return G


@pytest.mark.parametrize("k,cap,count", [(2, None, 3), (3, 3, 5), (3, 4, 12), (3, 5, 14), (3, None, 15)])
def test_enumerate_top_counts_match_networkx(k, cap, count):
    ours = st.enumerate_top(k, cap)
    ref = top_graphs_networkx(k, cap)
    assert len(ours) == len(ref) == count
    for U in ours:
        assert U.betti() == k and min(U.degrees()) >= 3
    for a in range(len(ours)):
        for b in range(a + 1, len(ours)):
            assert not nx.is_isomorphic(_to_nx(ours[a]), _to_nx(ours[b]))


def test_top2_is_theta_figure_eight_dumbbell():
    ours = [_to_nx(U) for U in st.enumerate_top(2)]
    for named in (st.theta(), st.bouquet(2), st.dumbbell()):
        assert sum(nx.is_isomorphic(_to_nx(named), G) for G in ours) == 1


@pytest.mark.parametrize(
    "m,k,value",
    [(2, 2, 2.1303954347), (3, 2, 3.0), (2, 3, 2.5196400023), (3, 3, 3.6494359141)],
)
def test_gamma_k_values_and_gap(m, k, value):
    g = st.gamma_k(m, k)
    assert g == pytest.approx(value, abs=1e-8)
    assert 2 * m - 1 - g >= 0.05


def test_gamma_k_rank_one():
    assert st.gamma_k(2, 1) == 1.0


def test_graph_text_roundtrip_and_dot():
    C = st.core_graph([W("a"), W("bba")])
    assert st.load_graph(st.dump_graph(C)) == C
    dot = st.to_dot(C)
    assert dot.startswith("digraph") and 'label="b"' in dot
    with pytest.raises(ValueError):
        st.load_graph("nodes 2\n")
