from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings
from networkx.algorithms.approximation import treewidth_min_fill_in

from conftest import (graphs, oracle_linked_violations, oracle_pathwidth, oracle_tree_pathwidth,
                      oracle_treewidth, to_nx)
from exminors.bounds import T_S, T_of
from exminors.decompositions import (TreeDecomposition, all_tree_paths, check_path_minimality,
                                     decomposition_metrics, exact_pathwidth, exact_treewidth,
                                     is_linked, max_disjoint_paths, minimal_linked_decomposition,
                                     validate_decomposition)
from exminors.errors import InputError, PreconditionError
from exminors.graph import (Graph, complete_binary_tree, complete_bipartite, complete_graph,
                            cycle_graph, path_graph, petersen_graph, star_graph)

TD = TreeDecomposition


def _path_td(bags):
    return TD(bags, [(i, i + 1) for i in range(len(bags) - 1)])


# --- validation and metrics -----------------------------------------------------

def test_validation_examples():
    p3 = path_graph(3)
    assert validate_decomposition(p3, _path_td([{0, 1}, {1, 2}]))
    v = validate_decomposition(p3, _path_td([{0, 1}, {2}]))
    assert not v and "axiom 2" in v.violation
    assert not validate_decomposition(p3, _path_td([{0, 1}, {1}]))
    v = validate_decomposition(p3, _path_td([{0, 1}, {1, 2}, {0, 2}]))
    assert not v and "axiom 3" in v.violation
    assert "tree" in validate_decomposition(p3, TD([{0, 1}, {1, 2}], [])).violation
    k4 = complete_graph(4)
    d = TD([{0, 1, 2, 3}], [])
    assert validate_decomposition(k4, d) and d.width() == 3


def test_metrics_examples():
    m = decomposition_metrics(TD([{0, 1, 2, 3}], []))
    assert (m.width, m.height, m.max_degree, m.nodes) == (3, 1, 0, 1)
    n = 7
    m = decomposition_metrics(_path_td([{i, i + 1} for i in range(n - 1)]))
    assert (m.width, m.height) == (1, n - 1)
    star = TD([{0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}], [(0, k) for k in range(1, 5)])
    assert validate_decomposition(star_graph(4), star)
    assert decomposition_metrics(star).max_degree == 4


def test_document_round_trip():
    d = _path_td([{0, 1}, {1, 2}])
    assert TD.from_document(d.to_document()) == d
    with pytest.raises(InputError):
        TD.from_document({"bags": [[0]]})


# --- exact widths ---------------------------------------------------------------

@pytest.mark.parametrize("g,tw", [(path_graph(6), 1), (star_graph(5), 1),
                                  (complete_binary_tree(3), 1), (cycle_graph(5), 2),
                                  (complete_graph(2), 1), (complete_graph(6), 5),
                                  (complete_bipartite(3, 3), 3)])
def test_treewidth_examples(g, tw):
    w, d = exact_treewidth(g)
    assert w == tw == d.width()
    assert validate_decomposition(g, d)


def test_petersen_treewidth():
    g = petersen_graph()
    w, d = exact_treewidth(g)
    assert validate_decomposition(g, d) and d.width() == w
    # independent bounds: contracting the spokes leaves K5, and a fill-in heuristic gives 4
    h = to_nx(g)
    for i in range(5):
        h = nx.contracted_edge(h, (i, i + 5), self_loops=False)
    assert nx.is_isomorphic(nx.Graph(h), nx.complete_graph(5))
    upper, _ = treewidth_min_fill_in(to_nx(g))
    assert w == 4 == upper


@pytest.mark.parametrize("g,pw", [(path_graph(7), 1), (cycle_graph(5), 2), (complete_graph(5), 4)])
def test_pathwidth_examples(g, pw):
    w, d = exact_pathwidth(g)
    assert w == pw == d.width()
    assert d.is_path() and validate_decomposition(g, d)


def test_binary_tree_pathwidth():
    g = complete_binary_tree(4)
    w, d = exact_pathwidth(g)
    assert w == oracle_tree_pathwidth(g.n, g.edges) == 2
    assert validate_decomposition(g, d)


def test_exact_width_size_limits():
    with pytest.raises(PreconditionError):
        exact_treewidth(path_graph(13))
    with pytest.raises(PreconditionError):
        exact_pathwidth(path_graph(17))


@given(graphs(min_n=1, max_n=7))
@settings(max_examples=60, deadline=None)
def test_widths_against_orderings(g):
    tw, dt = exact_treewidth(g)
    pw, dp = exact_pathwidth(g)
    assert tw == oracle_treewidth(g)
    assert pw == oracle_pathwidth(g)
    assert tw <= pw
    assert validate_decomposition(g, dt) and dt.width() == tw
    assert validate_decomposition(g, dp) and dp.width() == pw


# --- path minimality --------------------------------------------------------------

def test_path_minimality_examples():
    d = _path_td([{0}, {0, 1}, {0, 1, 2}])
    assert check_path_minimality(d, [0, 1, 2])
    d = _path_td([{0, 1}, {0, 1}, {1, 2}])
    assert not check_path_minimality(d, [0, 1, 2])
    with pytest.raises(PreconditionError):
        check_path_minimality(d, [0, 2])


@given(graphs(min_n=1, max_n=8))
@settings(max_examples=60, deadline=None)
def test_treewidth_witnesses_are_path_minimal(g):
    _, d = exact_treewidth(g)
    assert all(check_path_minimality(d, p) for p in all_tree_paths(d))


# --- linkedness -------------------------------------------------------------------

@given(graphs(min_n=1, max_n=7))
@settings(max_examples=60, deadline=None)
def test_disjoint_paths_against_networkx(g):
    h = to_nx(g)
    A = frozenset(range(0, g.n, 2))
    B = frozenset(range(g.n // 2, g.n))
    h.add_edges_from([("s", a) for a in A] + [(b, "t") for b in B])
    expected = nx.node_connectivity(h, "s", "t") if A and B else 0
    assert max_disjoint_paths(g, A, B) == expected


def test_linked_examples():
    assert is_linked(complete_graph(5), TD([set(range(5))], []))
    # consecutive edge bags of P3 lack a small separator bag; adding {1} fixes that
    p3 = path_graph(3)
    assert not is_linked(p3, _path_td([{0, 1}, {1, 2}]))
    assert is_linked(p3, TD([{1}, {0, 1}, {1, 2}], [(0, 1), (0, 2)]))
    assert not is_linked(path_graph(5), _path_td([{i, i + 1} for i in range(4)]))


def test_c6_edge_bags_are_not_a_decomposition():
    c6 = cycle_graph(6)
    d = _path_td([{i, (i + 1) % 6} for i in range(6)])
    assert not validate_decomposition(c6, d)
    with pytest.raises(PreconditionError):
        is_linked(c6, d)


def test_c6_linked_decomposition():
    # fewest-node linked decomposition of C6 at width 2, checked by both routes
    c6 = cycle_graph(6)
    bags = [{1, 3}, {0, 1, 3}, {0, 3}, {0, 3, 5}, {3, 5}, {1, 2, 3}, {3, 4, 5}]
    tree = [(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 6)]
    d = TD(bags, tree)
    assert validate_decomposition(c6, d) and d.width() == 2
    assert is_linked(c6, d)
    assert oracle_linked_violations(c6, d.bags, d.tree_edges) == []


def test_hand_built_violation():
    # size-3 bags fanning around vertex 0 of C6; only two disjoint paths join any two of them
    c6 = cycle_graph(6)
    d = _path_td([{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}])
    r = is_linked(c6, d)
    assert not r and r.violation == (0, 1, 3) and r.flow == 2
    assert oracle_linked_violations(c6, d.bags, d.tree_edges)[0] == (0, 1)


@given(graphs(min_n=1, max_n=7))
@settings(max_examples=80, deadline=None)
def test_is_linked_against_oracle(g):
    for d in (exact_treewidth(g)[1], exact_pathwidth(g)[1]):
        r = is_linked(g, d)
        bad = oracle_linked_violations(g, d.bags, d.tree_edges)
        assert r.linked == (not bad)
        if bad:
            assert r.violation[:2] == bad[0]


@pytest.mark.parametrize("g", [path_graph(3), star_graph(4), complete_graph(4),
                               complete_bipartite(2, 3)])
def test_minimal_linked_decomposition(g):
    d = minimal_linked_decomposition(g)
    tw, _ = exact_treewidth(g)
    assert d is not None and d.width() == tw
    assert validate_decomposition(g, d) and is_linked(g, d)
    assert oracle_linked_violations(g, d.bags, d.tree_edges) == []


# --- audits on excluded minors of the sphere ---------------------------------------

@pytest.mark.parametrize("g", [complete_graph(5), complete_bipartite(3, 3)])
def test_treewidth_audit(g):
    tw, _ = exact_treewidth(g)
    assert tw <= T_of(0) and tw <= T_S(0)


@pytest.mark.parametrize("g", [complete_graph(5), complete_bipartite(3, 3)])
def test_seymour_tree_degree_audit(g):
    d = minimal_linked_decomposition(g)
    w = d.width() + 1          # the degree bound is stated for width < w
    assert decomposition_metrics(d).max_degree <= 2 * 0 + 2 * w
