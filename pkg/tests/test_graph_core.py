from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import graphs, to_nx
from exminors.errors import InputError
from exminors.graph import (Graph, MinorOp, apply_minor_op, biconnected_blocks, block_edge_partition,
                            canonical_form, complete_bipartite, complete_graph, connected_graphs,
                            cycle_graph, is_isomorphic, is_minor_of, one_step_minors, path_graph,
                            petersen_graph, star_graph)
from exminors.graph6 import parse_graph6, read_graph6_lines, write_graph6


def test_graph6_hand_decoded():
    # "D?{": n=5, data byte '?' = 0 and '{' = 60 = 111100
    g = parse_graph6("D?{")
    assert g.n == 5
    # bits 6..9 are set: pairs (0,4), (1,4), (2,4), (3,4) in column-major order
    assert list(g.edges) == [(0, 4), (1, 4), (2, 4), (3, 4)]


def test_graph6_single_vertex():
    g = parse_graph6("@")
    assert g.n == 1 and g.m == 0


@pytest.mark.parametrize("text", ["D~", "D?{{", "Dx\x7f", ":Fa@x^", ""])
def test_graph6_errors_carry_offsets(text):
    with pytest.raises(InputError):
        parse_graph6(text)


def test_graph6_error_location():
    with pytest.raises(InputError, match="offset 2"):
        parse_graph6("D~")


def test_graph6_stream_line_numbers():
    with pytest.raises(InputError, match="line 3"):
        list(read_graph6_lines(["D~{", "", "D~"]))


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=12))
def test_graph6_round_trip_and_networkx_agree(g):
    s = write_graph6(g)
    assert parse_graph6(s) == g
    # networkx writes the same bytes
    assert nx.to_graph6_bytes(to_nx(g), header=False).strip().decode() == s


def test_graph6_large_header():
    g = Graph(70, [(0, 69), (5, 6)])
    s = write_graph6(g)
    assert s[0] == "~"
    assert parse_graph6(s) == g


def test_minor_ops_examples():
    k3 = apply_minor_op(complete_graph(4), MinorOp("contract-edge", (0, 1)))
    assert is_isomorphic(k3, complete_graph(3))
    p5 = apply_minor_op(cycle_graph(5), MinorOp("delete-edge", (0, 1)))
    assert is_isomorphic(p5, path_graph(5))
    c4 = apply_minor_op(cycle_graph(5), MinorOp("contract-edge", (0, 1)))
    assert is_isomorphic(c4, cycle_graph(4))


def test_minor_op_bad_target():
    with pytest.raises(InputError):
        apply_minor_op(cycle_graph(4), MinorOp("delete-edge", (0, 2)))


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=7))
def test_minor_ops_keep_simple_and_shrink(g):
    for op, h in one_step_minors(g):
        assert h.n <= g.n
        assert all(u < v for u, v in h.edges)
        assert len(set(h.edges)) == h.m
        assert h.m <= g.m


def test_minor_containment_examples():
    pet = petersen_graph()
    model = is_minor_of(complete_graph(5), pet)
    assert model is not None and model.verify(complete_graph(5), pet)
    assert is_minor_of(complete_graph(3), star_graph(5)) is None
    g = complete_bipartite(2, 3)
    model = is_minor_of(g, g)
    assert model is not None and model.verify(g, g)


def test_minor_containment_against_brute_force():
    # oracle: h is a minor of g iff some sequence of one-step minors reaches it
    def reachable(g):
        seen = {canonical_form(g).edges.__repr__() + str(g.n): g}
        stack = [g]
        while stack:
            x = stack.pop()
            for _, y in one_step_minors(x):
                key = canonical_form(y).edges.__repr__() + str(y.n)
                if key not in seen:
                    seen[key] = y
                    stack.append(y)
        return list(seen.values())

    hosts = [complete_bipartite(2, 3), cycle_graph(5), complete_graph(4)]
    small = [g for n in range(1, 5) for g in connected_graphs(n)]
    for host in hosts:
        minors = reachable(host)
        for h in small:
            expect = any(is_isomorphic(h, x) for x in minors)
            assert (is_minor_of(h, host) is not None) == expect, (h, host)


def test_blocks_examples():
    bowtie = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    blocks = biconnected_blocks(bowtie)
    assert len(blocks) == 2 and all(is_isomorphic(b, complete_graph(3)) for b in blocks)
    assert len(biconnected_blocks(complete_graph(4))) == 1
    assert [b.m for b in biconnected_blocks(path_graph(4))] == [1, 1, 1]


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=8))
def test_block_partition_matches_networkx(g):
    parts = block_edge_partition(g)
    flat = [e for p in parts for e in p]
    assert sorted(flat) == list(g.edges)
    ours = sorted(sorted(p) for p in parts)
    theirs = sorted(sorted(tuple(sorted(e)) for e in comp)
                    for comp in nx.biconnected_component_edges(to_nx(g)))
    assert ours == theirs


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=7), graphs(max_n=7))
def test_isomorphism_matches_networkx(a, b):
    assert is_isomorphic(a, b) == nx.is_isomorphic(to_nx(a), to_nx(b))


def test_connected_graph_counts():
    # OEIS A001349: connected graphs on n unlabeled vertices
    assert [len(connected_graphs(n)) for n in range(1, 7)] == [1, 1, 2, 6, 21, 112]
