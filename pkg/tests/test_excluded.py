from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import graphs, to_nx
from exminors.bounds import clique_euler_genus, lower_bound_L
from exminors.embedding import SurfaceSpec, component_genus
from exminors.errors import PreconditionError
from exminors.excluded import (audit_excluded_minor, blocks_excluded, check_edge_cycles,
                               check_two_separations, clique_order_bound,
                               enumerate_excluded_minors, extract_excluded_minor,
                               is_excluded_minor, two_separations)
from exminors.genus import min_euler_genus
from exminors.graph import (Graph, complete_bipartite, complete_graph, connected_graphs,
                            is_isomorphic)
from exminors.graph6 import write_graph6

SPHERE = SurfaceSpec(0, True)
PP = SurfaceSpec(1, False)
K5 = complete_graph(5)
K33 = complete_bipartite(3, 3)


@pytest.mark.parametrize("g,expected", [(K5, True), (K33, True), (complete_graph(4), False),
                                        (complete_graph(6), False)])
def test_sphere_exclusion_examples(g, expected):
    ok, cert = is_excluded_minor(g, SPHERE)
    assert ok is expected
    assert cert.verify()


def test_k6_blocked_by_vertex_deletion():
    ok, cert = is_excluded_minor(complete_graph(6), SPHERE)
    assert not ok and cert.blocking is not None
    assert cert.blocking.kind == "delete-vertex"


def test_certificate_document():
    ok, cert = is_excluded_minor(K5, SPHERE)
    doc = cert.to_document()
    assert doc["excluded"] and doc["surface"] == "sphere"
    assert len(doc["witnesses"]) == 5 + 10 + 10
    assert doc["evidence"]


def test_tampered_certificate_fails():
    ok, cert = is_excluded_minor(K5, SPHERE)
    w = cert.witnesses[0]
    # witness 5 embeds K5 - e, not the K4 left by deleting vertex 0
    assert cert.witnesses[5].op.kind == "delete-edge"
    cert.witnesses[0] = type(w)(w.op, w.minor, cert.witnesses[5].embedding)
    assert not cert.verify()


@given(graphs(min_n=1, max_n=6, connected=True))
@settings(max_examples=40, deadline=None)
def test_planar_graphs_never_excluded_for_sphere(g):
    ok, cert = is_excluded_minor(g, SPHERE)
    assert cert.verify()
    if nx.check_planarity(to_nx(g))[0]:
        assert not ok
    else:
        # on at most 6 vertices only K5 and K3,3 are minimal
        assert ok == (is_isomorphic(g, K5) or is_isomorphic(g, K33))


def test_extract_k6_gives_k5():
    h = extract_excluded_minor(complete_graph(6), SPHERE)
    assert is_isomorphic(h, K5)
    assert extract_excluded_minor(K5, SPHERE) == K5


def test_extract_k7_projective():
    trace: list = []
    h = extract_excluded_minor(complete_graph(7), PP, trace=trace)
    assert h.n == 7 == lower_bound_L(1)[0]
    assert is_excluded_minor(h, PP)[0]
    assert trace and all(op.kind in ("delete-vertex", "delete-edge", "contract-edge") for op in trace)


def test_extract_requires_nonembedding():
    with pytest.raises(PreconditionError):
        extract_excluded_minor(complete_graph(4), SPHERE)


def test_small_enumerations_are_empty():
    small = [write_graph6(g) for n in range(1, 5) for g in connected_graphs(n)]
    assert enumerate_excluded_minors(SPHERE, small).found == []
    upto6 = [write_graph6(g) for n in range(1, 7) for g in connected_graphs(n)]
    rep = enumerate_excluded_minors(PP, upto6)
    assert rep.found == [] and rep.budget_exceeded == []
    assert rep.examined == len(upto6)


def test_enumeration_dedups_isomorphic_copies():
    rel = Graph(5, [(a, b) for a in range(5) for b in range(a + 1, 5)])
    k33b = Graph(6, [(0, 1), (0, 3), (0, 5), (2, 1), (2, 3), (2, 5), (4, 1), (4, 3), (4, 5)])
    rep = enumerate_excluded_minors(SPHERE, [K5, rel, K33, k33b, ">>graph6<<", ""])
    assert len(rep.found) == 2 and rep.examined == 4


def test_clique_genus_and_L():
    assert [clique_euler_genus(k) for k in (5, 7, 8)] == [1, 2, 4]
    assert lower_bound_L(0) == (5, 4)
    for g in range(0, 1001):
        assert lower_bound_L(g)[0] == clique_order_bound(g)


@pytest.mark.parametrize("g", [K5, K33])
def test_audit_passes_on_sphere_minors(g):
    pi = min_euler_genus(g).witness
    rep = audit_excluded_minor(g, SPHERE, pi)
    assert rep.passed
    names = {c.name for c in rep.checks}
    assert {"isolated_paths", "well_nested_depth", "well_homotopic_depth",
            "disjoint_noncontractible", "treewidth"} <= names


def test_audit_refuses_nonminimal():
    g = complete_graph(6)
    with pytest.raises(PreconditionError):
        audit_excluded_minor(g, SPHERE, min_euler_genus(g).witness)


def test_audit_refuses_wrong_genus():
    # K5 drawn on the double torus is not of Euler genus 1 or 2
    from exminors.corpus import random_embedding
    import random
    rng = random.Random(3)
    while True:
        e = random_embedding(rng, K5, orientable=True)
        if component_genus(e) > 2:
            break
    with pytest.raises(PreconditionError):
        audit_excluded_minor(K5, SPHERE, e)


def test_two_separations_examples():
    assert two_separations(K5) == []
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    seps = two_separations(c4)
    assert {(a, b) for a, b, _ in seps} == {(0, 2), (1, 3)}
    assert all(len(x) == 1 for _, _, x in seps)


@pytest.mark.parametrize("g", [K5, K33])
def test_two_separated_sides_not_in_disks(g):
    ok, bad = check_two_separations(g, min_euler_genus(g).witness)
    assert ok and bad == []


def test_blocks_of_excluded_minors_are_excluded():
    for g in (K5, K33):
        [(b, s)] = blocks_excluded(g)
        assert s == SPHERE
    # two K5 sharing a vertex: each block is excluded for the sphere
    two = Graph(9, [(a, b) for a in range(5) for b in range(a + 1, 5)] +
                [(a, b) for a in [0, 5, 6, 7, 8] for b in [0, 5, 6, 7, 8] if a < b])
    out = blocks_excluded(two)
    assert len(out) == 2 and all(s == SPHERE for _, s in out)


@pytest.mark.parametrize("g,applicable", [(K5, 5), (K33, 3)])
def test_edge_cycles_measured_on_sphere_minors(g, applicable):
    # The first half (C_e is a contractible cycle of pi) holds for every edge
    # inside a disk. The second half asks for C_e to be nonseparating in an
    # embedding of G - e on the sphere, which has no nonseparating cycles, so
    # it fails on every applicable edge. Recorded as a measurement.
    checks = check_edge_cycles(g, SPHERE, min_euler_genus(g).witness)
    hit = [c for c in checks if c.holds is not None]
    assert len(hit) == applicable
    for c in hit:
        assert c.cycle is not None and c.contractible
        assert c.kind_in_minor == "contractible" and c.holds is False
    assert all(c.disk is None for c in checks if c.holds is None)
