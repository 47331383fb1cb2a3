from __future__ import annotations

import itertools
import json
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs, to_nx
from exminors.corpus import random_connected_graph, random_embedding
from exminors.embedding import (KLEIN_BOTTLE, PROJECTIVE_PLANE, SPHERE, TORUS, Embedding,
                                SurfaceSpec, class_count, component_genus, embeddings_equivalent,
                                enumerate_embeddings, euler_genus, face_count, face_length_multiset,
                                is_orientable_embedding, local_change, trace_faces)
from exminors.errors import InputError
from exminors.genus import (decide_embedding, embeds_exactly, embeds_in_surface, min_euler_genus)
from exminors.graph import (Graph, biconnected_blocks, complete_bipartite, complete_graph,
                            connected_graphs, cycle_graph, one_step_minors, path_graph,
                            petersen_graph)


def oracle_face_count(g: Graph, rotation, signs) -> int:
    """Independent face tracer over darts with a flag (used only in tests)."""
    pos = [{w: i for i, w in enumerate(r)} for r in rotation]
    sign = dict(zip(g.edges, signs))
    seen = set()
    faces = 0
    for u, v in g.edges:
        for a, b in ((u, v), (v, u)):
            for s in (1, -1):
                if (a, b, s) in seen:
                    continue
                faces += 1
                st_ = (a, b, s)
                while st_ not in seen:
                    seen.add(st_)
                    # the same walk read backwards is the mirror state
                    x, y, t = st_
                    lam = sign[(min(x, y), max(x, y))]
                    seen.add((y, x, -t * lam))
                    t2 = t * lam
                    r = rotation[y]
                    w = r[(pos[y][x] + t2) % len(r)]
                    st_ = (y, w, t2)
    return faces


def oracle_orientable(g: Graph, signs) -> bool:
    """Can vertex switches make every sign positive? (2-colouring check)"""
    side = {}
    for root in range(g.n):
        if root in side:
            continue
        side[root] = 1
        stack = [root]
        while stack:
            x = stack.pop()
            for (u, v), s in zip(g.edges, signs):
                if x not in (u, v):
                    continue
                y = v if x == u else u
                want = side[x] * s
                if y not in side:
                    side[y] = want
                    stack.append(y)
                elif side[y] != want:
                    return False
    return True


def oracle_min_genus(g: Graph, orientable: bool | None = None) -> int:
    best = None
    rots = [list(itertools.permutations(g.neighbors(v))) for v in range(g.n)]
    sign_space = [(1,) * g.m] if orientable else list(itertools.product((1, -1), repeat=g.m))
    if orientable is False:
        sign_space = [s for s in sign_space if not oracle_orientable(g, s)]
    for rot in itertools.product(*rots):
        for signs in sign_space:
            gen = 2 - g.n + g.m - oracle_face_count(g, rot, signs)
            best = gen if best is None else min(best, gen)
    return best


def k4_planar() -> Embedding:
    rot = [(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)]
    return Embedding.from_maps(complete_graph(4), rot)


def test_face_examples():
    k3 = Embedding.planar_default(complete_graph(3))
    assert sorted(len(f) for f in trace_faces(k3)) == [3, 3] and euler_genus(k3) == 0
    k2 = Embedding.planar_default(complete_graph(2))
    assert [len(f) for f in trace_faces(k2)] == [2] and euler_genus(k2) == 0
    e = k4_planar()
    assert face_length_multiset(e) == [3, 3, 3, 3] and euler_genus(e) == 0


def test_face_trace_matches_oracle_on_random_embeddings():
    rng = random.Random(7)
    for _ in range(200):
        g = random_connected_graph(rng, rng.randint(2, 7), rng.randint(1, 12))
        e = random_embedding(rng, g)
        assert len(trace_faces(e)) == oracle_face_count(g, e.rotation, e.signs)


def test_trace_is_deterministic_and_covers_each_edge_twice():
    rng = random.Random(3)
    for _ in range(50):
        g = random_connected_graph(rng, 6, 10)
        e = random_embedding(rng, g)
        faces = trace_faces(e)
        assert faces == trace_faces(e)
        counts = {x: 0 for x in g.edges}
        for f in faces:
            for x in f.edges:
                counts[x] += 1
        assert set(counts.values()) == {2}


def test_minimum_genus_examples():
    assert min_euler_genus(complete_graph(5)).genus == 1
    assert min_euler_genus(complete_bipartite(3, 3)).genus == 1
    assert min_euler_genus(complete_graph(4)).genus == 0
    r = min_euler_genus(complete_graph(5))
    assert component_genus(r.witness) == 1 and not is_orientable_embedding(r.witness)


def test_local_change_examples():
    e = k4_planar()
    for v in range(4):
        assert local_change(local_change(e, v), v) == e
        assert face_length_multiset(local_change(e, v)) == face_length_multiset(e)
    k3 = Embedding.planar_default(complete_graph(3))
    lc = local_change(k3, 0)
    assert lc.sign(0, 1) == -1 and lc.sign(0, 2) == -1 and lc.sign(1, 2) == 1
    assert euler_genus(lc) == 0


def test_equivalence_examples():
    e = k4_planar()
    assert embeddings_equivalent(e, e) == frozenset()
    assert embeddings_equivalent(e, local_change(e, 2)) == frozenset({2})
    other = Embedding.planar_default(complete_graph(4))
    assert len(trace_faces(other)) != 4
    assert embeddings_equivalent(e, other) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_equivalence_soundness(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(3, 6), rng.randint(3, 9))
    e = random_embedding(rng, g)
    ws = {v for v in range(g.n) if rng.random() < 0.5}
    f = e
    for v in sorted(ws):
        f = local_change(f, v)
    w = embeddings_equivalent(e, f)
    assert w is not None
    assert face_length_multiset(e) == face_length_multiset(f)
    assert euler_genus(e) == euler_genus(f)
    assert is_orientable_embedding(e) == is_orientable_embedding(f)


def test_orientability_examples():
    assert is_orientable_embedding(k4_planar())
    assert not is_orientable_embedding(min_euler_genus(complete_graph(5)).witness)


def test_enumeration_examples():
    k3 = list(enumerate_embeddings(complete_graph(3)))
    assert len(k3) == 2 and sorted(euler_genus(e) for e in k3) == [0, 1]
    assert len(list(enumerate_embeddings(complete_graph(2)))) == 1


def test_enumeration_matches_naive_dedup_on_k4():
    g = complete_graph(4)
    ours = list(enumerate_embeddings(g))
    assert len(ours) == class_count(g)
    # naive: every rotation system and every signature, keyed by the least
    # member of its local-change orbit
    subsets = [s for k in range(g.n + 1) for s in itertools.combinations(range(g.n), k)]

    def canon(r):
        # rotations compared as cyclic sequences
        i = r.index(min(r))
        return r[i:] + r[:i]

    def orbit_key(rot, signs):
        out = []
        for sub in subsets:
            rr = tuple(canon(tuple(reversed(r))) if v in sub else canon(tuple(r))
                       for v, r in enumerate(rot))
            ss = tuple(s * (-1 if (u in sub) != (v in sub) else 1)
                       for (u, v), s in zip(g.edges, signs))
            out.append((rr, ss))
        return min(out)

    naive = set()
    rots = [list(itertools.permutations(g.neighbors(v))) for v in range(g.n)]
    for rot in itertools.product(*rots):
        for signs in itertools.product((1, -1), repeat=g.m):
            naive.add(orbit_key(rot, signs))
    assert len(naive) == len(ours)
    assert {orbit_key(e.rotation, e.signs) for e in ours} == naive


def test_euler_formula_exhaustive_small():
    for n in range(1, 6):
        for g in connected_graphs(n):
            if g.m > 5:
                continue
            for e in enumerate_embeddings(g):
                f = face_count(e)
                gen = 2 - g.n + g.m - f
                assert gen >= 0 and euler_genus(e) == gen


@pytest.mark.parametrize("g", [complete_graph(4), cycle_graph(5), complete_bipartite(2, 3),
                               Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]),
                               Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])])
def test_min_genus_matches_brute_force(g):
    assert min_euler_genus(g).genus == oracle_min_genus(g)
    assert min_euler_genus(g, restrict="orientable").genus == oracle_min_genus(g, True)
    assert min_euler_genus(g, restrict="nonorientable").genus == oracle_min_genus(g, False)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8, connected=True))
def test_sphere_matches_networkx_planarity(g):
    planar, _ = nx.check_planarity(to_nx(g))
    ok, wit = embeds_in_surface(g, SPHERE)
    assert ok == planar
    if ok:
        assert component_genus(wit) == 0


def test_embeds_in_examples():
    assert not embeds_in_surface(complete_graph(5), SPHERE)[0]
    ok, wit = embeds_in_surface(complete_graph(6), PROJECTIVE_PLANE)
    assert ok and component_genus(wit) == 1 and not is_orientable_embedding(wit)
    for s in (SPHERE, PROJECTIVE_PLANE, TORUS, KLEIN_BOTTLE, SurfaceSpec(3, False)):
        ok, wit = embeds_in_surface(complete_graph(4), s)
        assert ok and wit.graph == complete_graph(4)
        assert is_orientable_embedding(wit) == s.orientable


@pytest.mark.parametrize("g,name,expect", [
    (complete_graph(5), "torus", True), (complete_graph(5), "klein", True),
    (complete_bipartite(3, 3), "pp", True), (petersen_graph(), "pp", True),
    (petersen_graph(), "torus", True), (complete_graph(7), "torus", True),
    (complete_graph(7), "klein", False), (complete_graph(7), "pp", False),
    (complete_graph(6), "N3", True), (cycle_graph(5), "N1", True), (path_graph(4), "N2", True),
])
def test_embeds_in_table(g, name, expect):
    s = SurfaceSpec.parse(name)
    r = decide_embedding(g, s)
    assert r.embeds == expect
    if r.embeds:
        assert component_genus(r.witness) <= s.euler_genus
        has_cycle = g.m >= g.n
        if has_cycle:
            assert is_orientable_embedding(r.witness) == s.orientable
    else:
        assert len(r.transcript) == 64


def test_embeds_exactly():
    # K4 has maximum orientable Euler genus 2
    assert embeds_exactly(complete_graph(4), TORUS)[0]
    assert not embeds_exactly(complete_graph(4), SurfaceSpec(4, True))[0]
    ok, wit = embeds_exactly(complete_graph(5), SurfaceSpec(4, True))
    assert ok and component_genus(wit) == 4 and is_orientable_embedding(wit)
    assert embeds_exactly(complete_bipartite(3, 3), SurfaceSpec(4, True))[0]


def test_genus_monotone_under_minors():
    for n in range(4, 7):
        for g in connected_graphs(n)[-6:]:
            gg = min_euler_genus(g).genus
            for _, h in one_step_minors(g):
                if h.n and h.is_connected():
                    assert min_euler_genus(h).genus <= gg


def test_block_additivity_small():
    rng = random.Random(11)
    for _ in range(40):
        # glue two random blocks at a vertex
        a = random_connected_graph(rng, rng.randint(3, 5), rng.randint(3, 8))
        b = random_connected_graph(rng, rng.randint(3, 5), rng.randint(3, 8))
        if a.m + b.m > 12:
            continue
        edges = list(a.edges) + [(u + a.n - 1, v + a.n - 1) for u, v in b.edges]
        g = Graph(a.n + b.n - 1, edges)
        total = sum(min_euler_genus(x).genus for x in biconnected_blocks(g) if x.m >= 3)
        assert min_euler_genus(g).genus == total


def test_document_round_trip_and_errors():
    e = min_euler_genus(complete_graph(5)).witness
    assert Embedding.loads(e.dumps()) == e
    with pytest.raises(InputError, match="offset"):
        Embedding.loads("{not json")
    doc = json.loads(e.dumps())
    doc["rotation"][0] = doc["rotation"][0][:-1]
    with pytest.raises(InputError):
        Embedding.from_document(doc)


def test_surface_names():
    assert SurfaceSpec.parse("sphere") == SPHERE
    assert SurfaceSpec.parse("O2") == SurfaceSpec(4, True)
    assert SurfaceSpec.parse("N3") == SurfaceSpec(3, False)
    with pytest.raises(InputError):
        SurfaceSpec.parse("O")
