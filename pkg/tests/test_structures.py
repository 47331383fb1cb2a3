from __future__ import annotations

import math
import random

import networkx as nx
import pytest
from scipy.spatial import Delaunay
from shapely.geometry import Polygon

from exminors.embedding import Embedding, trace_faces
from exminors.genus import min_euler_genus
from exminors.graph import Graph, norm_edge, theta_graph
from exminors.grids import (annulus_band, band_torus, concentric_rings, contains_subdivision,
                            embedding_from_positions, fan_triangulation, grid_boundary,
                            hexagonal_grid, pinched_loops, planar_grid,
                            toroidal_grid, toroidal_row, wheel)
from exminors.structures import (Fan, IsolatedPathSystem, NestedChain, Piece, faces_almost_disjoint,
                                 cycles_on_spanning_tree, homotopy_classes,
                                 max_disjoint_noncontractible, max_isolated_paths,
                                 max_well_homotopic_depth, max_well_nested_depth,
                                 radius_of_interior, select_almost_disjoint_faces,
                                 verify_fan, verify_isolated_paths, verify_well_nested_chain)
from exminors.topology import CONTRACTIBLE, classify_cycle, interior_of
from exminors.corpus import random_band


def _outer_face(e: Embedding, length: int | None = None, pos=None):
    """A face of the given length, else the unbounded face of a straight-line drawing."""
    faces = trace_faces(e)
    if length is not None:
        return next(f for f in faces if len(f) == length)

    def area(f):
        vs = [pos[v] for v in f.vertices]
        return abs(sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(vs, vs[1:] + vs[:1])))
    return max(faces, key=area)


# --- well-nested chains ------------------------------------------------------

@pytest.mark.parametrize("k", [1, 3, 5])
def test_concentric_rings_fully_nested(k):
    e, rings = concentric_rings(k)
    v = verify_well_nested_chain(e, NestedChain(rings, "fully"))
    assert v.ok, v.reason
    assert not verify_well_nested_chain(e, NestedChain(rings, "pinched")).ok or k == 1


def test_chain_with_two_shared_vertices_rejected():
    # C4 with both diagonals routed through a middle vertex: the two cycles share 0 and 2
    e = embedding_from_positions(Graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2)]),
                                 [(0, 0), (1, 0), (1, 1), (0, 1), (0.6, 0.4)])
    v = verify_well_nested_chain(e, NestedChain([(0, 1, 2, 4), (0, 1, 2, 3)], "pinched"))
    assert not v.ok
    assert not verify_well_nested_chain(e, NestedChain([(0, 1, 2, 4), (0, 1, 2, 3)], "fully")).ok


def test_pinched_loops_verify_in_pinched_mode():
    e, loops = pinched_loops(4)
    assert verify_well_nested_chain(e, NestedChain(loops, "pinched")).ok
    assert not verify_well_nested_chain(e, NestedChain(loops, "fully")).ok


def test_chain_rejects_noncontractible_cycle():
    e = toroidal_grid(3, 3)
    v = verify_well_nested_chain(e, NestedChain([toroidal_row(3, 3, 0)]))
    assert not v.ok and "contractible" in v.reason


def test_ten_ring_depth():
    e, rings = concentric_rings(10)
    r = max_well_nested_depth(e, budget=5000)
    assert r.depth == 10 and r.exact
    assert verify_well_nested_chain(e, r.chain).ok


def test_tree_plus_edge_depth_one():
    g = Graph(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (3, 5)])
    assert max_well_nested_depth(Embedding.planar_default(g)).depth == 1
    assert max_well_nested_depth(min_euler_genus(Graph(3, [(0, 1), (1, 2)])).witness).depth == 0


@pytest.mark.parametrize("n", [4, 6, 8])
def test_fan_triangulation_depth(n):
    e = fan_triangulation(n)
    # with the drawing's unbounded face as the outer face no pair nests
    pos = [(0.0, 0.0)] + [(math.cos(math.pi * (k - 1) / (n - 1)), math.sin(math.pi * (k - 1) / (n - 1)))
                          for k in range(1, n + 1)]
    assert max_well_nested_depth(e, outer=_outer_face(e, pos=pos).vertices).depth == 1
    # any face may serve as the outer face; a triangle outer face nests a pinched pair
    free = max_well_nested_depth(e)
    assert free.depth == 2 and verify_well_nested_chain(e, free.chain).ok


def _random_plane_graph(rng: random.Random, n: int, extra: int):
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    tri = Delaunay(pts)
    dl = set()
    for s in tri.simplices:
        for a in range(3):
            dl.add(norm_edge(int(s[a]), int(s[(a + 1) % 3])))
    G = nx.Graph(list(dl))
    tree = list(nx.minimum_spanning_edges(G, weight=None, algorithm="prim", data=False))
    rest = sorted(dl - {norm_edge(u, v) for u, v in tree})
    rng.shuffle(rest)
    edges = sorted({norm_edge(u, v) for u, v in tree} | set(rest[:extra]))
    return Graph(n, edges), pts


def _geometric_depths(g: Graph, pts):
    """Longest chains by polygon containment: (fully, vertex pinched, any contact)."""
    G = nx.Graph(list(g.edges))
    cycles = [tuple(c) for c in nx.simple_cycles(G) if len(c) >= 3]
    polys = [Polygon([pts[v] for v in c]) for c in cycles]
    order = sorted(range(len(cycles)), key=lambda i: polys[i].area)
    out = []
    for rule in ("fully", "vertex", "any"):
        best = {}
        for i in order:
            best[i] = 1
            for j in order:
                if j == i or polys[j].area >= polys[i].area:
                    continue
                if not polys[i].buffer(1e-9).covers(polys[j]):
                    continue
                shared = len(set(cycles[i]) & set(cycles[j]))
                if rule == "fully" and shared:
                    continue
                if rule == "vertex" and shared != 1:
                    continue
                best[i] = max(best[i], best[j] + 1)
        out.append(max(best.values(), default=0))
    return out


def test_nested_depth_against_geometric_oracle():
    rng = random.Random(20261016)
    for _ in range(25):
        g, pts = _random_plane_graph(rng, rng.randint(5, 8), rng.randint(1, 4))
        e = embedding_from_positions(g, pts)
        outer = _outer_face(e, pos=pts)
        r = max_well_nested_depth(e, outer=outer.vertices)
        fully, vertex, anyc = _geometric_depths(g, pts)
        assert max(fully, vertex) <= r.depth <= anyc
        if r.chain is not None:
            assert verify_well_nested_chain(e, r.chain).ok


# --- homotopic depth ---------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 5])
def test_band_torus_homotopic_depth(n):
    e, rings = band_torus(n)
    r = max_well_homotopic_depth(e)
    assert r.depth == n
    assert verify_well_nested_chain(e, r.chain).ok


def test_sphere_homotopic_depth_zero():
    e, _ = concentric_rings(3)
    assert max_well_homotopic_depth(e).depth == 0


@pytest.mark.parametrize("shape", [(3, 3), ("bands", 3), ("bands", 4)])
def test_disjoint_noncontractible_within_classes_times_depth(shape):
    e = band_torus(shape[1])[0] if shape[0] == "bands" else toroidal_grid(*shape)
    k, cycles = max_disjoint_noncontractible(e)
    assert k == len(cycles) >= 1
    for c in cycles:
        assert classify_cycle(e, c).kind != CONTRACTIBLE
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            assert not set(cycles[i]) & set(cycles[j])
    classes = homotopy_classes(e, cycles)
    depth = max_well_homotopic_depth(e).depth
    assert k <= len(classes) * depth


# --- isolated paths ----------------------------------------------------------

def test_theta_isolated_paths():
    g = theta_graph(2, 3, 3)
    e = min_euler_genus(g).witness
    r = max_isolated_paths(e, Piece(vertex=0), Piece(vertex=1))
    assert r.value == 3 and r.exact
    assert verify_isolated_paths(e, r.witness).ok


def test_wheel_hub_to_rim_face():
    e = wheel(6)
    rim = _outer_face(e, 6)
    r = max_isolated_paths(e, Piece(vertex=0), Piece(face=rim))
    assert r.value == 6
    assert verify_isolated_paths(e, r.witness).ok
    ok = IsolatedPathSystem(Piece(vertex=0), Piece(face=rim), [(0, 1), (0, 2), (0, 3), (0, 5)])
    # three points are always in some cyclic order, four need not be
    bad = IsolatedPathSystem(Piece(vertex=0), Piece(face=rim), [(0, 1), (0, 3), (0, 2), (0, 5)])
    assert verify_isolated_paths(e, ok).ok
    assert not verify_isolated_paths(e, bad).ok


def test_noncontractible_induced_cycle_rejected():
    e = toroidal_grid(3, 3)
    sys = IsolatedPathSystem(Piece(vertex=0), Piece(vertex=1), [(0, 1), (0, 2, 1)])
    assert not verify_isolated_paths(e, sys).ok


def test_disconnected_pieces_zero():
    g = Graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    e = min_euler_genus(g).witness
    assert max_isolated_paths(e, Piece(vertex=0), Piece(vertex=3)).value == 0


# --- fans --------------------------------------------------------------------

def test_wheel_fan():
    e = wheel(8)
    fan = Fan(Piece(vertex=0), tuple(range(1, 9)), [(0, k) for k in range(1, 9)])
    v = verify_fan(e, fan)
    assert v.ok, v.reason
    assert fan.size == 8


def test_fan_verticals_sharing_vertex_rejected():
    e = wheel(8)
    fan = Fan(Piece(vertex=0), tuple(range(2, 9)), [(0, 1, 2), (0, 2)])
    assert not verify_fan(e, fan).ok


def _arch_gadget(attach):
    n = 4
    edges = [(0, k) for k in range(1, n + 1)] + [(k, k + 1) for k in range(1, n)]
    edges += [(0, 5), (5, 6), (6, 0)] + list(attach)
    pos = [(0, -1)] + [(-1 + 2 * (k - 1) / (n - 1), 1) for k in range(1, n + 1)] + [(3, 3), (-3, 3)]
    e = embedding_from_positions(Graph(7, edges), pos)
    return e, Fan(Piece(vertex=0), (1, 2, 3, 4), [(0, k) for k in range(1, 5)], arch=(0, 5, 6, 0))


@pytest.mark.parametrize("attach,ok", [((), True), (((5, 4),), True), (((5, 4), (6, 1)), False)])
def test_fan_arch_attachments(attach, ok):
    e, fan = _arch_gadget(attach)
    assert verify_fan(e, fan).ok is ok


# --- radius and face selection -----------------------------------------------

def test_radius_examples():
    w = wheel(6)
    rim = _outer_face(w, 6)
    assert radius_of_interior(w, rim.vertices, outer=rim.vertices)[0] == 1
    pg = planar_grid(5, 5)
    ob = _outer_face(pg, 16)
    assert radius_of_interior(pg, grid_boundary(5, 5), outer=ob.vertices)[0] == 2
    tri = _outer_face(w, 3)
    assert radius_of_interior(w, tri.vertices)[0] == 0


def test_selection_keeps_disjoint_faces():
    e, c1, c2 = annulus_band(12)
    s1, s2 = set(c1), set(c2)
    band = sorted((f for f in trace_faces(e) if f.vertex_set & s1 and f.vertex_set & s2
                   and not f.vertex_set <= s1 and not f.vertex_set <= s2), key=lambda f: f.key)
    spaced = band[::3]
    assert faces_almost_disjoint(spaced)
    assert len(select_almost_disjoint_faces(e, c1, c2, spaced)) == len(spaced)
    chosen = select_almost_disjoint_faces(e, c1, c2, band)
    assert len(chosen) == len(band) // 2
    assert faces_almost_disjoint(chosen)


@pytest.mark.parametrize("n", [1, 2, 5, 8, 11])
def test_selection_alternates_along_band(n):
    # n consecutive edge-sharing quadrilaterals of a longer closed band
    e, c1, c2 = annulus_band(n + 3)
    s1, s2 = set(c1), set(c2)
    band = [f for f in trace_faces(e) if f.vertex_set & s1 and f.vertex_set & s2]
    chain = [f for f in band if f.vertex_set & s2 <= set(range(n + 1))]
    assert len(chain) == n
    chosen = select_almost_disjoint_faces(e, c1, c2, chain)
    assert len(chosen) >= math.ceil(n / 2)
    assert faces_almost_disjoint(chosen)


def test_selection_sixth_on_random_bands():
    rng = random.Random(7)
    for _ in range(40):
        e, c1, c2, faces = random_band(rng)
        chosen = select_almost_disjoint_faces(e, c1, c2, faces)
        assert 6 * len(chosen) >= len(faces)
        assert faces_almost_disjoint(chosen)
        assert {f.key for f in chosen} <= {f.key for f in faces}


# --- grids and subdivisions ----------------------------------------------------

def test_hex_grids():
    j1, j2, j3 = (hexagonal_grid(k) for k in (1, 2, 3))
    assert (j1.graph.n, j1.graph.m) == (6, 6)
    assert j2.graph.n == 24
    for j in (j1, j2, j3):
        assert min_euler_genus(j.graph).genus == 0
        assert max(j.graph.degree(v) for v in range(j.graph.n)) <= 3


def test_subdivisions():
    j1, j2 = hexagonal_grid(1).graph, hexagonal_grid(2).graph
    host = planar_grid(4, 2).graph
    w = contains_subdivision(host, j1)
    assert w is not None and w.verify(host, j1)
    host = planar_grid(8, 4).graph
    w = contains_subdivision(host, j2)
    assert w is not None and w.verify(host, j2)
    c6 = Graph(6, [(i, (i + 1) % 6) for i in range(6)])
    k4 = Graph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert contains_subdivision(c6, k4) is None


# --- spanning-tree cycles and nested disks around an edge ---------------------

def test_cycles_on_spanning_tree():
    e = toroidal_grid(3, 3)
    G = nx.Graph(list(e.graph.edges))
    tree = [norm_edge(u, v) for u, v in nx.bfs_edges(G, 0)]
    extra = sorted(set(e.graph.edges) - set(tree))
    out = cycles_on_spanning_tree(tree, 0, extra)
    assert len(out) == len(extra) == e.graph.m - (e.graph.n - 1)
    for (u, v), (stem, cyc) in zip(extra, out):
        assert stem[0] == 0
        ce = {norm_edge(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1])}
        assert norm_edge(u, v) in ce
        assert ce - {norm_edge(u, v)} <= set(tree)
        assert set(stem) & set(cyc)
    kinds = [classify_cycle(e, c).kind for _, c in out]
    assert any(k != CONTRACTIBLE for k in kinds)


def test_disjoint_nested_disks_around_edge():
    # k pairwise disjoint nested contractible cycles whose disks all hold a marked edge
    e, rings = concentric_rings(5)
    marked = norm_edge(rings[0][0], rings[0][1])
    assert verify_well_nested_chain(e, NestedChain(rings, "fully")).ok
    outer = next(f for f in trace_faces(e) if f.vertex_set == set(rings[-1])).vertices
    for c in rings:
        assert marked in interior_of(e, c, outer).Int_edges


# --- nonhomotopic path families on the torus ------------------------------------

def _displacement(rows: int, cols: int, path) -> tuple[int, int]:
    """Lift of a grid walk to Z^2; a-b paths on the torus are homotopic iff lifts agree."""
    di = dj = 0
    for u, v in zip(path, path[1:]):
        (iu, ju), (iv, jv) = divmod(u, cols), divmod(v, cols)
        if iu == iv:
            dj += 1 if jv == (ju + 1) % cols else -1
        else:
            di += 1 if iv == (iu + 1) % rows else -1
    return di, dj


@pytest.mark.parametrize("shape", [(3, 3), (3, 4)])
def test_nonhomotopic_path_families_on_torus(shape):
    from exminors.structures import max_nonhomotopic_paths
    e = toroidal_grid(*shape)
    best = 0
    for b in range(1, e.graph.n):
        k, paths = max_nonhomotopic_paths(e, 0, b)
        assert k == len(paths)
        lifts = {_displacement(*shape, p) for p in paths}
        assert len(lifts) == k
        for i in range(k):
            for j in range(i + 1, k):
                assert not set(paths[i][1:-1]) & set(paths[j][1:-1])
        best = max(best, k)
    # P_0..P_k with k <= 3g - 3 = 3 allows four paths at Euler genus 2
    assert best <= 4
    assert best == (3 if shape == (3, 3) else 4)


def test_nonhomotopic_cycles_through_vertex():
    from exminors.structures import max_nonhomotopic_paths
    e = toroidal_grid(3, 3)
    k, cycles = max_nonhomotopic_paths(e, 0, 0)
    assert k == 2
    assert len({_displacement(3, 3, c) for c in cycles}) == 2
