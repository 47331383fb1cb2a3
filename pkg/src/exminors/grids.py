"""Gadget graphs with fixed embeddings, hexagonal patches and subdivision search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .embedding import Embedding
from .errors import BudgetExceeded, InputError
from .graph import Graph, norm_edge


def embedding_from_positions(g: Graph, pos: Sequence[tuple[float, float]]) -> Embedding:
    """Counterclockwise rotations of a straight-line drawing; all signs positive."""
    rot = []
    for v in range(g.n):
        x0, y0 = pos[v]
        rot.append(sorted(g.neighbors(v),
                          key=lambda w: math.atan2(pos[w][1] - y0, pos[w][0] - x0)))
    return Embedding.from_maps(g, rot)


def toroidal_grid(rows: int, cols: int) -> Embedding:
    """C_rows x C_cols on the torus; vertex (i, j) is i*cols + j, faces are the unit squares."""
    if rows < 3 or cols < 3:
        raise InputError("toroidal grid needs at least 3 rows and 3 columns")
    idx = lambda i, j: (i % rows) * cols + (j % cols)
    edges = set()
    for i in range(rows):
        for j in range(cols):
            edges.add(norm_edge(idx(i, j), idx(i, j + 1)))
            edges.add(norm_edge(idx(i, j), idx(i + 1, j)))
    g = Graph(rows * cols, sorted(edges))
    rot = [[idx(i, j + 1), idx(i - 1, j), idx(i, j - 1), idx(i + 1, j)]
           for i in range(rows) for j in range(cols)]
    return Embedding.from_maps(g, rot)


def toroidal_row(rows: int, cols: int, i: int) -> tuple[int, ...]:
    """The i-th horizontal ring of toroidal_grid(rows, cols)."""
    return tuple((i % rows) * cols + j for j in range(cols))


def toroidal_column(rows: int, cols: int, j: int) -> tuple[int, ...]:
    return tuple(i * cols + (j % cols) for i in range(rows))


def band_torus(bands: int, length: int = 3) -> tuple[Embedding, list[tuple[int, ...]]]:
    """n parallel rings on the torus joined by a single rung between consecutive rings.

    This is the toroidal grid restricted to its rows and to column 0; each
    pair of consecutive rings bounds one face. Returns the rings in order.
    """
    from .embedding import induced_embedding
    if bands < 3:
        # two bands would need a doubled rung; one ring alone is not cellular
        raise InputError("band torus needs at least 3 bands")
    full = toroidal_grid(bands, length)
    keep = set()
    for i in range(bands):
        ring = toroidal_row(bands, length, i)
        keep |= {norm_edge(ring[j], ring[(j + 1) % length]) for j in range(length)}
        keep.add(norm_edge(i * length, ((i + 1) % bands) * length))
    emb, _ = induced_embedding(full, edges=keep)
    return emb, [toroidal_row(bands, length, i) for i in range(bands)]


def planar_grid(rows: int, cols: int) -> Embedding:
    """rows x cols vertex grid drawn in the plane; vertex (i, j) is i*cols + j."""
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    g = Graph(rows * cols, edges)
    return embedding_from_positions(g, [(j, -i) for i in range(rows) for j in range(cols)])


def grid_boundary(rows: int, cols: int) -> tuple[int, ...]:
    top = [j for j in range(cols)]
    right = [i * cols + cols - 1 for i in range(1, rows)]
    bottom = [(rows - 1) * cols + j for j in range(cols - 2, -1, -1)]
    left = [i * cols for i in range(rows - 2, 0, -1)]
    return tuple(top + right + bottom + left)


def wheel(n: int) -> Embedding:
    """Hub 0 and rim 1..n drawn in the plane."""
    from .graph import wheel_graph
    g = wheel_graph(n)
    pos = [(0.0, 0.0)] + [(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n))
                          for k in range(n)]
    return embedding_from_positions(g, pos)


def concentric_rings(rings: int, length: int = 4, spokes: int = 1) -> tuple[Embedding, list[tuple[int, ...]]]:
    """Nested cycles of the given length joined by ``spokes`` radial edges per layer.

    Ring i (innermost is 0) uses vertices i*length .. i*length+length-1.
    Returns the planar embedding and the rings, innermost first.
    """
    if length < 3 or rings < 1 or not 0 <= spokes <= length:
        raise InputError("bad concentric ring parameters")
    edges = []
    ringlist = []
    for i in range(rings):
        ring = tuple(i * length + j for j in range(length))
        ringlist.append(ring)
        for j in range(length):
            edges.append((ring[j], ring[(j + 1) % length]))
        if i + 1 < rings:
            for s in range(spokes):
                j = s * length // max(spokes, 1)
                edges.append((ring[j], ring[j] + length))
    g = Graph(rings * length, edges)
    pos = []
    for i in range(rings):
        for j in range(length):
            a = 2 * math.pi * j / length
            pos.append(((i + 1) * math.cos(a), (i + 1) * math.sin(a)))
    return embedding_from_positions(g, pos), ringlist


def pinched_loops(loops: int) -> tuple[Embedding, list[tuple[int, ...]]]:
    """Triangles through a common vertex 0, drawn nested inside each other.

    Loop i is (0, 2i+1, 2i+2); consecutive loops meet only in vertex 0.
    """
    edges = []
    cycles = []
    for i in range(loops):
        a, b = 2 * i + 1, 2 * i + 2
        edges += [(0, a), (a, b), (0, b)]
        cycles.append((0, a, b))
    g = Graph(2 * loops + 1, edges)
    rot0 = [2 * i + 1 for i in reversed(range(loops))] + [2 * i + 2 for i in range(loops)]
    rot = [rot0]
    for i in range(loops):
        a, b = 2 * i + 1, 2 * i + 2
        rot += [[0, b], [a, 0]]
    return Embedding.from_maps(g, rot), cycles


def fan_triangulation(n: int) -> Embedding:
    """Polygon 1..n with every vertex joined to apex 0 (apex on the boundary side)."""
    edges = [(0, k) for k in range(1, n + 1)] + [(k, k + 1) for k in range(1, n)]
    g = Graph(n + 1, edges)
    pos = [(0.0, 0.0)] + [(math.cos(math.pi * (k - 1) / (n - 1)), math.sin(math.pi * (k - 1) / (n - 1)))
                          for k in range(1, n + 1)]
    return embedding_from_positions(g, pos)


def prism(k: int) -> Embedding:
    """Ladder ring C_k x K2: outer cycle 0..k-1, inner cycle k..2k-1, rungs i -- k+i."""
    edges = [(i, (i + 1) % k) for i in range(k)] + [(k + i, k + (i + 1) % k) for i in range(k)]
    edges += [(i, k + i) for i in range(k)]
    g = Graph(2 * k, edges)
    pos = [(2 * math.cos(2 * math.pi * i / k), 2 * math.sin(2 * math.pi * i / k)) for i in range(k)]
    pos += [(math.cos(2 * math.pi * i / k), math.sin(2 * math.pi * i / k)) for i in range(k)]
    return embedding_from_positions(g, pos)


def annulus_band(n: int, width: int = 1) -> tuple[Embedding, tuple[int, ...], tuple[int, ...]]:
    """Planar band of n x width quadrilaterals between an outer and an inner n-cycle."""
    emb, rings = concentric_rings(width + 1, n, n)
    return emb, rings[-1], rings[0]


# ---------------------------------------------------------------------------
# hexagonal patches

_HEX_DIRS = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)]


def _hex_center(c: tuple[int, int]) -> tuple[float, float]:
    q, r = c
    return (math.sqrt(3) * (q + r / 2), 1.5 * r)


@dataclass
class HexPatch:
    graph: Graph
    embedding: Embedding
    boundary: tuple[int, ...]
    cells: list[tuple[int, int]]


def hexagonal_grid(k: int) -> HexPatch:
    """J_1 is one hexagon; J_k adds every hexagon of the tiling that meets J_{k-1}."""
    if k < 1:
        raise InputError("k must be positive")
    if k > 30:
        raise InputError("k above desk limit 30")
    cells = {(0, 0)}
    for _ in range(k - 1):
        grow = set()
        for q, r in cells:
            for dq, dr in _HEX_DIRS:
                grow.add((q + dq, r + dr))
        cells |= grow

    def corners(c):
        q, r = c
        out = []
        for i in range(6):
            a = _HEX_DIRS[i]
            b = _HEX_DIRS[(i + 1) % 6]
            out.append(frozenset({(q, r), (q + a[0], r + a[1]), (q + b[0], r + b[1])}))
        return out

    verts: dict[frozenset, int] = {}
    raw_edges = {}
    for c in sorted(cells):
        cs = corners(c)
        for x in cs:
            verts.setdefault(x, -1)
        for i in range(6):
            key = frozenset({cs[i], cs[(i + 1) % 6]})
            raw_edges[key] = raw_edges.get(key, 0) + 1
    pos_of = {x: tuple(sum(_hex_center(c)[t] for c in x) / 3 for t in (0, 1)) for x in verts}
    order = sorted(verts, key=lambda x: (round(-pos_of[x][1], 6), round(pos_of[x][0], 6)))
    for i, x in enumerate(order):
        verts[x] = i
    edges = [tuple(sorted(verts[x] for x in key)) for key in raw_edges]
    g = Graph(len(order), edges)
    emb = embedding_from_positions(g, [pos_of[x] for x in order])
    # boundary: edges lying on exactly one hexagon of the patch
    bedges = [tuple(sorted(verts[x] for x in key)) for key, cnt in raw_edges.items() if cnt == 1]
    adj: dict[int, list[int]] = {}
    for u, v in bedges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = min(adj)
    cyc = [start]
    prev, cur = None, start
    while True:
        nxt = [w for w in sorted(adj[cur]) if w != prev]
        w = nxt[0]
        if w == start:
            break
        cyc.append(w)
        prev, cur = cur, w
    return HexPatch(g, emb, tuple(cyc), sorted(cells))


# ---------------------------------------------------------------------------
# subdivision (topological minor) search


@dataclass
class SubdivisionWitness:
    branch: dict[int, int]                 # pattern branch vertex -> host vertex
    paths: list[tuple[int, ...]]           # host paths, one per pattern thread
    threads: list[tuple[int, ...]]         # pattern threads (vertex sequences)

    def verify(self, host: Graph, pattern: Graph) -> bool:
        images = list(self.branch.values())
        if len(set(images)) != len(images):
            return False
        inner_seen: set[int] = set()
        for thread, path in zip(self.threads, self.paths):
            if len(path) < len(thread):
                return False
            if path[0] != self.branch[thread[0]] or path[-1] != self.branch[thread[-1]]:
                return False
            if any(not host.has_edge(a, b) for a, b in zip(path, path[1:])):
                return False
            for x in path[1:-1]:
                if x in inner_seen or x in self.branch.values():
                    return False
                inner_seen.add(x)
        return True


def _threads(p: Graph) -> tuple[list[int], list[tuple[int, ...]]]:
    """Branch vertices (degree != 2) and maximal threads between them.

    A component that is a bare cycle becomes one closed thread starting and
    ending at its smallest vertex, which is then treated as a branch vertex.
    """
    branch = [v for v in range(p.n) if p.degree(v) != 2]
    bset = set(branch)
    seen_edges = set()
    threads = []
    for comp in p.components():
        if all(p.degree(v) == 2 for v in comp):
            s = min(comp)
            bset.add(s)
            branch.append(s)
    for s in sorted(bset):
        for w in p.neighbors(s):
            e = norm_edge(s, w)
            if e in seen_edges:
                continue
            path = [s, w]
            seen_edges.add(e)
            while path[-1] not in bset:
                x = path[-1]
                nxt = [y for y in p.neighbors(x) if norm_edge(x, y) not in seen_edges][0]
                seen_edges.add(norm_edge(x, nxt))
                path.append(nxt)
            threads.append(tuple(path))
    return sorted(set(branch)), threads


def contains_subdivision(host: Graph, pattern: Graph, budget: int = 5_000_000) -> SubdivisionWitness | None:
    """Backtracking search for a subdivision of pattern inside host.

    Threads are routed one at a time from an already placed branch vertex.
    Every host path may exceed its thread's length only by the global slack
    host.n - pattern.n, and placed branch vertices keep enough free
    neighbours for their unrouted threads.
    """
    from collections import deque

    branch, threads = _threads(pattern)
    if pattern.m > host.m or pattern.n > host.n:
        return None
    if not threads:
        return SubdivisionWitness({v: v for v in branch}, [], [])
    hdeg = [host.degree(v) for v in range(host.n)]
    pdeg = {v: pattern.degree(v) for v in branch}
    pd = sorted(pdeg.values(), reverse=True)
    hd = sorted(hdeg, reverse=True)
    if any(a > b for a, b in zip(pd, hd)):
        return None
    slack0 = host.n - pattern.n
    inc: dict[int, list[int]] = {v: [] for v in branch}
    for t, th in enumerate(threads):
        inc[th[0]].append(t)
        inc[th[-1]].append(t)
    mapping: dict[int, int] = {}
    image_of: dict[int, int] = {}
    used: set[int] = set()
    routed: dict[int, tuple[int, ...]] = {}
    nodes = 0

    def tick() -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"subdivision search exceeded {budget} nodes")

    def feasible() -> bool:
        for b, x in mapping.items():
            pending = [t for t in inc[b] if t not in routed]
            if not pending:
                continue
            partners = set()
            for t in pending:
                th = threads[t]
                other = th[-1] if th[0] == b else th[0]
                if other in mapping and len(th) == 2:
                    partners.add(mapping[other])
            avail = sum(1 for w in host.neighbors(x) if w not in used or w in partners)
            if avail < len(pending):
                return False
        return True

    def dist_to(target: int) -> dict[int, int]:
        dist = {target: 0}
        dq = deque([target])
        while dq:
            x = dq.popleft()
            for y in host.neighbors(x):
                if y not in dist and y not in used:
                    dist[y] = dist[x] + 1
                    dq.append(y)
        return dist

    def routes_between(a: int, b: int, lo: int, hi: int, closed: bool):
        dist = dist_to(b)
        stack = [(a, (a,))]
        while stack:
            x, path = stack.pop()
            nxt = []
            for y in host.neighbors(x):
                if y == b and len(path) >= lo and (not closed or len(path) >= 3):
                    yield path + (b,)
                elif y not in used and y not in path and y != b and y in dist \
                        and len(path) + dist[y] <= hi:
                    nxt.append(y)
            nxt.sort(key=lambda y: -dist[y])
            for y in nxt:
                stack.append((y, path + (y,)))

    def routes_open(a: int, lo: int, hi: int, deg: int):
        stack = [(a, (a,))]
        while stack:
            x, path = stack.pop()
            for y in sorted(host.neighbors(x), reverse=True):
                if y in used or y in path:
                    continue
                if len(path) >= lo and hdeg[y] >= deg:
                    yield path + (y,)
                if len(path) < hi:
                    stack.append((y, path + (y,)))

    def pick() -> int | None:
        best = None
        for t, th in enumerate(threads):
            if t in routed:
                continue
            score = (th[0] in mapping) + (th[-1] in mapping)
            if score == 0:
                continue
            key = (score, -len(th), -t)
            if best is None or key > best[0]:
                best = (key, t)
        return None if best is None else best[1]

    def extra_used() -> int:
        return sum(len(p) - len(threads[t]) for t, p in routed.items())

    def solve() -> bool:
        tick()
        if len(routed) == len(threads):
            return True
        t = pick()
        if t is None:
            # a new component of the pattern: seed its first thread
            t = next(i for i in range(len(threads)) if i not in routed)
            b0 = threads[t][0]
            for x in range(host.n):
                if x in used or hdeg[x] < pdeg[b0]:
                    continue
                mapping[b0] = x
                used.add(x)
                if feasible() and solve():
                    return True
                del mapping[b0]
                used.discard(x)
            return False
        th = threads[t]
        need = len(th) - 1
        slack = slack0 - extra_used()
        a, b = th[0], th[-1]
        if a not in mapping:
            a, b = b, a
        x = mapping[a]
        if b in mapping:
            gen = routes_between(x, mapping[b], need, need + slack, a == b)
            for path in gen:
                inner = path[1:-1]
                used.update(inner)
                routed[t] = path if path[0] == mapping[th[0]] else path[::-1]
                if feasible() and solve():
                    return True
                del routed[t]
                used.difference_update(inner)
                tick()
            return False
        for path in routes_open(x, need, need + slack, pdeg[b]):
            y = path[-1]
            inner = path[1:-1]
            mapping[b] = y
            used.add(y)
            used.update(inner)
            routed[t] = path if th[0] == a else path[::-1]
            if feasible() and solve():
                return True
            del routed[t]
            used.difference_update(inner)
            used.discard(y)
            del mapping[b]
            tick()
        return False

    start = max(branch, key=lambda v: (pdeg[v], -v))
    for x in sorted(range(host.n), key=lambda h: (-hdeg[h], h)):
        if hdeg[x] < pdeg[start]:
            continue
        mapping[start] = x
        used.add(x)
        if solve():
            return SubdivisionWitness(dict(mapping), [routed[t] for t in range(len(threads))],
                                      threads)
        del mapping[start]
        used.discard(x)
    return None
