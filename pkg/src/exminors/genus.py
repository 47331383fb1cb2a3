"""Exact minimum Euler genus by branch and bound over rotation systems.

The search assigns vertices in BFS order. A vertex receives a rotation and
signs for its not-yet-signed non-tree edges (tree edges are fixed at +1, so
every local-change class is visited once). Once a vertex is assigned, every
face-tracing transition through it is known, so the transitions are linked
into partial face chains. Closed chains are finished faces; the open chains
give an upper bound on how many faces can still appear, because every face
of a graph with minimum degree 2 has length at least its girth.

Targets are tried in increasing genus starting at the Euler lower bound,
so the first success is optimal. Graphs are split into blocks first
(Euler genus is additive over blocks).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import permutations, product

from .embedding import (Embedding, SurfaceSpec, component_genus, is_orientable_embedding,
                        _cyclic_reverse)
from .errors import BudgetExceeded, PreconditionError
from .faceset import FaceSetSearch, usable
from .graph import Graph, block_edge_partition, norm_edge

DEFAULT_BUDGET = 50_000_000


@dataclass
class GenusResult:
    genus: int | None          # None: no embedding of the requested type exists
    witness: Embedding | None
    exact: bool
    lower_bound: int
    nodes: int = 0
    transcript: str = ""
    restrict: str | None = None
    stats: list = field(default_factory=list)


class _Search:
    """Branch and bound for one 2-connected block."""

    def __init__(self, g: Graph, budget: int) -> None:
        self.g = g
        self.budget = budget
        self.nodes = 0
        order, parent = g.bfs_tree(0)
        self.order = order
        pos = {v: i for i, v in enumerate(order)}
        tree = {norm_edge(v, parent[v]) for v in range(g.n) if parent[v] >= 0}
        self.girth = g.girth() or 3
        darts = {}
        for u, v in g.edges:
            darts[(u, v)] = len(darts)
            darts[(v, u)] = len(darts)
        self.nstates = 2 * len(darts)

        def state(u: int, v: int, s: int) -> int:
            return 2 * darts[(u, v)] + (0 if s == 1 else 1)

        pivot = next((v for v in order if g.degree(v) >= 3), None)
        signed: set = set(tree)
        self.levels = []
        for v in order:
            nbrs = g.neighbors(v)
            new = [w for w in nbrs if norm_edge(v, w) not in signed]
            signed.update(norm_edge(v, w) for w in new)
            if len(nbrs) <= 2:
                rots = [tuple(nbrs)]
            else:
                rots = [(nbrs[0],) + p for p in permutations(nbrs[1:])]
                if v == pivot:
                    rots = [r for r in rots if r < _cyclic_reverse(r)]
            self.levels.append((v, nbrs, new, rots, state))
        self.remaining_free = []
        acc = 0
        for lev in reversed(self.levels):
            self.remaining_free.append(acc)
            acc += len(lev[2])
        self.remaining_free.reverse()
        self.free_total = acc
        self._pos = pos

    def _options(self, i: int, mode: str | None):
        v, nbrs, new, rots, state = self.levels[i]
        known = self._signs
        sign_choices = [(1,) * len(new)] if mode == "orientable" else \
            list(product((1, -1), repeat=len(new)))
        for rot in rots:
            k = len(rot)
            where = {w: j for j, w in enumerate(rot)}
            for bits in sign_choices:
                sg = dict(zip(new, bits))
                trans = []
                for u in nbrs:
                    lam = sg[u] if u in sg else known[norm_edge(u, v)]
                    j = where[u]
                    for s in (1, -1):
                        t = s * lam
                        w = rot[(j + t) % k]
                        trans.append((state(u, v, s), state(v, w, t)))
                yield rot, sg, trans

    def run(self, target_faces: int, mode: str | None, exact: bool = False) -> Embedding | None:
        g = self.g
        n = self.nstates
        mate = list(range(n))
        length = [1] * n
        girth = self.girth
        counters = [0, 0, n]  # closed, long, short_total
        if girth <= 1:
            counters = [0, n, 0]
        rotation: dict[int, tuple[int, ...]] = {}
        self._signs = {norm_edge(v, w): 1 for v, w in g.edges}
        negs = [0]
        levels = len(self.levels)

        def rec(i: int) -> bool:
            for rot, sg, trans in self._options(i, mode):
                self.nodes += 1
                if self.nodes > self.budget:
                    raise BudgetExceeded("genus search budget exhausted")
                neg_here = sum(1 for b in sg.values() if b < 0)
                if mode == "nonorientable" and negs[0] + neg_here == 0 and \
                        self.remaining_free[i] == 0:
                    continue
                undo = []
                closed, long_, short = counters
                for x, y in trans:
                    a = mate[x]
                    lx = length[x]
                    if a == y:
                        if lx >= girth:
                            long_ -= 1
                        else:
                            short -= lx
                        closed += 1
                        undo.append(None)
                    else:
                        b = mate[y]
                        ly = length[y]
                        if lx >= girth:
                            long_ -= 1
                        else:
                            short -= lx
                        if ly >= girth:
                            long_ -= 1
                        else:
                            short -= ly
                        tot = lx + ly
                        if tot >= girth:
                            long_ += 1
                        else:
                            short += tot
                        mate[a] = b
                        mate[b] = a
                        length[a] = tot
                        length[b] = tot
                        undo.append((a, b, x, y, lx, ly))
                ok = (closed + long_ + short // girth) // 2 >= target_faces
                found = False
                if ok:
                    saved = counters[:]
                    counters[0], counters[1], counters[2] = closed, long_, short
                    v = self.levels[i][0]
                    rotation[v] = rot
                    for w, b in sg.items():
                        self._signs[norm_edge(v, w)] = b
                    negs[0] += neg_here
                    if i + 1 == levels:
                        found = (closed // 2 == target_faces) if exact else \
                            closed // 2 >= target_faces
                    else:
                        found = rec(i + 1)
                    if found:
                        return True
                    negs[0] -= neg_here
                    for w in sg:
                        self._signs[norm_edge(v, w)] = 1
                    counters[:] = saved
                for rec_ in reversed(undo):
                    if rec_ is None:
                        continue
                    a, b, x, y, lx, ly = rec_
                    mate[a] = x
                    mate[b] = y
                    length[a] = lx
                    length[b] = ly
            return False

        if not rec(0):
            return None
        rot = [rotation[v] for v in range(g.n)]
        signs = tuple(self._signs[e] for e in g.edges)
        return Embedding(g, tuple(rot), signs)


def euler_lower_bound(g: Graph) -> int:
    """max(0, 2 - V + E - floor(2E / girth)) for a connected graph with a cycle."""
    girth = g.girth()
    if girth is None:
        return 0
    return max(0, 2 - g.n + g.m - (2 * g.m) // girth)


def _block_search(g: Graph, mode: str | None, budget: int, start: int | None = None,
                  stop: int | None = None) -> tuple[int | None, Embedding | None, int, int]:
    """Minimum genus of a 2-connected graph (or single edge) under ``mode``.

    Returns (genus, witness, lower_bound, nodes). Genus None means the mode is
    impossible (nonorientable with no cycle).
    """
    if g.m == 1:
        if mode == "nonorientable":
            return None, None, 0, 0
        return 0, Embedding.planar_default(g), 0, 0
    lb = euler_lower_bound(g)
    if start is not None:
        lb = max(lb, start)
    if mode == "nonorientable":
        lb = max(lb, 1)
    if mode == "orientable" and lb % 2:
        lb += 1
    step = 2 if mode == "orientable" else 1
    search = _Search(g, budget)
    extra = 0
    k = lb
    hi = g.m - g.n + 1 if mode != "orientable" else 2 * ((g.m - g.n + 1) // 2)
    hi = max(hi, lb)
    while stop is None or k <= stop:
        target = 2 - g.n + g.m - k
        kmode = "orientable" if k == 0 else mode
        try:
            walks = usable(g, target)
            if walks is not None:
                fs = FaceSetSearch(g, target, budget - search.nodes - extra, walks)
                try:
                    emb = fs.run(kmode)
                finally:
                    extra += fs.nodes
            else:
                emb = search.run(target, kmode)
        except BudgetExceeded as exc:
            exc.partial = (k, search.nodes + extra)
            raise
        if emb is not None:
            return k, emb, lb, search.nodes + extra
        k += step
        if k > hi + 2:
            raise AssertionError("no embedding found up to the cycle-rank bound")
    return None, None, lb, search.nodes


def combine_block_embeddings(g: Graph, parts: list[tuple[Embedding, list[int]]]) -> Embedding:
    """Glue block embeddings at cut vertices by concatenating rotation segments."""
    rot: list[list[int]] = [[] for _ in range(g.n)]
    sig = {}
    for emb, vmap in parts:
        for lv, r in enumerate(emb.rotation):
            rot[vmap[lv]].extend(vmap[w] for w in r)
        for (a, b), s in zip(emb.graph.edges, emb.signs):
            sig[norm_edge(vmap[a], vmap[b])] = s
    return Embedding.from_maps(g, rot, sig)


def _transcript(g: Graph, mode, stats) -> str:
    h = hashlib.sha256()
    h.update(repr((g.n, g.edges, mode, stats)).encode())
    return h.hexdigest()


def min_euler_genus(g: Graph, restrict: str | None = None,
                    budget: int = DEFAULT_BUDGET) -> GenusResult:
    """Minimum Euler genus, optionally over orientable or nonorientable embeddings.

    Disconnected graphs are handled componentwise (genus adds up). When the
    budget runs out the result is flagged inexact and carries the best known
    lower bound; the genus field then holds an upper bound from the default
    embedding.
    """
    if restrict not in (None, "orientable", "nonorientable"):
        raise PreconditionError(f"unknown restriction {restrict!r}")
    blocks = block_edge_partition(g)
    parts = []
    stats = []
    total = 0
    lower = 0
    nodes = 0
    try:
        base = []
        for b in blocks:
            sub, vmap = g.edge_subgraph(b)
            mode = "orientable" if restrict == "orientable" else None
            k, emb, lb, nd = _block_search(sub, mode, budget - nodes)
            nodes += nd
            base.append((sub, vmap, k, emb))
            lower += k
            stats.append((len(b), k, nd))
        if restrict == "nonorientable":
            cyclic = [i for i, (sub, _, _, _) in enumerate(base) if sub.m > 1]
            if not cyclic:
                return GenusResult(None, None, True, 0, nodes, _transcript(g, restrict, stats),
                                   restrict, stats)
            chosen = None
            for i in cyclic:
                sub, vmap, k, _ = base[i]
                kk, emb, _, nd = _block_search(sub, "nonorientable", budget - nodes, start=k, stop=k)
                nodes += nd
                if kk is not None:
                    chosen = (i, kk, emb)
                    break
            if chosen is None:
                i = cyclic[0]
                sub, vmap, k, _ = base[i]
                kk, emb, _, nd = _block_search(sub, "nonorientable", budget - nodes, start=k + 1)
                nodes += nd
                chosen = (i, kk, emb)
            i, kk, emb = chosen
            sub, vmap, k, _ = base[i]
            base[i] = (sub, vmap, kk, emb)
            lower = sum(x[2] for x in base)
        total = sum(x[2] for x in base)
        parts = [(emb, vmap) for _, vmap, _, emb in base]
    except BudgetExceeded:
        fallback = Embedding.planar_default(g)
        if restrict == "nonorientable" and g.m > 0:
            fallback = None
        ub = component_genus(fallback) if fallback is not None and g.n else None
        return GenusResult(ub, fallback, False, lower, nodes, _transcript(g, restrict, stats),
                           restrict, stats)
    witness = combine_block_embeddings(g, parts) if g.n else None
    if witness is not None:
        assert component_genus(witness) == total
        if restrict == "orientable":
            assert is_orientable_embedding(witness)
        if restrict == "nonorientable":
            assert not is_orientable_embedding(witness)
    return GenusResult(total, witness, True, total, nodes, _transcript(g, restrict, stats),
                       restrict, stats)


def _block_parts(g: Graph) -> list[tuple[Graph, list[int]]]:
    return [g.edge_subgraph(b) for b in block_edge_partition(g)]


def _flip_to_nonorientable(e: Embedding) -> Embedding | None:
    """Flip one edge lying on two distinct faces: Euler genus +1, now nonorientable."""
    from .embedding import trace_faces
    faces = trace_faces(e, require_connected=False)
    where: dict = {}
    for i, f in enumerate(faces):
        for x in f.edges:
            where.setdefault(x, set()).add(i)
    for x in e.graph.edges:
        if len(where.get(x, ())) == 2:
            sig = e.signature_map()
            sig[x] = -sig[x]
            out = Embedding.from_maps(e.graph, e.rotation, sig)
            if not is_orientable_embedding(out) and \
                    component_genus(out) == component_genus(e) + 1:
                return out
    return None


@dataclass
class Embeddability:
    embeds: bool
    witness: Embedding | None
    nodes: int
    transcript: str


def decide_embedding(g: Graph, s: SurfaceSpec, budget: int = DEFAULT_BUDGET) -> Embeddability:
    """Embeddability means genus <= that of s with matching type.

    Planar graphs embed in every surface; the witness then still has the
    surface's orientability whenever the graph has a cycle. Each block is
    searched only up to the genus left over by the other blocks' lower
    bounds. Raises BudgetExceeded if undecided.
    """
    stats: list = []
    nodes = 0

    def done(ok: bool, witness: Embedding | None) -> Embeddability:
        return Embeddability(ok, witness, nodes, _transcript(g, s.name, stats))

    if g.n == 0:
        return done(True, None)
    parts = _block_parts(g)
    orient = s.orientable
    mode = "orientable" if orient else None
    lbs = []
    for sub, _ in parts:
        lb = euler_lower_bound(sub) if sub.m > 1 else 0
        if orient and lb % 2:
            lb += 1
        lbs.append(lb)
    if sum(lbs) > s.euler_genus:
        return done(False, None)
    found = []
    used = 0
    for idx, (sub, vmap) in enumerate(parts):
        room = s.euler_genus - used - sum(lbs[idx + 1:])
        try:
            k, emb, _, nd = _block_search(sub, mode, budget - nodes, stop=room)
        except BudgetExceeded:
            raise BudgetExceeded("embeddability undecided within budget") from None
        nodes += nd
        stats.append((sub.m, k, nd))
        if k is None:
            return done(False, None)
        found.append((sub, vmap, k, emb))
        used += k
    total = used
    cyclic = [i for i, (sub, _, _, _) in enumerate(found) if sub.m > 1]
    if orient or not cyclic:
        emb = combine_block_embeddings(g, [(e, vm) for _, vm, _, e in found])
        return done(True, emb)
    # nonorientable target: some block must carry a crosscap
    for i in cyclic:
        sub, vmap, k, emb = found[i]
        if not is_orientable_embedding(emb):
            return done(True, combine_block_embeddings(g, [(e, vm) for _, vm, _, e in found]))
    for i in cyclic:
        sub, vmap, k, emb = found[i]
        try:
            kk, nemb, _, nd = _block_search(sub, "nonorientable", budget - nodes, start=k, stop=k)
        except BudgetExceeded:
            raise BudgetExceeded("embeddability undecided within budget") from None
        nodes += nd
        if kk is not None:
            found[i] = (sub, vmap, kk, nemb)
            return done(True, combine_block_embeddings(g, [(e, vm) for _, vm, _, e in found]))
    if total + 1 > s.euler_genus:
        return done(False, None)
    i = cyclic[0]
    sub, vmap, k, emb = found[i]
    nemb = _flip_to_nonorientable(emb)
    if nemb is None:
        kk, nemb, _, _ = _block_search(sub, "nonorientable", budget - nodes, start=k + 1, stop=k + 1)
    found[i] = (sub, vmap, k + 1, nemb)
    return done(True, combine_block_embeddings(g, [(e, vm) for _, vm, _, e in found]))


def embeds_in_surface(g: Graph, s: SurfaceSpec, budget: int = DEFAULT_BUDGET):
    """(verdict, witness); see decide_embedding."""
    r = decide_embedding(g, s, budget)
    return r.embeds, r.witness


def two_core(g: Graph) -> tuple[Graph, list[int]]:
    """Repeatedly strip degree <= 1 vertices; returns the core and its new->old map."""
    deg = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    stack = [v for v in range(g.n) if deg[v] <= 1]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for w in g.neighbors(v):
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(w)
    return g.induced_subgraph([v for v in range(g.n) if alive[v]])


def embeds_exactly(g: Graph, s: SurfaceSpec, budget: int = DEFAULT_BUDGET):
    """(verdict, witness): some cellular embedding of matching type has exactly the genus of s.

    Decided by an exact face-count search on the 2-core (pendant trees do
    not change face counts). Requires a connected graph.
    """
    if not g.is_connected():
        raise PreconditionError("exact embeddability is defined for connected graphs")
    core, _ = two_core(g)
    if core.n == 0:
        ok = s.euler_genus == 0
        return ok, (Embedding.planar_default(g) if ok else None)
    faces = 2 - core.n + core.m - s.euler_genus
    if faces < 1:
        return False, None
    mode = "orientable" if s.orientable else "nonorientable"
    walks = usable(core, faces)
    if walks is not None:
        emb = FaceSetSearch(core, faces, budget, walks).run(mode)
    else:
        emb = _Search(core, budget).run(faces, mode, exact=True)
    return emb is not None, emb


def maximum_genus_bound(g: Graph, orientable: bool) -> int:
    """Upper bound on the Euler genus of a cellular embedding (at least one face)."""
    comps = len(g.components())
    beta = g.m - g.n + comps
    if orientable:
        return 2 * (beta // 2)
    return beta
