"""Cycle surgery on embedded graphs: sides, classification, cutting, homotopy."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .embedding import (Embedding, FacialWalk, apply_local_changes, component_genus,
                        cyclic_key, induced_embedding, trace_faces)
from .errors import InputError, PreconditionError
from .graph import Edge, Graph, norm_edge

ONE_SIDED = "one-sided"
NONSEPARATING = "nonseparating"
SEPARATING_NONCONTRACTIBLE = "separating-noncontractible"
CONTRACTIBLE = "contractible"


def as_cycle(g: Graph, vertices: Sequence[int]) -> tuple[int, ...]:
    """Validate a cycle given as a vertex list v0..v_{l-1} (closing edge implied)."""
    vs = tuple(int(v) for v in vertices)
    if len(vs) >= 2 and vs[0] == vs[-1]:
        vs = vs[:-1]
    if len(vs) < 3:
        raise InputError("a cycle needs at least 3 vertices")
    if len(set(vs)) != len(vs):
        raise InputError("cycle vertices must be distinct")
    for i, v in enumerate(vs):
        w = vs[(i + 1) % len(vs)]
        if not g.has_edge(v, w):
            raise InputError(f"{v}-{w} is not an edge of the graph")
    return vs


def cycle_edges(c: Sequence[int]) -> list[Edge]:
    return [norm_edge(c[i], c[(i + 1) % len(c)]) for i in range(len(c))]


def cycle_signature(e: Embedding, c: Sequence[int]) -> int:
    c = as_cycle(e.graph, c)
    p = 1
    for u, v in cycle_edges(c):
        p *= e.sign(u, v)
    return p


def normalize_along(e: Embedding, c: Sequence[int]) -> tuple[Embedding, frozenset[int]]:
    """Local changes making e_1..e_{l-1} positive (e_i = v_{i-1} v_i); e_l keeps λ(C)."""
    l = len(c)
    flips: set[int] = set()
    cur = e
    for i in range(1, l):
        u, v = c[i - 1], c[i]
        s = cur.sign(u, v)
        if s < 0:
            cur = apply_local_changes(cur, [v])
            flips ^= {v}
    return cur, frozenset(flips)


@dataclass
class SideDecomposition:
    cycle: tuple[int, ...]
    normalized: Embedding
    flips: frozenset[int]
    side_at: dict[tuple[int, int], str]          # (cycle vertex, neighbour) -> "L" | "R"
    bridges: list[dict] = field(default_factory=list)   # each: edges, attach sides
    left_edges: frozenset[Edge] = frozenset()
    right_edges: frozenset[Edge] = frozenset()

    @property
    def separating(self) -> bool:
        return not (self.left_edges & self.right_edges)


def _sides_at(e: Embedding, c: Sequence[int]) -> dict[tuple[int, int], str]:
    l = len(c)
    out = {}
    for i in range(l):
        v = c[i]
        prev, nxt = c[i - 1], c[(i + 1) % l]
        rot = e.rotation[v]
        k = len(rot)
        j = rot.index(prev)
        side = "L"
        for step in range(1, k):
            w = rot[(j + step) % k]
            if w == nxt:
                side = "R"
                continue
            out[(v, w)] = side
    return out


def _bridges(g: Graph, c: Sequence[int]) -> list[set[Edge]]:
    on = set(c)
    cedges = set(cycle_edges(c))
    bridges: list[set[Edge]] = []
    seen: set[int] = set()
    for u, v in g.edges:
        if (u, v) in cedges:
            continue
        if u in on and v in on:
            bridges.append({(u, v)})
    for s in range(g.n):
        if s in on or s in seen:
            continue
        comp = {s}
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y not in on and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        es = {norm_edge(x, y) for x in comp for y in g.neighbors(x)}
        bridges.append(es)
    return bridges


def side_graphs(e: Embedding, c: Sequence[int]) -> SideDecomposition:
    c = as_cycle(e.graph, c)
    if cycle_signature(e, c) != 1:
        raise PreconditionError("side graphs need a two-sided cycle")
    ne, flips = normalize_along(e, c)
    side_at = _sides_at(ne, c)
    on = set(c)
    left: set[Edge] = set()
    right: set[Edge] = set()
    bridges = []
    for b in _bridges(e.graph, c):
        sides = set()
        for u, v in b:
            if u in on:
                sides.add(side_at[(u, v)])
            if v in on:
                sides.add(side_at[(v, u)])
        bridges.append({"edges": sorted(b), "sides": "".join(sorted(sides))})
        if "L" in sides:
            left |= b
        if "R" in sides:
            right |= b
    return SideDecomposition(c, ne, flips, side_at, bridges, frozenset(left), frozenset(right))


def _side_genus(e: Embedding, c: Sequence[int], edges) -> int:
    sub, _ = induced_embedding(e, edges=set(edges) | set(cycle_edges(c)))
    return component_genus(sub)


@dataclass
class CycleClass:
    kind: str
    signature: int
    left_genus: int | None = None
    right_genus: int | None = None
    sides: SideDecomposition | None = None


def classify_cycle(e: Embedding, c: Sequence[int]) -> CycleClass:
    c = as_cycle(e.graph, c)
    sig = cycle_signature(e, c)
    if sig != 1:
        return CycleClass(ONE_SIDED, sig)
    sd = side_graphs(e, c)
    if not sd.separating:
        return CycleClass(NONSEPARATING, sig, sides=sd)
    gl = _side_genus(sd.normalized, c, sd.left_edges)
    gr = _side_genus(sd.normalized, c, sd.right_edges)
    kind = CONTRACTIBLE if 0 in (gl, gr) else SEPARATING_NONCONTRACTIBLE
    return CycleClass(kind, sig, gl, gr, sd)


def is_contractible(e: Embedding, c: Sequence[int]) -> bool:
    return classify_cycle(e, c).kind == CONTRACTIBLE


@dataclass
class Interior:
    cycle: tuple[int, ...]
    int_edges: frozenset[Edge]
    ext_edges: frozenset[Edge]
    side: str  # "L" or "R" in the normalised embedding

    @property
    def Int_edges(self) -> frozenset[Edge]:
        return self.int_edges | frozenset(cycle_edges(self.cycle))

    @property
    def Ext_edges(self) -> frozenset[Edge]:
        return self.ext_edges | frozenset(cycle_edges(self.cycle))

    @property
    def bounds_disk(self) -> bool:
        return not self.int_edges

    @property
    def int_vertices(self) -> frozenset[int]:
        on = set(self.cycle)
        return frozenset(v for x in self.int_edges for v in x if v not in on)


def _face_key(outer) -> tuple[int, ...]:
    if isinstance(outer, FacialWalk):
        return outer.key
    return cyclic_key(list(outer))


def side_faces(e: Embedding, c: Sequence[int]) -> dict[str, list[tuple[int, ...]]]:
    """Face keys on each side of a separating two-sided cycle (the cut caps removed)."""
    c = as_cycle(e.graph, c)
    cut = cut_along(e, c)
    out = {}
    for tag, copy in zip("LR", cut.copies):
        comp = next(cc for cc in cut.graph.components() if copy[0] in cc)
        sub, keep = induced_embedding(cut.embedding, comp)
        rmap = [cut.vmap[k] for k in keep]
        cap = cyclic_key([keep.index(x) for x in copy])
        keys = []
        dropped = False
        for f in trace_faces(sub, require_connected=False):
            if not dropped and f.key == cap:
                dropped = True
                continue
            keys.append(walk_image(f, rmap))
        out[tag] = keys
    return out


def interior_of(e: Embedding, c: Sequence[int], outer=None) -> Interior:
    """Int/ext of a contractible cycle.

    When both sides are planar (sphere case) the side avoiding ``outer`` (a
    face, given as a FacialWalk or vertex list) is int; without ``outer`` the
    side with fewer edges is int, ties broken lexicographically.
    """
    cls = classify_cycle(e, c)
    if cls.kind != CONTRACTIBLE:
        raise PreconditionError(f"cycle is {cls.kind}, not contractible")
    sd = cls.sides
    L, R = sd.left_edges, sd.right_edges
    if cls.left_genus == 0 and cls.right_genus == 0:
        if outer is not None:
            key = _face_key(outer)
            faces = side_faces(e, sd.cycle)
            pick = "R" if key in faces["L"] and key not in faces["R"] else "L"
            if key not in faces["L"] and key not in faces["R"]:
                raise InputError("outer is not a face of the embedding")
        else:
            pick = "L" if (len(L), sorted(L)) <= (len(R), sorted(R)) else "R"
    else:
        pick = "L" if cls.left_genus == 0 else "R"
    ints, exts = (L, R) if pick == "L" else (R, L)
    return Interior(sd.cycle, frozenset(ints), frozenset(exts), pick)


# ---------------------------------------------------------------------------
# cutting


@dataclass
class CutResult:
    graph: Graph
    embedding: Embedding
    vmap: list[int]                 # new vertex -> original vertex
    copies: list[tuple[int, ...]]   # copies of the cut cycle, as vertex lists in the new graph
    kind: str                       # "two-sided" | "one-sided"
    separating: bool | None = None

    def components(self) -> list[list[int]]:
        return self.graph.components()


def cut_along(e: Embedding, c: Sequence[int]) -> CutResult:
    c = as_cycle(e.graph, c)
    if cycle_signature(e, c) == 1:
        return _cut_two_sided(e, c)
    return _cut_one_sided(e, c)


def _build_cut(e: Embedding, c: Sequence[int], side_at, copy_name, rot_of, cycle_signs,
               kind: str) -> CutResult:
    g = e.graph
    on = {v: i for i, v in enumerate(c)}
    l = len(c)
    # new vertex ids: non-cycle vertices keep their order, then copies
    names: dict = {}
    vmap: list[int] = []
    for v in range(g.n):
        if v not in on:
            names[("v", v)] = len(vmap)
            vmap.append(v)
    for tag in ("L", "R"):
        for v in c:
            names[(tag, v)] = len(vmap)
            vmap.append(v)

    def end(v: int, w: int) -> int:
        if v in on:
            return names[(side_at[(v, w)], v)]
        return names[("v", v)]

    edges: dict[Edge, int] = {}
    cset = set(cycle_edges(c))
    for (u, v), s in zip(g.edges, e.signs):
        if (u, v) in cset:
            continue
        edges[norm_edge(end(u, v), end(v, u))] = s
    for a, b, s in cycle_signs(names):
        edges[norm_edge(a, b)] = s
    ng = Graph(len(vmap), sorted(edges))
    rot: list[tuple[int, ...]] = [()] * len(vmap)
    for v in range(g.n):
        if v not in on:
            rot[names[("v", v)]] = tuple(end(w, v) for w in e.rotation[v])
    for key, seq in rot_of(names, end).items():
        rot[key] = seq
    emb = Embedding.from_maps(ng, rot, edges)
    copies = copy_name(names)
    return CutResult(ng, emb, vmap, copies, kind)


def _cut_two_sided(e: Embedding, c: Sequence[int]) -> CutResult:
    sd = side_graphs(e, c)
    ne = sd.normalized
    l = len(c)

    def rot_of(names, end):
        out = {}
        for i, v in enumerate(c):
            prev, nxt = c[i - 1], c[(i + 1) % l]
            rot = ne.rotation[v]
            j = rot.index(prev)
            seq = [rot[(j + t) % len(rot)] for t in range(len(rot))]
            k = seq.index(nxt)
            left, right = seq[1:k], seq[k + 1:]
            out[names[("L", v)]] = tuple([names[("L", prev)]] + [end(w, v) for w in left]
                                         + [names[("L", nxt)]])
            out[names[("R", v)]] = tuple([names[("R", nxt)]] + [end(w, v) for w in right]
                                         + [names[("R", prev)]])
        return out

    def cycle_signs(names):
        for i in range(l):
            a, b = c[i], c[(i + 1) % l]
            yield names[("L", a)], names[("L", b)], 1
            yield names[("R", a)], names[("R", b)], 1

    def copies(names):
        return [tuple(names[("L", v)] for v in c), tuple(names[("R", v)] for v in c)]

    res = _build_cut(ne, c, sd.side_at, copies, rot_of, cycle_signs, "two-sided")
    res.separating = sd.separating
    return res


def _cut_one_sided(e: Embedding, c: Sequence[int]) -> CutResult:
    ne, _ = normalize_along(e, c)
    l = len(c)
    side_at = _sides_at(ne, c)
    # doubled cycle v0 .. v_{l-1} v̄0 .. v̄_{l-1}; the edges e_l and ē_l carry -1

    def succ(names, tag, i):
        if i + 1 < l:
            return names[(tag, c[i + 1])]
        return names[("R" if tag == "L" else "L", c[0])]

    def pred(names, tag, i):
        if i > 0:
            return names[(tag, c[i - 1])]
        return names[("R" if tag == "L" else "L", c[l - 1])]

    def rot_of(names, end):
        out = {}
        for i, v in enumerate(c):
            prev, nxt = c[i - 1], c[(i + 1) % l]
            rot = ne.rotation[v]
            j = rot.index(prev)
            seq = [rot[(j + t) % len(rot)] for t in range(len(rot))]
            k = seq.index(nxt)
            left, right = seq[1:k], seq[k + 1:]
            out[names[("L", v)]] = tuple([pred(names, "L", i)] + [end(w, v) for w in left]
                                         + [succ(names, "L", i)])
            out[names[("R", v)]] = tuple([succ(names, "R", i)] + [end(w, v) for w in right]
                                         + [pred(names, "R", i)])
        return out

    def cycle_signs(names):
        for i in range(l):
            for tag in ("L", "R"):
                a = names[(tag, c[i])]
                b = succ(names, tag, i)
                yield a, b, (-1 if i == l - 1 else 1)

    def copies(names):
        return [tuple(names[("L", v)] for v in c) + tuple(names[("R", v)] for v in c)]

    res = _build_cut(ne, c, side_at, copies, rot_of, cycle_signs, "one-sided")
    res.separating = False
    return res


def walk_image(walk: FacialWalk, vmap: Sequence[int]) -> tuple[int, ...]:
    return cyclic_key([vmap[v] for v in walk.vertices])


def faces_persist(e: Embedding, cut: CutResult) -> bool:
    """Every facial walk of e reappears (through the vertex map) as a facial walk after the cut."""
    before = Counter(f.key for f in trace_faces(e, require_connected=False))
    after = Counter(walk_image(f, cut.vmap)
                    for f in trace_faces(cut.embedding, require_connected=False))
    return all(after[k] >= n for k, n in before.items())


# ---------------------------------------------------------------------------
# homotopy


def _closed_lifts(g: Graph, vmap: Sequence[int], c: Sequence[int], within=None) -> list[tuple[int, ...]]:
    """Cycles of g whose image under vmap is c (same cyclic order, same start)."""
    pre: dict[int, list[int]] = {}
    for x, v in enumerate(vmap):
        if within is None or x in within:
            pre.setdefault(v, []).append(x)
    out = []
    l = len(c)
    for start in pre.get(c[0], []):
        stack = [(start, [start])]
        while stack:
            x, path = stack.pop()
            if len(path) == l:
                if g.has_edge(x, start):
                    out.append(tuple(path))
                continue
            target = c[len(path)]
            for y in g.neighbors(x):
                if vmap[y] == target and y not in path and (within is None or y in within):
                    stack.append((y, path + [y]))
    uniq = {}
    for p in out:
        uniq.setdefault(frozenset(p), p)
    return list(uniq.values())


def check_meeting(c1: Sequence[int], c2: Sequence[int]) -> str:
    """'disjoint', 'vertex' or 'path'; raises if the cycles meet in anything else."""
    shared = set(c1) & set(c2)
    if not shared:
        return "disjoint"
    if len(shared) == 1:
        return "vertex"
    e1, e2 = set(cycle_edges(c1)), set(cycle_edges(c2))
    common = e1 & e2
    # the shared vertices must form one path made of common edges
    adj: dict[int, set[int]] = {v: set() for v in shared}
    for u, v in common:
        adj[u].add(v)
        adj[v].add(u)
    if len(common) != len(shared) - 1:
        raise PreconditionError("cycles meet in more than one path")
    seen = {next(iter(shared))}
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if seen != shared:
        raise PreconditionError("cycles meet in more than one path")
    return "path"


@dataclass
class HomotopyResult:
    homotopic: bool
    region_vertices: frozenset[int] = frozenset()   # original labels
    region_edges: frozenset[Edge] = frozenset()
    region: Embedding | None = None                  # the component in the cut graph
    region_map: list[int] | None = None
    copies: tuple = ()
    reason: str = ""


def are_homotopic(e: Embedding, c1: Sequence[int], c2: Sequence[int]) -> HomotopyResult:
    g = e.graph
    c1 = as_cycle(g, c1)
    c2 = as_cycle(g, c2)
    if cycle_signature(e, c1) != 1 or cycle_signature(e, c2) != 1:
        raise PreconditionError("homotopy is defined for two-sided cycles")
    check_meeting(c1, c2)
    if set(cycle_edges(c1)) == set(cycle_edges(c2)):
        raise PreconditionError("the two cycles coincide")
    cut1 = cut_along(e, c1)
    lifts = _closed_lifts(cut1.graph, cut1.vmap, c2)
    if not lifts:
        return HomotopyResult(False, reason="second cycle crosses the first")
    lift = lifts[0]
    cut2 = cut_along(cut1.embedding, lift)
    vmap = [cut1.vmap[x] for x in cut2.vmap]
    candidates = []
    for comp in cut2.graph.components():
        cs = set(comp)
        n1 = len(_closed_lifts(cut2.graph, vmap, c1, cs))
        n2 = len(_closed_lifts(cut2.graph, vmap, c2, cs))
        if n1 != 1 or n2 != 1:
            continue
        sub, keep = induced_embedding(cut2.embedding, comp)
        if component_genus(sub) != 0:
            continue
        edges = frozenset(norm_edge(vmap[keep[a]], vmap[keep[b]]) for a, b in sub.graph.edges)
        candidates.append((len(edges), sorted(edges), comp, sub, keep, edges))
    if not candidates:
        return HomotopyResult(False, reason="no genus-0 component holds one copy of each")
    candidates.sort(key=lambda t: (t[0], t[1]))
    _, _, comp, sub, keep, edges = candidates[0]
    rmap = [vmap[k] for k in keep]
    cp1 = _closed_lifts(sub.graph, rmap, c1)[0]
    cp2 = _closed_lifts(sub.graph, rmap, c2)[0]
    return HomotopyResult(True, frozenset(rmap), edges, sub, rmap, (cp1, cp2))


# ---------------------------------------------------------------------------
# faces inside a region


def _match_faces(e: Embedding, images: list[tuple[int, ...]]) -> list[FacialWalk]:
    want = Counter(images)
    out = []
    for f in trace_faces(e, require_connected=False):
        if want[f.key] > 0:
            want[f.key] -= 1
            out.append(f)
    return out


def faces_within(e: Embedding, c1: Sequence[int], c2: Sequence[int] | None = None,
                 outer=None) -> list[FacialWalk]:
    """Faces of e inside Int(C) (one cycle) or Int(C ∪ C') (a homotopic pair)."""
    g = e.graph
    if c2 is None:
        inner = interior_of(e, c1, outer)
        images = side_faces(e, inner.cycle)[inner.side]
    else:
        h = are_homotopic(e, c1, c2)
        if not h.homotopic:
            raise PreconditionError("region needs a homotopic pair of cycles")
        sub, rmap = h.region, h.region_map
        cap_keys = Counter(cyclic_key(cp) for cp in h.copies)
        images = []
        for f in trace_faces(sub, require_connected=False):
            if cap_keys[f.key] > 0:
                cap_keys[f.key] -= 1
                continue
            images.append(walk_image(f, rmap))
    return _match_faces(e, images)


# ---------------------------------------------------------------------------
# relative orientation


def _cap_direction(sub: Embedding, cap: Sequence[int]) -> int:
    """+1 if the face bounded by the cap runs along cap's listed order (after normalising)."""
    from .embedding import normalized_signs
    switch, _ = normalized_signs(sub)
    flip = [v for v, x in switch.items() if x < 0]
    ne = apply_local_changes(sub, flip)
    key = cyclic_key(cap)
    fwd = list(cap)
    l = len(fwd)
    for f in trace_faces(ne, require_connected=False):
        signs = {s for _, _, s in f.steps}
        if f.key != key or len(signs) != 1:
            continue
        # a walk traced in -1 states is the +1 face read backwards
        vs = list(f.vertices)
        i = vs.index(fwd[0])
        d = 1 if vs[(i + 1) % l] == fwd[1] else -1
        return d * signs.pop()
    raise PreconditionError("cycle copy is not facial in the cut region")


def _region_orientation(e: Embedding, c1, c2) -> tuple[int, HomotopyResult]:
    h = are_homotopic(e, c1, c2)
    if not h.homotopic:
        raise PreconditionError("no genus-0 region between the cycles")
    cp1, cp2 = h.copies
    d1 = _cap_direction(h.region, cp1)
    d2 = _cap_direction(h.region, cp2)
    return d1 * d2, h


def same_relative_orientation(host: Embedding, sub: Embedding, c1: Sequence[int],
                              c2: Sequence[int], sub_map: Sequence[int] | None = None,
                              strict: bool = True) -> bool:
    """Compare how c2 is traversed relative to c1 in the host region and in the sub region.

    ``sub_map`` maps sub vertices to host vertices (identity by default). With
    ``strict`` the preconditions are enforced: almost disjoint,
    contractible in the host, noncontractible in the sub.
    """
    c1 = as_cycle(host.graph, c1)
    c2 = as_cycle(host.graph, c2)
    if len(set(c1) & set(c2)) > 1:
        raise PreconditionError("cycles are not almost disjoint")
    smap = list(sub_map) if sub_map is not None else list(range(sub.graph.n))
    inv = {v: i for i, v in enumerate(smap)}
    try:
        s1 = as_cycle(sub.graph, [inv[v] for v in c1])
        s2 = as_cycle(sub.graph, [inv[v] for v in c2])
    except KeyError:
        raise PreconditionError("cycles are not contained in the subgraph") from None
    if strict:
        for c in (c1, c2):
            if not is_contractible(host, c):
                raise PreconditionError("cycle is not contractible in the host embedding")
        for c in (s1, s2):
            if classify_cycle(sub, c).kind == CONTRACTIBLE:
                raise PreconditionError("cycle is contractible in the sub embedding")
    r_host, _ = _region_orientation(host, c1, c2)
    r_sub, _ = _region_orientation(sub, s1, s2)
    return r_host == r_sub


# ---------------------------------------------------------------------------
# cycle enumeration


def enumerate_cycles(g: Graph, limit: int | None = None, max_length: int | None = None) -> list[tuple[int, ...]]:
    """All cycles, each once: smallest vertex first, second vertex < last vertex.

    Sorted by length then lexicographically. Stops early (returning a prefix
    of the search order, then sorted) when ``limit`` cycles are found.
    """
    out: list[tuple[int, ...]] = []
    for s in range(g.n):
        stack = [(s, [s])]
        while stack:
            x, path = stack.pop()
            for y in g.neighbors(x):
                if y == s and len(path) >= 3 and path[1] < path[-1]:
                    out.append(tuple(path))
                    if limit is not None and len(out) >= limit:
                        out.sort(key=lambda c: (len(c), c))
                        return out
                elif y > s and y not in path and (max_length is None or len(path) < max_length):
                    stack.append((y, path + [y]))
    out.sort(key=lambda c: (len(c), c))
    return out
