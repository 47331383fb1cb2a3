"""Verifiers and bounded searchers for nested chains, isolated paths, fans and face layers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .embedding import Embedding, FacialWalk, component_genus, cyclic_key, induced_embedding, trace_faces
from .errors import BudgetExceeded, InputError, PreconditionError
from .graph import Edge, norm_edge
from .topology import (CONTRACTIBLE, ONE_SIDED, are_homotopic, as_cycle, check_meeting,
                       classify_cycle, cycle_edges, enumerate_cycles, faces_within,
                       interior_of, side_faces)


@dataclass(frozen=True)
class Piece:
    """A vertex or a face of an embedded graph."""

    vertex: int | None = None
    face: FacialWalk | None = None

    def __post_init__(self) -> None:
        if (self.vertex is None) == (self.face is None):
            raise InputError("a piece is exactly one of a vertex or a face")

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def degree(self, e: Embedding) -> int:
        return e.graph.degree(self.vertex) if self.is_vertex else len(self.face)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset([self.vertex]) if self.is_vertex else self.face.vertex_set

    def to_document(self) -> dict:
        if self.is_vertex:
            return {"vertex": self.vertex}
        return {"face": list(self.face.vertices)}


def face_piece(e: Embedding, vertices: Sequence[int]) -> Piece:
    """The face of e whose boundary walk is the given cyclic vertex sequence."""
    key = cyclic_key(list(vertices))
    for f in trace_faces(e, require_connected=False):
        if f.key == key:
            return Piece(face=f)
    raise InputError(f"no face with boundary {list(vertices)}")


@dataclass
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# pair relations


def _path_along(cycle: Sequence[int], verts: set[int]) -> list[int] | None:
    """The vertices of cycle lying in verts, if they form one contiguous run (in cycle order)."""
    l = len(cycle)
    inside = [cycle[i] in verts for i in range(l)]
    if not any(inside):
        return None
    if all(inside):
        return list(cycle)
    start = next(i for i in range(l) if inside[i] and not inside[i - 1])
    run = []
    i = start
    while inside[i % l]:
        run.append(cycle[i % l])
        i += 1
    if len(run) != sum(inside):
        return None
    return run


def face_pinch(c_outer: Sequence[int], c_inner: Sequence[int], f: FacialWalk) -> bool:
    """Both cycles meet f; outer meets it in a path P with interior, inner in a subpath of int(P)."""
    fv = set(f.vertices)
    fe = f.edge_set
    p = _path_along(c_outer, fv)
    q = _path_along(c_inner, fv)
    if p is None or q is None or len(p) < 3 or len(p) == len(c_outer):
        return False
    for path in (p, q):
        if any(norm_edge(a, b) not in fe for a, b in zip(path, path[1:])):
            return False
    interior = set(p[1:-1])
    if not set(q) <= interior:
        return False
    return set(c_outer) & set(c_inner) <= set(q)


def pair_relation(faces: Iterable[FacialWalk], c_outer: Sequence[int], c_inner: Sequence[int]):
    """("fully", None), ("vertex", v), ("face", face) or None."""
    shared = set(c_outer) & set(c_inner)
    if not shared:
        return ("fully", None)
    if len(shared) == 1:
        return ("vertex", next(iter(shared)))
    for f in faces:
        if face_pinch(c_outer, c_inner, f):
            return ("face", f)
    return None


# ---------------------------------------------------------------------------
# nested chains


@dataclass
class NestedChain:
    cycles: list[tuple[int, ...]]
    mode: str = "fully"             # "fully" | "pinched"
    flavor: str = "contractible"    # "contractible" | "homotopic"
    outer: tuple[int, ...] | None = None   # outer face for sphere embeddings
    pieces: list = field(default_factory=list)

    def to_document(self) -> dict:
        return {"cycles": [list(c) for c in self.cycles], "mode": self.mode,
                "flavor": self.flavor, "outer": list(self.outer) if self.outer else None}


def _sphere_outers(e: Embedding, outer) -> list:
    if outer is not None:
        return [outer]
    if component_genus(e) == 0:
        return [f.vertices for f in trace_faces(e, require_connected=False)]
    return [None]


def verify_well_nested_chain(e: Embedding, chain: NestedChain) -> Verdict:
    g = e.graph
    try:
        cycles = [as_cycle(g, c) for c in chain.cycles]
    except InputError as exc:
        return Verdict(False, str(exc))
    if chain.mode not in ("fully", "pinched"):
        return Verdict(False, f"unknown mode {chain.mode}")
    faces = trace_faces(e, require_connected=False)
    if chain.flavor == "homotopic":
        return _verify_homotopic_chain(e, cycles, chain.mode, faces)
    for c in cycles:
        if classify_cycle(e, c).kind != CONTRACTIBLE:
            return Verdict(False, f"cycle {list(c)} is not contractible")
    last = "no outer face makes the chain nested"
    for outer in _sphere_outers(e, chain.outer):
        ok, why = _nested_under(e, cycles, chain.mode, faces, outer)
        if ok:
            return Verdict(True)
        last = why
    return Verdict(False, last)


def _nested_under(e, cycles, mode, faces, outer) -> tuple[bool, str]:
    for i in range(len(cycles) - 1):
        inner, outer_c = cycles[i], cycles[i + 1]
        reg = interior_of(e, outer_c, outer)
        if not set(cycle_edges(inner)) <= reg.Int_edges:
            return False, f"cycle {i} is not inside cycle {i + 1}"
        if set(cycle_edges(inner)) == set(cycle_edges(outer_c)):
            return False, f"cycles {i} and {i + 1} coincide"
        rel = pair_relation(faces, outer_c, inner)
        if rel is None:
            return False, f"cycles {i} and {i + 1} are neither disjoint nor pinched on a piece"
        if (mode == "fully") != (rel[0] == "fully"):
            return False, f"pair {i} is {rel[0]}, chain mode is {mode}"
    return True, ""


def _verify_homotopic_chain(e, cycles, mode, faces) -> Verdict:
    for c in cycles:
        k = classify_cycle(e, c).kind
        if k in (CONTRACTIBLE, ONE_SIDED):
            return Verdict(False, f"cycle {list(c)} is {k}")
    regions = []
    for i in range(len(cycles) - 1):
        a, b = cycles[i], cycles[i + 1]
        try:
            h = are_homotopic(e, a, b)
        except PreconditionError as exc:
            return Verdict(False, f"pair {i}: {exc}")
        if not h.homotopic:
            return Verdict(False, f"cycles {i} and {i + 1} are not homotopic")
        rel = pair_relation(faces, b, a) or pair_relation(faces, a, b)
        if rel is None:
            return Verdict(False, f"cycles {i} and {i + 1} are neither disjoint nor pinched on a piece")
        if (mode == "fully") != (rel[0] == "fully"):
            return Verdict(False, f"pair {i} is {rel[0]}, chain mode is {mode}")
        regions.append(_open_region(h, a, b))
    for i, (iv, ie) in enumerate(regions):
        for j, c in enumerate(cycles):
            if j in (i, i + 1):
                continue
            if set(c) & iv or set(cycle_edges(c)) & ie:
                return Verdict(False, f"cycle {j} meets the region between cycles {i} and {i + 1}")
    return Verdict(True)


def _open_region(h, a, b) -> tuple[set[int], set[Edge]]:
    """int(C ∪ C'): the region minus its two boundary cycles."""
    bv = set(a) | set(b)
    be = set(cycle_edges(a)) | set(cycle_edges(b))
    return set(h.region_vertices) - bv, set(h.region_edges) - be


@dataclass
class DepthResult:
    depth: int
    chain: NestedChain | None
    exact: bool
    cycles_examined: int


def _cycle_pool(e: Embedding, budget: int) -> tuple[list[tuple[int, ...]], bool]:
    cyc = enumerate_cycles(e.graph, limit=budget + 1)
    if len(cyc) > budget:
        return cyc[:budget], False
    return cyc, True


def max_well_nested_depth(e: Embedding, budget: int = 2000, outer=None) -> DepthResult:
    """Longest well-nested chain of contractible cycles, in either uniform mode.

    On sphere embeddings every face is tried as the outer face unless one is given.
    """
    pool, exact = _cycle_pool(e, budget)
    faces = trace_faces(e, require_connected=False)
    contractible = []
    info = {}
    for c in pool:
        cls = classify_cycle(e, c)
        if cls.kind != CONTRACTIBLE:
            continue
        sd = cls.sides
        info[c] = (sd.left_edges, sd.right_edges, cls.left_genus, cls.right_genus,
                   set(side_faces(e, c)["L"]) if cls.left_genus == 0 and cls.right_genus == 0 else None)
        contractible.append(c)
    if not contractible:
        return DepthResult(0, None, exact, len(pool))
    best = DepthResult(1, NestedChain([contractible[0]]), exact, len(pool))
    outers = _sphere_outers(e, outer)
    for out in outers:
        okey = cyclic_key(list(out)) if out is not None else None
        ints = {}
        for c in contractible:
            L, R, gl, gr, lfaces = info[c]
            if gl == 0 and gr == 0:
                if okey is not None:
                    side = "R" if okey in lfaces else "L"
                else:
                    side = "L" if (len(L), sorted(L)) <= (len(R), sorted(R)) else "R"
            else:
                side = "L" if gl == 0 else "R"
            ints[c] = (L if side == "L" else R) | set(cycle_edges(c))
        for mode in ("fully", "pinched"):
            succ: dict = {c: [] for c in contractible}
            for a in contractible:
                ea = set(cycle_edges(a))
                for b in contractible:
                    if a == b or not ea <= ints[b] or ea == set(cycle_edges(b)):
                        continue
                    rel = pair_relation(faces, b, a)
                    if rel is None or (mode == "fully") != (rel[0] == "fully"):
                        continue
                    succ[a].append(b)
            memo: dict = {}

            def longest(c, stack=()):
                if c in memo:
                    return memo[c]
                bestc = (1, [c])
                for d in succ[c]:
                    if d in stack:
                        continue
                    n, ch = longest(d, stack + (c,))
                    if n + 1 > bestc[0]:
                        bestc = (n + 1, [c] + ch)
                memo[c] = bestc
                return bestc

            for c in contractible:
                n, ch = longest(c)
                if n > best.depth:
                    best = DepthResult(n, NestedChain(ch, mode, "contractible",
                                                      tuple(out) if out is not None else None),
                                       exact, len(pool))
    return best


def homotopy_classes(e: Embedding, cycles: Sequence[Sequence[int]]) -> list[list[tuple[int, ...]]]:
    """Group cycles by pairwise homotopy (pairs meeting badly are kept apart)."""
    classes: list[list[tuple[int, ...]]] = []
    for c in cycles:
        c = tuple(c)
        for cl in classes:
            try:
                if are_homotopic(e, cl[0], c).homotopic:
                    cl.append(c)
                    break
            except PreconditionError:
                continue
        else:
            classes.append([c])
    return classes


def max_well_homotopic_depth(e: Embedding, budget: int = 2000, node_budget: int = 1_000_000) -> DepthResult:
    """Longest well-homotopic chain of noncontractible two-sided cycles, listed in order."""
    pool, exact = _cycle_pool(e, budget)
    faces = trace_faces(e, require_connected=False)
    cands = []
    for c in pool:
        k = classify_cycle(e, c).kind
        if k not in (CONTRACTIBLE, ONE_SIDED):
            cands.append(c)
    if not cands:
        return DepthResult(0, None, exact, len(pool))
    n = len(cands)
    rel: dict = {}
    region: dict = {}
    for i in range(n):
        for j in range(i + 1, n):
            a, b = cands[i], cands[j]
            try:
                h = are_homotopic(e, a, b)
            except PreconditionError:
                continue
            if not h.homotopic:
                continue
            r = pair_relation(faces, b, a) or pair_relation(faces, a, b)
            if r is None:
                continue
            rel[i, j] = rel[j, i] = r[0] == "fully"
            region[i, j] = region[j, i] = _open_region(h, a, b)
    vsets = [set(c) for c in cands]
    esets = [set(cycle_edges(c)) for c in cands]
    best = [1, [0], "fully"]
    nodes = 0

    def meets(k, reg):
        iv, ie = reg
        return bool(vsets[k] & iv or esets[k] & ie)

    def extend(chain, fully):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("homotopic depth search budget exhausted")
        if len(chain) > best[0]:
            best[:] = [len(chain), list(chain), "fully" if fully else "pinched"]
        last = chain[-1]
        for k in range(n):
            if k in chain or (last, k) not in rel or rel[last, k] != fully:
                continue
            reg = region[last, k]
            if any(meets(x, reg) for x in chain[:-1]):
                continue
            if any(meets(k, region[chain[t], chain[t + 1]]) for t in range(len(chain) - 1)):
                continue
            extend(chain + [k], fully)

    exact_search = True
    try:
        for s in range(n):
            for fully in (True, False):
                extend([s], fully)
    except BudgetExceeded:
        exact_search = False
    chain = NestedChain([cands[k] for k in best[1]], best[2], "homotopic")
    return DepthResult(best[0], chain, exact and exact_search, len(pool))


def max_disjoint_noncontractible(e: Embedding, budget: int = 2000) -> tuple[int, list[tuple[int, ...]]]:
    """Largest set of pairwise vertex-disjoint noncontractible cycles (exhaustive over the pool)."""
    pool, _ = _cycle_pool(e, budget)
    cands = [c for c in pool if classify_cycle(e, c).kind != CONTRACTIBLE]
    best: list = []

    def rec(i, chosen, used):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (len(cands) - i) <= len(best):
            return
        for k in range(i, len(cands)):
            c = cands[k]
            if used & set(c):
                continue
            rec(k + 1, chosen + [c], used | set(c))

    rec(0, [], set())
    return len(best), best


# ---------------------------------------------------------------------------
# pairwise nonhomotopic path and cycle families


def _paths_between(e: Embedding, a: int, b: int, limit: int) -> list[tuple[int, ...]]:
    g = e.graph
    out = []
    stack = [(a, (a,))]
    while stack:
        x, path = stack.pop()
        for y in g.neighbors(x):
            if y == b and (a != b or len(path) >= 3):
                out.append(path + (b,))
                if len(out) > limit:
                    raise BudgetExceeded("too many paths to enumerate")
            elif y not in path and y != b:
                stack.append((y, path + (y,)))
    if a == b:
        seen = set()
        uniq = []
        for p in out:
            k = frozenset(cycle_edges(p[:-1]))
            if k not in seen:
                seen.add(k)
                uniq.append(p)
        out = uniq
    return sorted(out, key=lambda p: (len(p), p))


def _path_pair_homotopic(e: Embedding, p: Sequence[int], q: Sequence[int]) -> bool:
    if p[0] != p[-1]:
        cyc = list(p) + list(reversed(q[1:-1]))
        return classify_cycle(e, cyc).kind == CONTRACTIBLE
    try:
        return are_homotopic(e, p[:-1], q[:-1]).homotopic
    except PreconditionError:
        return False


def max_nonhomotopic_paths(e: Embedding, a: int, b: int, limit: int = 20000) -> tuple[int, list]:
    """Largest family of internally disjoint a-b paths (cycles when a == b), pairwise nonhomotopic.

    For a == b a contractible cycle counts as homotopic to every other
    contractible cycle, so at most one is used.
    """
    paths = _paths_between(e, a, b, limit)
    inner = [set(p[1:-1]) for p in paths]
    n = len(paths)
    memo: dict = {}

    def hom(i, j):
        key = (min(i, j), max(i, j))
        if key not in memo:
            if a == b:
                ci = classify_cycle(e, paths[i][:-1]).kind == CONTRACTIBLE
                cj = classify_cycle(e, paths[j][:-1]).kind == CONTRACTIBLE
                memo[key] = (ci and cj) or (not ci and not cj and _path_pair_homotopic(e, paths[i], paths[j]))
            else:
                memo[key] = _path_pair_homotopic(e, paths[i], paths[j])
        return memo[key]

    best: list = []
    cap = e.graph.degree(a) if a != b else e.graph.degree(a) // 2

    def rec(start, chosen, used):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) >= cap:
            return
        for k in range(start, n):
            if inner[k] & used:
                continue
            if a != b and len(paths[k]) == 2 and any(len(paths[c]) == 2 for c in chosen):
                continue
            if any(hom(k, c) for c in chosen):
                continue
            rec(k + 1, chosen + [k], used | inner[k])

    rec(0, [], set())
    return len(best), [paths[k] for k in best]


def almost_disjoint(cycles: Sequence[Sequence[int]]) -> bool:
    """Each cycle shares at most one vertex with the union of the others."""
    sets = [set(c) for c in cycles]
    for i, s in enumerate(sets):
        rest = set().union(*(t for j, t in enumerate(sets) if j != i)) if len(sets) > 1 else set()
        if len(s & rest) > 1:
            return False
    return True


def max_almost_disjoint_nonhomotopic(e: Embedding, budget: int = 2000) -> tuple[int, list]:
    """Largest almost disjoint family of noncontractible, pairwise nonhomotopic cycles."""
    pool, _ = _cycle_pool(e, budget)
    cands = [c for c in pool if classify_cycle(e, c).kind != CONTRACTIBLE]
    memo: dict = {}

    def hom(i, j):
        key = (min(i, j), max(i, j))
        if key not in memo:
            try:
                memo[key] = are_homotopic(e, cands[i], cands[j]).homotopic
            except PreconditionError:
                memo[key] = False
        return memo[key]

    best: list = []

    def rec(start, chosen):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for k in range(start, len(cands)):
            trial = [cands[c] for c in chosen] + [cands[k]]
            if not almost_disjoint(trial):
                continue
            if any(hom(k, c) for c in chosen):
                continue
            rec(k + 1, chosen + [k])

    rec(0, [])
    return len(best), [cands[k] for k in best]


def cycles_on_spanning_tree(tree_edges: Iterable[Edge], root: int,
                            extra: Sequence[Edge]) -> list[tuple[list[int], tuple[int, ...]]]:
    """For each non-tree edge e_i: (stem path from root, fundamental cycle C'_i)."""
    adj: dict[int, list[int]] = {}
    for u, v in tree_edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    parent = {root: None}
    order = [root]
    for x in order:
        for y in adj.get(x, []):
            if y not in parent:
                parent[y] = x
                order.append(y)

    def up(v):
        out = [v]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out

    res = []
    for u, v in extra:
        pu, pv = up(u), up(v)
        common = set(pu) & set(pv)
        top = next(x for x in pu if x in common)
        left = pu[:pu.index(top) + 1]
        right = pv[:pv.index(top)]
        cyc = tuple(left + list(reversed(right)))
        stem = list(reversed(up(top)))
        res.append((stem, cyc))
    return res


# ---------------------------------------------------------------------------
# isolated paths


@dataclass
class IsolatedPathSystem:
    p: Piece
    q: Piece
    paths: list[tuple[int, ...]]

    @property
    def kind(self) -> str:
        faces = (not self.p.is_vertex) + (not self.q.is_vertex)
        return {2: "disjoint", 1: "almost-disjoint", 0: "joint"}[faces]

    def to_document(self) -> dict:
        return {"p": self.p.to_document(), "q": self.q.to_document(),
                "paths": [list(x) for x in self.paths], "kind": self.kind}


def _cyclic_order_ok(face: FacialWalk, points: Sequence[int]) -> bool:
    """points appear along the face walk in this cyclic order, in one of the two directions."""
    vs = list(face.vertices)
    if len(set(vs)) != len(vs):
        pos = {}
        for i, v in enumerate(vs):
            pos.setdefault(v, i)
    else:
        pos = {v: i for i, v in enumerate(vs)}
    L = len(vs)
    if len(points) <= 2:
        return True
    for d in (1, -1):
        rel = [((pos[x] - pos[points[0]]) * d) % L for x in points]
        if all(rel[i] < rel[i + 1] for i in range(len(rel) - 1)):
            return True
    return False


def _face_arc(face: FacialWalk, a: int, b: int, direction: int) -> list[int]:
    vs = list(face.vertices)
    L = len(vs)
    i = vs.index(a)
    out = [a]
    while vs[i] != b:
        i = (i + direction) % L
        out.append(vs[i])
        if len(out) > L + 1:
            raise PreconditionError("arc does not close")
    return out


def _direction(face: FacialWalk, points: Sequence[int]) -> int:
    vs = list(face.vertices)
    pos = {v: i for i, v in enumerate(vs)}
    L = len(vs)
    if len(points) < 2:
        return 1
    for d in (1, -1):
        rel = [((pos[x] - pos[points[0]]) * d) % L for x in points]
        if all(rel[i] < rel[i + 1] for i in range(len(rel) - 1)):
            return d
    return 1


def induced_cycle(sys: IsolatedPathSystem, i: int) -> list[int]:
    """The cycle formed by P_i, P_{i+1} and the piece arcs between their endpoints."""
    P, Q = sys.paths[i], sys.paths[i + 1]
    starts = [x[0] for x in sys.paths]
    ends = [x[-1] for x in sys.paths]
    if sys.p.is_vertex:
        head = [P[0]]
    else:
        d = _direction(sys.p.face, starts)
        head = list(reversed(_face_arc(sys.p.face, P[0], Q[0], d)))
    if sys.q.is_vertex:
        tail = [P[-1]]
    else:
        d = _direction(sys.q.face, ends)
        tail = _face_arc(sys.q.face, P[-1], Q[-1], d)
    # walk: P forward, arc on q to Q's end, Q backward, arc on p back to P's start
    walk = list(P) + tail[1:] + list(reversed(Q[:-1]))
    walk += head[1:-1] if not sys.p.is_vertex else []
    if walk[0] == walk[-1]:
        walk = walk[:-1]
    return walk


def verify_isolated_paths(e: Embedding, sys: IsolatedPathSystem) -> Verdict:
    g = e.graph
    pv, qv = sys.p.vertex_set, sys.q.vertex_set
    if pv & qv:
        return Verdict(False, "pieces are not disjoint")
    for k, path in enumerate(sys.paths):
        if len(path) < 2 or len(set(path)) != len(path):
            return Verdict(False, f"path {k} is not a simple path")
        if any(not g.has_edge(a, b) for a, b in zip(path, path[1:])):
            return Verdict(False, f"path {k} uses a non-edge")
        if path[0] not in pv or path[-1] not in qv:
            return Verdict(False, f"path {k} does not run from p to q")
        if set(path[1:-1]) & (pv | qv):
            return Verdict(False, f"path {k} meets a piece internally")
    for i in range(len(sys.paths)):
        for j in range(i + 1, len(sys.paths)):
            if set(sys.paths[i][1:-1]) & set(sys.paths[j][1:-1]):
                return Verdict(False, f"paths {i} and {j} are not internally disjoint")
    for piece, pts in ((sys.p, [x[0] for x in sys.paths]), (sys.q, [x[-1] for x in sys.paths])):
        if piece.is_vertex:
            continue
        if len(set(pts)) != len(pts):
            return Verdict(False, "endpoints on a face piece are not distinct")
        if not _cyclic_order_ok(piece.face, pts):
            return Verdict(False, "endpoints are not listed in order along the face")
    for i in range(len(sys.paths) - 1):
        cyc = induced_cycle(sys, i)
        if len(set(cyc)) != len(cyc) or len(cyc) < 3:
            return Verdict(False, f"paths {i}, {i + 1} do not induce a cycle")
        try:
            kind = classify_cycle(e, cyc).kind
        except InputError as exc:
            return Verdict(False, f"paths {i}, {i + 1}: {exc}")
        if kind != CONTRACTIBLE:
            return Verdict(False, f"cycle induced by paths {i}, {i + 1} is {kind}")
    return Verdict(True)


@dataclass
class SearchResult:
    value: int
    witness: object
    exact: bool
    nodes: int = 0


def max_isolated_paths(e: Embedding, p: Piece, q: Piece, budget: int = 200_000,
                       path_limit: int = 5000) -> SearchResult:
    """Exact maximum number of isolated paths from p to q (backtracking)."""
    g = e.graph
    pv, qv = p.vertex_set, q.vertex_set
    if pv & qv:
        raise PreconditionError("pieces are not disjoint")
    paths: list[tuple[int, ...]] = []
    for s in sorted(pv):
        stack = [(s, (s,))]
        while stack:
            x, path = stack.pop()
            for y in g.neighbors(x):
                if y in qv:
                    paths.append(path + (y,))
                    if len(paths) > path_limit:
                        raise BudgetExceeded("too many candidate paths")
                elif y not in pv and y not in path:
                    stack.append((y, path + (y,)))
    paths.sort(key=lambda x: (len(x), x))
    n = len(paths)
    cache: dict = {}
    nodes = 0
    best: list = []
    exact = True

    def contractible_pair(i, j):
        if (i, j) not in cache:
            sys = IsolatedPathSystem(p, q, [paths[i], paths[j]])
            try:
                cyc = induced_cycle(sys, 0)
                ok = len(set(cyc)) == len(cyc) and len(cyc) >= 3 and \
                    classify_cycle(e, cyc).kind == CONTRACTIBLE
            except (InputError, PreconditionError):
                ok = False
            cache[i, j] = ok
        return cache[i, j]

    def compatible(k, chosen, used):
        path = paths[k]
        if set(path[1:-1]) & used:
            return False
        for c in chosen:
            other = paths[c]
            if not p.is_vertex and other[0] == path[0]:
                return False
            if not q.is_vertex and other[-1] == path[-1]:
                return False
            if p.is_vertex and q.is_vertex and len(path) == 2 and len(other) == 2:
                return False
        return True

    def rec(chosen, used):
        nonlocal nodes, best
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("isolated path search budget exhausted")
        if len(chosen) > len(best):
            best = list(chosen)
        avail = [k for k in range(n) if k not in chosen and compatible(k, chosen, used)]
        if len(chosen) + len(avail) <= len(best):
            return
        for k in avail:
            if chosen and not contractible_pair(chosen[-1], k):
                continue
            trial = chosen + [k]
            if not p.is_vertex and not _cyclic_order_ok(p.face, [paths[c][0] for c in trial]):
                continue
            if not q.is_vertex and not _cyclic_order_ok(q.face, [paths[c][-1] for c in trial]):
                continue
            rec(trial, used | set(paths[k][1:-1]))

    try:
        rec([], set())
    except BudgetExceeded:
        exact = False
    witness = IsolatedPathSystem(p, q, [paths[k] for k in best])
    return SearchResult(len(best), witness, exact, nodes)


# ---------------------------------------------------------------------------
# fans


@dataclass
class Fan:
    p: Piece
    horizontal: tuple[int, ...]
    verticals: list[tuple[int, ...]]
    arch: tuple[int, ...] | None = None

    @property
    def size(self) -> int:
        return len(self.verticals)

    def edges(self, with_arch: bool = True) -> set[Edge]:
        es = set()
        for path in [self.horizontal, *self.verticals] + ([self.arch] if with_arch and self.arch else []):
            es |= {norm_edge(a, b) for a, b in zip(path, path[1:])}
        return es


def _is_path(g, path) -> bool:
    return len(set(path)) == len(path) and all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def _rotation_order_ok(e: Embedding, v: int, nbrs: Sequence[int]) -> bool:
    rot = list(e.rotation[v])
    pos = {w: i for i, w in enumerate(rot)}
    L = len(rot)
    if len(nbrs) <= 2:
        return True
    for d in (1, -1):
        rel = [((pos[x] - pos[nbrs[0]]) * d) % L for x in nbrs]
        if all(rel[i] < rel[i + 1] for i in range(len(rel) - 1)):
            return True
    return False


def verify_fan(e: Embedding, fan: Fan) -> Verdict:
    g = e.graph
    P = tuple(fan.horizontal)
    pv = fan.p.vertex_set
    if not P or not _is_path(g, P):
        return Verdict(False, "horizontal path is not a path")
    if set(P) & pv:
        return Verdict(False, "horizontal path meets p")
    if not fan.verticals:
        return Verdict(False, "a fan needs at least one vertical path")
    for k, Q in enumerate(fan.verticals):
        if len(Q) < 2 or not _is_path(g, Q):
            return Verdict(False, f"vertical path {k} is not a path")
        if len(set(Q) & pv) != 1 or Q[0] not in pv:
            return Verdict(False, f"vertical path {k} does not meet p in exactly its first vertex")
        if len(set(Q) & set(P)) != 1 or Q[-1] not in P:
            return Verdict(False, f"vertical path {k} does not meet P in exactly its last vertex")
    for j in range(len(fan.verticals)):
        for k in range(j + 1, len(fan.verticals)):
            common = set(fan.verticals[j]) & set(fan.verticals[k])
            allowed = {fan.p.vertex} if fan.p.is_vertex else set()
            if common != allowed:
                return Verdict(False, f"vertical paths {j + 1} and {k + 1} meet outside p")
    if fan.p.is_vertex:
        if not _rotation_order_ok(e, fan.p.vertex, [Q[1] for Q in fan.verticals]):
            return Verdict(False, "vertical paths are not in rotation order around p")
    elif not _cyclic_order_ok(fan.p.face, [Q[0] for Q in fan.verticals]):
        return Verdict(False, "vertical paths are not in order along p")
    sub, _ = induced_embedding(e, edges=fan.edges(with_arch=False))
    if component_genus(sub) != 0:
        return Verdict(False, "fan does not induce a planar embedding")
    if fan.arch is not None:
        return _verify_arch(e, fan)
    return Verdict(True)


def _verify_arch(e: Embedding, fan: Fan) -> Verdict:
    g = e.graph
    A = tuple(fan.arch)
    pv = fan.p.vertex_set
    closed = fan.p.is_vertex
    if closed:
        body = A[:-1] if A[0] == A[-1] else A
        if len(body) < 3 or A[0] != fan.p.vertex or not _is_path(g, body) or \
                not g.has_edge(body[-1], body[0]):
            return Verdict(False, "arch is not a cycle through p")
        cyc = list(body)
        interior = list(body[1:])
    else:
        if len(A) < 2 or not _is_path(g, A) or A[0] not in pv or A[-1] not in pv or A[0] == A[-1]:
            return Verdict(False, "arch is not a path with both ends on p")
        interior = list(A[1:-1])
        if set(interior) & pv:
            return Verdict(False, "arch meets p internally")
        verts = [Q[0] for Q in fan.verticals]
        face = fan.p.face
        arc = None
        for d in (1, -1):
            cand = _face_arc(face, A[-1], A[0], d)
            if not set(cand[1:-1]) & set(verts):
                arc = cand
                break
        if arc is None:
            return Verdict(False, "arch endpoints separate the vertical paths on p")
        cyc = list(A) + arc[1:-1]
    h_vertices = set(fan.horizontal).union(*[set(Q) for Q in fan.verticals])
    if set(interior) & h_vertices:
        return Verdict(False, "arch meets the fan outside its endpoints")
    if not closed and set(A) & set().union(*[set(Q) for Q in fan.verticals]):
        return Verdict(False, "arch meets a vertical path")
    if len(set(cyc)) != len(cyc):
        return Verdict(False, "arch and p do not form a cycle")
    sub, _ = induced_embedding(e, edges=fan.edges(with_arch=True) | set(cycle_edges(cyc)))
    if component_genus(sub) != 0:
        return Verdict(False, "fan with arch is not contractible")
    cls = classify_cycle(e, cyc)
    if cls.kind != CONTRACTIBLE:
        return Verdict(False, "cycle through the arch is not contractible")
    sd = cls.sides
    fan_edges = fan.edges(with_arch=False)
    side = None
    for b in sd.bridges:
        if set(map(tuple, b["edges"])) & fan_edges:
            side = b["sides"]
            break
    if side not in ("L", "R"):
        return Verdict(False, "fan does not lie on one side of the arch cycle")
    arch_edges = set(cycle_edges(cyc))
    touching = set()
    for v in interior:
        for w in g.neighbors(v):
            if norm_edge(v, w) in arch_edges:
                continue
            if sd.side_at.get((v, w)) == side:
                touching.add(v)
    if len(touching) > 1:
        return Verdict(False, f"arch has {len(touching)} interior vertices with edges into the fan side")
    return Verdict(True)


# ---------------------------------------------------------------------------
# radius


def radius_of_interior(e: Embedding, c1: Sequence[int], c2: Sequence[int] | None = None,
                       outer=None) -> tuple[int, dict[tuple[int, ...], int]]:
    """Layer faces of Int(region): radius 1 touches the boundary, i+1 touches layer i."""
    g = e.graph
    c1 = as_cycle(g, c1)
    if c2 is None:
        reg = interior_of(e, c1, outer)
        if not reg.int_edges:
            return 0, {}
        boundary = set(c1)
    else:
        c2 = as_cycle(g, c2)
        h = are_homotopic(e, c1, c2)
        if not h.homotopic:
            raise PreconditionError("region needs a homotopic pair")
        if not (set(h.region_edges) - set(cycle_edges(c1)) - set(cycle_edges(c2))):
            return 0, {}
        boundary = set(c1) | set(c2)
    faces = faces_within(e, c1, c2, outer)
    radius: dict[int, int] = {}
    frontier = set(boundary)
    layer = 0
    remaining = set(range(len(faces)))
    while remaining:
        layer += 1
        hit = {i for i in remaining if faces[i].vertex_set & frontier}
        if not hit:
            break
        for i in hit:
            radius[i] = layer
        remaining -= hit
        frontier = set().union(*(faces[i].vertex_set for i in hit))
    out = {faces[i].key: r for i, r in radius.items()}
    return (max(radius.values()) if radius else 0), out


# ---------------------------------------------------------------------------
# almost disjoint faces between two cycles


def faces_almost_disjoint(faces: Sequence[FacialWalk]) -> bool:
    sets = [f.vertex_set for f in faces]
    for i, s in enumerate(sets):
        rest = set()
        for j, t in enumerate(sets):
            if j != i:
                rest |= t
        if len(s & rest) > 1:
            return False
    return True


def _order_component(comp: list[int], adj: dict[int, set[int]], keys) -> tuple[list[int], bool]:
    """Linear or circular order of an edge-sharing component (path/cycle structure)."""
    if len(comp) == 1:
        return comp, False
    ends = [x for x in comp if len(adj[x]) == 1]
    circular = not ends and all(len(adj[x]) == 2 for x in comp)
    start = min(ends, key=keys) if ends else min(comp, key=keys)
    order = [start]
    seen = {start}
    while len(order) < len(comp):
        nxt = sorted((y for y in adj[order[-1]] if y not in seen), key=keys)
        if not nxt:
            nxt = sorted((y for y in comp if y not in seen), key=keys)
        order.append(nxt[0])
        seen.add(nxt[0])
    return order, circular


def _three_color(n: int, edges: set[tuple[int, int]], cyclic: list[int]) -> list[int]:
    """Colour along the cyclic unit order c1 c2 c3 ...; repair conflicts by backtracking."""
    nb: dict[int, set[int]] = {i: set() for i in range(n)}
    for a, b in edges:
        nb[a].add(b)
        nb[b].add(a)
    col = [-1] * n
    for k, u in enumerate(cyclic):
        col[u] = k % 3
    if all(col[a] != col[b] for a, b in edges):
        return col
    col = [-1] * n

    def bt(i):
        if i == len(cyclic):
            return True
        u = cyclic[i]
        for c in range(3):
            if all(col[w] != c for w in nb[u]):
                col[u] = c
                if bt(i + 1):
                    return True
                col[u] = -1
        return False

    if bt(0):
        return col
    # fall back to a greedy colouring with as many colours as needed
    for u in cyclic:
        used = {col[w] for w in nb[u]}
        col[u] = next(c for c in range(n + 1) if c not in used)
    return col


def select_almost_disjoint_faces(e: Embedding, c1: Sequence[int], c2: Sequence[int],
                                 faces: Sequence[FacialWalk]) -> list[FacialWalk]:
    """Pairwise almost disjoint subset of faces touching both cycles, of size >= |F|/6."""
    g = e.graph
    c1 = as_cycle(g, c1)
    c2 = as_cycle(g, c2)
    s1, s2 = set(c1), set(c2)
    F = list(faces)
    for f in F:
        if not (f.vertex_set & s1 and f.vertex_set & s2):
            raise PreconditionError("every face must touch both cycles")
    if not F or faces_almost_disjoint(F):
        return F
    keys = lambda i: F[i].key
    eadj: dict[int, set[int]] = {i: set() for i in range(len(F))}
    for i in range(len(F)):
        for j in range(i + 1, len(F)):
            if F[i].edge_set & F[j].edge_set:
                eadj[i].add(j)
                eadj[j].add(i)
    # edge-sharing components
    comps = []
    seen: set[int] = set()
    for i in sorted(range(len(F)), key=keys):
        if i in seen:
            continue
        comp = [i]
        seen.add(i)
        for x in comp:
            for y in eadj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
        comps.append(comp)
    # units: a new unit starts at the first face vertex-disjoint from the opening path
    units: list[list[int]] = []
    for comp in comps:
        order, circular = _order_component(comp, eadj, keys)
        k = 0
        while k < len(order):
            f0 = order[k]
            nxt = order[k + 1] if k + 1 < len(order) else None
            P0 = _opening_path(F[f0], F[nxt] if nxt is not None else None, s1, s2)
            unit = [f0]
            k += 1
            while k < len(order) and F[order[k]].vertex_set & P0:
                unit.append(order[k])
                k += 1
            units.append(unit)
    # auxiliary unit graph, coloured along the unit order, best colour class kept
    uv = [set().union(*(F[i].vertex_set for i in u)) for u in units]
    uedges = {(a, b) for a in range(len(units)) for b in range(a + 1, len(units)) if uv[a] & uv[b]}
    col = _three_color(len(units), uedges, list(range(len(units))))
    classes: dict[int, list[int]] = {}
    for u, c in enumerate(col):
        classes.setdefault(c, []).append(u)
    best = max(classes.values(), key=lambda us: (sum(len(units[u]) for u in us), [-u for u in us]))
    chosen: list[int] = []
    for u in best:
        chosen += units[u][::2]
    picked = [F[i] for i in chosen]
    if not faces_almost_disjoint(picked):
        picked = _greedy_repair(picked)
    # plain alternation along each component competes with the constructed set
    alt: list[FacialWalk] = []
    for comp in comps:
        order, circular = _order_component(comp, eadj, keys)
        take = order[::2]
        if circular and len(order) % 2 and len(take) > 1:
            take = take[:-1]
        alt += [F[i] for i in take]
    alt = _greedy_repair(alt)
    return max((_top_up(picked, F), _top_up(alt, F)), key=len)


def _top_up(picked: list[FacialWalk], F: Sequence[FacialWalk]) -> list[FacialWalk]:
    """Add any face that keeps the selection almost disjoint."""
    out = list(picked)
    have = {f.key for f in out}
    for f in sorted(F, key=lambda f: f.key):
        if f.key not in have and faces_almost_disjoint(out + [f]):
            out.append(f)
            have.add(f.key)
    return out


def _opening_path(f: FacialWalk, nxt: FacialWalk | None, s1: set[int], s2: set[int]) -> set[int]:
    """Vertices of the side of f running from one cycle to the other, away from the next face."""
    vs = list(f.vertices)
    L = len(vs)
    on = [v in s1 or v in s2 for v in vs]
    sides = []
    for i in range(L):
        if not on[i]:
            continue
        j = (i + 1) % L
        run = [vs[i]]
        while not on[j] and j != i:
            run.append(vs[j])
            j = (j + 1) % L
        run.append(vs[j])
        a, b = run[0], run[-1]
        if (a in s1 and b in s2) or (a in s2 and b in s1):
            sides.append(run)
    if not sides:
        return set(vs)
    if nxt is not None:
        shared = nxt.vertex_set
        away = [s for s in sides if not set(s) <= shared]
        if away:
            return set(away[0])
    return set(sides[0])


def _greedy_repair(faces: list[FacialWalk]) -> list[FacialWalk]:
    out: list[FacialWalk] = []
    for f in faces:
        if faces_almost_disjoint(out + [f]):
            out.append(f)
    return out
