"""Combinatorial embeddings: rotation system plus edge signature.

An embedding stores, for every vertex, the cyclic order of its neighbours
and a sign in {+1, -1} for every edge. Faces are traced on states
(u, v, s): the edge u->v is being traversed while the rotations are read
forwards (s = +1) or backwards (s = -1). On arrival at v the orientation
becomes s * sign(uv) and the walk continues to the neighbour that follows
u in the rotation at v read in that orientation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterator, Sequence

from .errors import BudgetExceeded, InputError, PreconditionError
from .graph import Edge, Graph, norm_edge

State = tuple[int, int, int]


def _cyclic_normal(seq: Sequence[int]) -> tuple[int, ...]:
    if not seq:
        return ()
    i = seq.index(min(seq))
    return tuple(seq[i:]) + tuple(seq[:i])


def _cyclic_reverse(seq: Sequence[int]) -> tuple[int, ...]:
    if not seq:
        return ()
    return (seq[0],) + tuple(reversed(seq[1:]))


@dataclass(frozen=True)
class SurfaceSpec:
    euler_genus: int
    orientable: bool

    def __post_init__(self) -> None:
        if self.euler_genus < 0:
            raise InputError("Euler genus must be nonnegative")
        if self.orientable and self.euler_genus % 2:
            raise InputError("an orientable surface has even Euler genus")
        if not self.orientable and self.euler_genus == 0:
            raise InputError("a nonorientable surface has Euler genus at least 1")

    @property
    def name(self) -> str:
        if self.orientable:
            return "sphere" if self.euler_genus == 0 else f"O{self.euler_genus // 2}"
        return f"N{self.euler_genus}"

    @classmethod
    def parse(cls, text: str) -> SurfaceSpec:
        t = text.strip().lower()
        named = {
            "sphere": (0, True), "plane": (0, True), "s0": (0, True), "o0": (0, True),
            "projective-plane": (1, False), "pp": (1, False),
            "torus": (2, True), "klein-bottle": (2, False), "klein": (2, False),
        }
        if t in named:
            return cls(*named[t])
        try:
            if t.startswith("o"):
                return cls(2 * int(t[1:]), True)
            if t.startswith("n"):
                return cls(int(t[1:]), False)
        except ValueError:
            pass
        raise InputError(f"unrecognised surface {text!r} (use sphere, pp, torus, klein, O<h>, N<k>)")


SPHERE = SurfaceSpec(0, True)
PROJECTIVE_PLANE = SurfaceSpec(1, False)
TORUS = SurfaceSpec(2, True)
KLEIN_BOTTLE = SurfaceSpec(2, False)


@dataclass(frozen=True)
class FacialWalk:
    """Closed walk of the face tracing; steps are (u, v, s) traversal states."""

    steps: tuple[State, ...]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(u for u, _, _ in self.steps)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(norm_edge(u, v) for u, v, _ in self.steps)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    @property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def is_cycle(self) -> bool:
        vs = self.vertices
        return len(vs) >= 3 and len(set(vs)) == len(vs)

    @property
    def key(self) -> tuple[int, ...]:
        """Vertex sequence normalised up to rotation and reversal."""
        return cyclic_key(self.vertices)


def cyclic_key(vs: Sequence[int]) -> tuple[int, ...]:
    vs = tuple(vs)
    if not vs:
        return ()
    best = None
    n = len(vs)
    for seq in (vs, vs[::-1]):
        for i in range(n):
            cand = seq[i:] + seq[:i]
            if best is None or cand < best:
                best = cand
    return best


@dataclass(frozen=True)
class Embedding:
    graph: Graph
    rotation: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]
    _pos: list = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        g = self.graph
        if len(self.rotation) != g.n:
            raise InputError("rotation must list every vertex")
        rot = []
        for v, r in enumerate(self.rotation):
            r = tuple(int(x) for x in r)
            if sorted(r) != list(g.neighbors(v)):
                raise InputError(f"rotation at {v} is not a cyclic order of its neighbours")
            rot.append(_cyclic_normal(r))
        object.__setattr__(self, "rotation", tuple(rot))
        if len(self.signs) != g.m or any(s not in (1, -1) for s in self.signs):
            raise InputError("signature must give +1 or -1 for every edge")
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        pos = [{w: i for i, w in enumerate(r)} for r in rot]
        object.__setattr__(self, "_pos", pos)

    @classmethod
    def from_maps(cls, graph: Graph, rotation: Sequence[Sequence[int]],
                  signature: dict | None = None) -> Embedding:
        signature = signature or {}
        signs = [int(signature.get(e, signature.get((e[1], e[0]), 1))) for e in graph.edges]
        return cls(graph, tuple(tuple(r) for r in rotation), tuple(signs))

    @classmethod
    def planar_default(cls, graph: Graph) -> Embedding:
        """Sorted rotations, all signs positive (not planar in general)."""
        return cls(graph, tuple(graph.neighbors(v) for v in range(graph.n)), (1,) * graph.m)

    def sign(self, u: int, v: int) -> int:
        return self.signs[self.graph.edge_index(u, v)]

    def next_neighbor(self, v: int, u: int, s: int) -> int:
        r = self.rotation[v]
        return r[(self._pos[v][u] + s) % len(r)]

    def signature_map(self) -> dict[Edge, int]:
        return dict(zip(self.graph.edges, self.signs))

    # serialisation -------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": [list(e) for e in self.graph.edges],
            "rotation": [list(r) for r in self.rotation],
            "signature": [[u, v, s] for (u, v), s in zip(self.graph.edges, self.signs)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True)

    @classmethod
    def from_document(cls, doc: dict) -> Embedding:
        try:
            n = int(doc["n"])
            edges = [tuple(e) for e in doc.get("edges", [])]
            rotation = doc["rotation"]
            sig = {norm_edge(int(u), int(v)): int(s) for u, v, s in doc.get("signature", [])}
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed embedding document: {exc}") from None
        if not edges:
            edges = sorted({norm_edge(v, w) for v, r in enumerate(rotation) for w in r})
        g = Graph(n, edges)
        for e in sig:
            if not g.has_edge(*e):
                raise InputError(f"signature names a non-edge {e}")
        return cls.from_maps(g, rotation, sig)

    @classmethod
    def loads(cls, text: str) -> Embedding:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"embedding document is not JSON: {exc.msg}", exc.pos) from None
        return cls.from_document(doc)


# ---------------------------------------------------------------------------
# face tracing


def _mirror(e: Embedding, st: State) -> State:
    u, v, s = st
    return (v, u, -s * e.sign(u, v))


def _successor(e: Embedding, st: State) -> State:
    u, v, s = st
    t = s * e.sign(u, v)
    return (v, e.next_neighbor(v, u, t), t)


def trace_faces(e: Embedding, require_connected: bool = True) -> list[FacialWalk]:
    g = e.graph
    if require_connected and not g.is_connected():
        raise PreconditionError("face tracing needs a connected graph")
    seen: set[State] = set()
    faces = []
    for u in range(g.n):
        for v in g.neighbors(u):
            for s in (1, -1):
                st0 = (u, v, s)
                if st0 in seen:
                    continue
                walk = []
                st = st0
                while True:
                    walk.append(st)
                    st = _successor(e, st)
                    if st == st0:
                        break
                orbit = set(walk)
                mirror = {_mirror(e, x) for x in walk}
                if orbit & mirror:
                    raise AssertionError("face orbit coincides with its mirror")
                seen |= orbit | mirror
                faces.append(FacialWalk(tuple(walk)))
    return faces


def face_count(e: Embedding) -> int:
    return max(1, len(trace_faces(e, require_connected=False))) if e.graph.n else 0


def euler_genus(e: Embedding) -> int:
    g = e.graph
    if not g.is_connected() or g.n == 0:
        raise PreconditionError("Euler genus of an embedding needs a nonempty connected graph")
    f = max(1, len(trace_faces(e)))
    return 2 - g.n + g.m - f


def component_genus(e: Embedding) -> int:
    """Sum of the Euler genus of each connected component of the embedded graph."""
    total = 0
    for comp in e.graph.components():
        sub, _ = induced_embedding(e, comp)
        total += euler_genus(sub)
    return total


def face_length_multiset(e: Embedding) -> list[int]:
    return sorted(len(f) for f in trace_faces(e, require_connected=False))


# ---------------------------------------------------------------------------
# local changes, equivalence, orientability


def local_change(e: Embedding, v: int) -> Embedding:
    g = e.graph
    if not 0 <= v < g.n:
        raise InputError(f"vertex {v} not in graph")
    rot = list(e.rotation)
    rot[v] = _cyclic_reverse(rot[v])
    signs = list(e.signs)
    for w in g.neighbors(v):
        i = g.edge_index(v, w)
        signs[i] = -signs[i]
    return Embedding(g, tuple(rot), tuple(signs))


def apply_local_changes(e: Embedding, vertices) -> Embedding:
    vs = set(vertices)
    g = e.graph
    rot = tuple(_cyclic_reverse(r) if v in vs else r for v, r in enumerate(e.rotation))
    signs = tuple(s * (-1 if ((u in vs) != (w in vs)) else 1)
                  for (u, w), s in zip(g.edges, e.signs))
    return Embedding(g, rot, signs)


def embeddings_equivalent(a: Embedding, b: Embedding) -> frozenset[int] | None:
    """Vertex set W with local changes at W turning a into b, or None.

    Membership is forced along a spanning forest: an edge whose sign differs
    must have exactly one endpoint in W. Rotations fix membership at vertices
    of degree at least 3. Among valid W the smallest (then lexicographic) is
    returned.
    """
    g = a.graph
    if b.graph != g:
        raise InputError("embeddings are over different graphs")
    need = []
    for v in range(g.n):
        same = a.rotation[v] == b.rotation[v]
        rev = _cyclic_reverse(a.rotation[v]) == b.rotation[v] or \
            _cyclic_normal(_cyclic_reverse(a.rotation[v])) == b.rotation[v]
        if not same and not rev:
            return None
        need.append(None if (same and rev) else (0 if same else 1))
    diff = {e: int(sa != sb) for e, sa, sb in zip(g.edges, a.signs, b.signs)}
    result: set[int] = set()
    for comp in g.components():
        root = comp[0]
        options = []
        for r0 in (0, 1):
            x = {root: r0}
            order = [root]
            for y in order:
                for z in g.neighbors(y):
                    if z not in x:
                        x[z] = x[y] ^ diff[norm_edge(y, z)]
                        order.append(z)
            ok = all(x[u] ^ x[w] == diff[(u, w)] for u, w in g.edges if u in x)
            ok = ok and all(need[v] is None or need[v] == x[v] for v in comp)
            if ok:
                options.append(sorted(v for v in comp if x[v]))
        if not options:
            return None
        result |= set(min(options, key=lambda w: (len(w), w)))
    return frozenset(result)


def normalized_signs(e: Embedding, root: int = 0) -> tuple[dict[int, int], dict[Edge, int]]:
    """Switch vertices so BFS-tree edges become +1; returns (switch, new signs)."""
    g = e.graph
    x: dict[int, int] = {}
    for comp in g.components():
        r = comp[0] if root not in comp else root
        x[r] = 1
        order = [r]
        for y in order:
            for z in g.neighbors(y):
                if z not in x:
                    x[z] = x[y] * e.sign(y, z)
                    order.append(z)
    return x, {(u, w): s * x[u] * x[w] for (u, w), s in zip(g.edges, e.signs)}


def is_orientable_embedding(e: Embedding) -> bool:
    _, sig = normalized_signs(e)
    return all(s == 1 for s in sig.values())


def cycle_sign(e: Embedding, vertices: Sequence[int]) -> int:
    p = 1
    k = len(vertices)
    for i in range(k):
        u, v = vertices[i], vertices[(i + 1) % k]
        if not e.graph.has_edge(u, v):
            raise InputError(f"{u}-{v} is not an edge")
        p *= e.sign(u, v)
    return p


# ---------------------------------------------------------------------------
# sub-embeddings


def induced_embedding(e: Embedding, vertices=None, edges=None) -> tuple[Embedding, list[int]]:
    """Restriction of e to a vertex set or an edge set, relabelled order-preservingly.

    With ``edges`` the vertex set is the set of their endpoints (plus
    ``vertices`` if given). Returns the embedding and the new->old vertex map.
    """
    g = e.graph
    if edges is not None:
        es = {norm_edge(*x) for x in edges}
        vs = {v for x in es for v in x} | set(vertices or ())
    else:
        vs = set(range(g.n) if vertices is None else vertices)
        es = {x for x in g.edges if x[0] in vs and x[1] in vs}
    keep = sorted(vs)
    pos = {v: i for i, v in enumerate(keep)}
    sub = Graph(len(keep), [(pos[u], pos[w]) for u, w in sorted(es)])
    rot = []
    for v in keep:
        rot.append(tuple(pos[w] for w in e.rotation[v] if norm_edge(v, w) in es))
    signs = tuple(e.sign(keep[u], keep[w]) for u, w in sub.edges)
    return Embedding(sub, tuple(rot), signs), keep


# ---------------------------------------------------------------------------
# enumeration of equivalence classes


def class_count(g: Graph) -> int:
    """Number of local-change classes of embeddings of a connected graph."""
    rot = 1
    for v in range(g.n):
        rot *= math.factorial(max(g.degree(v) - 1, 0))
    total = rot * 2 ** (g.m - g.n + 1)
    if g.max_degree() >= 3:
        total //= 2
    return total


def _rotations(nbrs: Sequence[int]) -> list[tuple[int, ...]]:
    if len(nbrs) <= 2:
        return [tuple(nbrs)]
    first, rest = nbrs[0], nbrs[1:]
    return [(first,) + p for p in permutations(rest)]


def enumerate_embeddings(g: Graph, budget: int = 2_000_000) -> Iterator[Embedding]:
    """One embedding per local-change class.

    BFS-tree edges carry +1, other edges range over both signs, and the first
    vertex of degree at least 3 only takes rotations that precede their
    reversal, which removes the global local change.
    """
    if not g.is_connected():
        raise PreconditionError("enumeration needs a connected graph")
    count = class_count(g)
    if count > budget:
        raise BudgetExceeded(f"{count} embedding classes exceed budget {budget}")
    _, parent = g.bfs_tree(0)
    tree = {norm_edge(v, parent[v]) for v in range(g.n) if parent[v] >= 0}
    free = [i for i, e in enumerate(g.edges) if e not in tree]
    pivot = next((v for v in range(g.n) if g.degree(v) >= 3), None)
    choices = []
    for v in range(g.n):
        rs = _rotations(g.neighbors(v))
        if v == pivot:
            rs = [r for r in rs if r < _cyclic_reverse(r)]
        choices.append(rs)
    for rot in product(*choices):
        for bits in product((1, -1), repeat=len(free)):
            signs = [1] * g.m
            for i, s in zip(free, bits):
                signs[i] = s
            yield Embedding(g, rot, tuple(signs))
