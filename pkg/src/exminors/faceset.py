"""Embedding search over face sets, for near-triangulation targets.

A family W of closed walks is the face set of a cellular embedding exactly
when every edge is traversed twice in total and, at every vertex v, the
corners (x, v, y) used by W link the neighbours of v into one cycle. That
cycle is the rotation at v. When the requested face count leaves little
room above the girth, every face is short, and choosing faces directly
prunes far better than choosing rotations.

The rotation-system search in genus.py is the other route; tests compare
the two on random graphs.
"""

from __future__ import annotations

from .embedding import Embedding, cyclic_key, trace_faces
from .errors import BudgetExceeded
from .graph import Graph, norm_edge

MAX_CANDIDATES = 150_000


def max_face_length(g: Graph, faces: int) -> int:
    girth = g.girth() or 3
    return 2 * g.m - (faces - 1) * girth


def closed_walks(g: Graph, max_len: int, limit: int = MAX_CANDIDATES) -> list[tuple[int, ...]] | None:
    """Closed walks without backtracking, up to rotation and reversal.

    Each edge is used at most twice. Returns None when more than ``limit``
    walks exist.
    """
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    for start in range(g.n):
        path = [start]
        use: dict = {}

        def dfs() -> bool:
            v = path[-1]
            for w in g.neighbors(v):
                if len(path) >= 2 and w == path[-2]:
                    continue
                if w < start:
                    continue
                e = norm_edge(v, w)
                if use.get(e, 0) >= 2:
                    continue
                if w == start and len(path) >= 3 and path[1] != v:
                    key = cyclic_key(path)
                    if key not in seen:
                        seen.add(key)
                        out.append(key)
                        if len(out) > limit:
                            return False
                if len(path) < max_len:
                    use[e] = use.get(e, 0) + 1
                    path.append(w)
                    if not dfs():
                        return False
                    path.pop()
                    use[e] -= 1
            return True

        if not dfs():
            return None
    out.sort(key=lambda k: (len(k), k))
    return out


class _Links:
    """Corner bookkeeping per vertex: the link must stay a union of paths
    until it closes into a single cycle through every neighbour."""

    def __init__(self, g: Graph) -> None:
        self.g = g
        self.cdeg = [dict.fromkeys(g.neighbors(v), 0) for v in range(g.n)]
        self.end = [{w: w for w in g.neighbors(v)} for v in range(g.n)]
        self.size = [dict.fromkeys(g.neighbors(v), 1) for v in range(g.n)]
        self.closed = [False] * g.n
        self.log: list = []

    def add(self, v: int, a: int, b: int) -> bool:
        cd = self.cdeg[v]
        if self.closed[v] or cd[a] >= 2 or cd[b] >= 2 or a == b:
            return False
        end, size = self.end[v], self.size[v]
        ea, eb = end[a], end[b]
        if ea == b:
            if size[a] != len(cd):
                return False
            self.log.append(("close", v, a, b))
            self.closed[v] = True
            cd[a] += 1
            cd[b] += 1
            return True
        s = size[a] + size[b]
        self.log.append(("join", v, a, b, ea, eb, end[ea], end[eb], size[ea], size[eb]))
        cd[a] += 1
        cd[b] += 1
        end[ea], end[eb] = eb, ea
        size[ea] = size[eb] = s
        return True

    def mark(self) -> int:
        return len(self.log)

    def undo(self, mark: int) -> None:
        while len(self.log) > mark:
            rec = self.log.pop()
            v, a, b = rec[1], rec[2], rec[3]
            self.cdeg[v][a] -= 1
            self.cdeg[v][b] -= 1
            if rec[0] == "close":
                self.closed[v] = False
            else:
                _, _, _, _, ea, eb, oa, ob, sa, sb = rec
                end, size = self.end[v], self.size[v]
                end[ea], end[eb] = oa, ob
                size[ea], size[eb] = sa, sb


def _corners(walk: tuple[int, ...]) -> list[tuple[int, int, int]]:
    n = len(walk)
    return [(walk[i], walk[i - 1], walk[(i + 1) % n]) for i in range(n)]


def _walk_edges(walk: tuple[int, ...]) -> list:
    n = len(walk)
    return [norm_edge(walk[i], walk[(i + 1) % n]) for i in range(n)]


def orientable_faces(walks: list[tuple[int, ...]]) -> bool:
    """Can the walks be oriented so every edge is used once in each direction?"""
    trav: dict = {}
    for f, w in enumerate(walks):
        n = len(w)
        for i in range(n):
            a, b = w[i], w[(i + 1) % n]
            trav.setdefault(norm_edge(a, b), []).append((f, 1 if a < b else -1))
    color: dict[int, int] = {}
    adj: dict[int, list] = {}
    for (f1, d1), (f2, d2) in trav.values():
        # need o1*d1 == -o2*d2
        adj.setdefault(f1, []).append((f2, -d1 * d2))
        adj.setdefault(f2, []).append((f1, -d1 * d2))
    for f in range(len(walks)):
        if f in color:
            continue
        color[f] = 1
        stack = [f]
        while stack:
            x = stack.pop()
            for y, rel in adj.get(x, ()):
                want = color[x] * rel
                if y not in color:
                    color[y] = want
                    stack.append(y)
                elif color[y] != want:
                    return False
    return True


def embedding_from_faces(g: Graph, walks: list[tuple[int, ...]]) -> Embedding:
    """Rotation from the vertex links, signs from the corner sides."""
    link: list[dict[int, list[int]]] = [{} for _ in range(g.n)]
    for w in walks:
        for v, a, b in _corners(w):
            link[v].setdefault(a, []).append(b)
            link[v].setdefault(b, []).append(a)
    rotation = []
    for v in range(g.n):
        nb = g.neighbors(v)
        order = [nb[0]]
        prev = None
        while len(order) < len(nb):
            cur = order[-1]
            nxt = [x for x in link[v][cur] if x != prev and x not in order]
            prev = cur
            order.append(nxt[0])
        rotation.append(tuple(order))
    pos = [{w: i for i, w in enumerate(r)} for r in rotation]

    # side taken at each corner: +1 successor, -1 predecessor, None free (degree 2)
    var: dict = {}
    sides = []
    for f, w in enumerate(walks):
        row = []
        for i, (v, a, b) in enumerate(_corners(w)):
            k = len(rotation[v])
            if k == 2:
                var[(f, i)] = len(var)
                row.append(None)
            else:
                row.append(1 if (pos[v][a] + 1) % k == pos[v][b] else -1)
        sides.append(row)
    # each edge traversal gives lambda = d_i * d_{i+1}; both traversals must agree
    trav: dict = {}
    for f, w in enumerate(walks):
        n = len(w)
        for i in range(n):
            trav.setdefault(norm_edge(w[i], w[(i + 1) % n]), []).append(((f, i), (f, (i + 1) % n)))
    def row(corners, const: int) -> tuple[int, int]:
        mask = 0
        for f, i in corners:
            d = sides[f][i]
            if d is None:
                mask ^= 1 << var[(f, i)]
            elif d < 0:
                const ^= 1
        return mask, const

    def head(c) -> int:
        f, i = c
        return walks[f][i]

    rows = []
    for (c1, c2), (c3, c4) in trav.values():
        rows.append(row((c1, c2, c3, c4), 0))
        # the four traversal states of an edge are distinct
        if head(c1) == head(c3):
            rows.append(row((c1, c3), 1))
        else:
            rows.append(row((c3, c2), 0))
    sol = _solve_gf2(rows, len(var))
    if sol is None:
        raise AssertionError("face set has no consistent signature")
    for (f, i), j in var.items():
        sides[f][i] = -1 if sol >> j & 1 else 1
    signs: dict = {}
    for f, w in enumerate(walks):
        n = len(w)
        for i in range(n):
            signs[norm_edge(w[i], w[(i + 1) % n])] = sides[f][i] * sides[f][(i + 1) % n]
    emb = Embedding(g, tuple(rotation), tuple(signs[e] for e in g.edges))
    got = sorted(f.key for f in trace_faces(emb))
    if got != sorted(cyclic_key(w) for w in walks):
        raise AssertionError("reconstructed embedding does not reproduce the face set")
    return emb


def _solve_gf2(rows: list[tuple[int, int]], nvars: int) -> int | None:
    pivots: dict[int, tuple[int, int]] = {}
    for mask, const in rows:
        for bit, (pm, pc) in pivots.items():
            if mask >> bit & 1:
                mask ^= pm
                const ^= pc
        if mask == 0:
            if const:
                return None
            continue
        bit = mask.bit_length() - 1
        for b2, (pm, pc) in list(pivots.items()):
            if pm >> bit & 1:
                pivots[b2] = (pm ^ mask, pc ^ const)
        pivots[bit] = (mask, const)
    sol = 0
    for bit, (mask, const) in pivots.items():
        if const:
            sol |= 1 << bit
    return sol


class FaceSetSearch:
    """Find an embedding with exactly ``faces`` faces of the requested type."""

    def __init__(self, g: Graph, faces: int, budget: int,
                 candidates: list[tuple[int, ...]] | None = None) -> None:
        self.g = g
        self.faces = faces
        self.budget = budget
        self.nodes = 0
        self.girth = g.girth() or 3
        self.max_len = max_face_length(g, faces)
        if candidates is None:
            candidates = closed_walks(g, self.max_len) or []
        self.walks = [w for w in candidates if len(w) <= self.max_len]
        self.wedges = [_walk_edges(w) for w in self.walks]
        self.by_edge: dict = {e: [] for e in g.edges}
        for i, es in enumerate(self.wedges):
            for e in set(es):
                self.by_edge[e].append(i)

    def run(self, mode: str | None) -> Embedding | None:
        g = self.g
        if self.faces < 1 or self.max_len < self.girth:
            return None
        cover = dict.fromkeys(g.edges, 0)
        links = _Links(g)
        chosen: list[int] = []
        banned: set[int] = set()
        longest = max((len(w) for w in self.walks), default=0)
        slots = [2 * g.m]

        def fits(i: int) -> bool:
            need: dict = {}
            for e in self.wedges[i]:
                need[e] = need.get(e, 0) + 1
            return all(cover[e] + c <= 2 for e, c in need.items())

        def rec() -> Embedding | None:
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded("face-set search budget exhausted")
            left = self.faces - len(chosen)
            if slots[0] == 0:
                if left:
                    return None
                ws = [self.walks[i] for i in chosen]
                ori = orientable_faces(ws)
                if (mode == "orientable" and not ori) or (mode == "nonorientable" and ori):
                    return None
                return embedding_from_faces(g, ws)
            if left <= 0 or slots[0] < self.girth * left or slots[0] > longest * left:
                return None
            best, best_opts = None, None
            for e, c in cover.items():
                if c == 2:
                    continue
                opts = [i for i in self.by_edge[e] if i not in banned and fits(i)]
                if not opts:
                    return None
                if best_opts is None or (len(opts), -c) < (len(best_opts), -cover[best]):
                    best, best_opts = e, opts
            added: list[int] = []
            for i in best_opts:
                mark = links.mark()
                if all(links.add(v, a, b) for v, a, b in _corners(self.walks[i])):
                    for e in self.wedges[i]:
                        cover[e] += 1
                    slots[0] -= len(self.walks[i])
                    chosen.append(i)
                    got = rec()
                    if got is not None:
                        return got
                    chosen.pop()
                    slots[0] += len(self.walks[i])
                    for e in self.wedges[i]:
                        cover[e] -= 1
                links.undo(mark)
                # every solution using i below this node has been seen
                banned.add(i)
                added.append(i)
            banned.difference_update(added)
            return None

        return rec()


def usable(g: Graph, faces: int, max_len_cap: int = 6) -> list[tuple[int, ...]] | None:
    """Candidate walks if the face-set route is worthwhile for this target."""
    if faces < 1 or g.m < 3:
        return None
    ml = max_face_length(g, faces)
    if ml > max_len_cap or ml < (g.girth() or 3):
        return None
    return closed_walks(g, ml)
