"""Simple undirected graphs, minor operations, blocks and canonical labelling."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, InputError

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "_adj", "_index")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()) -> None:
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        adj: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge {u}-{v} has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InputError(f"loop at vertex {u}")
            if v in adj[u]:
                raise InputError(f"parallel edge {u}-{v}")
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self.edges: tuple[Edge, ...] = tuple(
            (u, v) for u in range(n) for v in self._adj[u] if u < v
        )
        self._index: dict[Edge, int] | None = None

    # basic queries -------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and 0 <= u < self.n and v in self._adj[u]

    def edge_index(self, u: int, v: int) -> int:
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.edges)}
        return self._index[norm_edge(u, v)]

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges)})"

    # structure -----------------------------------------------------------

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [s], [s]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled order-preservingly; also returns new->old map."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        es = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(keep), es), keep

    def edge_subgraph(self, edges: Iterable[Sequence[int]]) -> tuple[Graph, list[int]]:
        """Subgraph spanned by the given edges (no isolated vertices), relabelled."""
        es = sorted({norm_edge(e[0], e[1]) for e in edges})
        keep = sorted({v for e in es for v in e})
        pos = {v: i for i, v in enumerate(keep)}
        return Graph(len(keep), [(pos[u], pos[v]) for u, v in es]), keep

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex v renamed to perm[v]."""
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def complement(self) -> Graph:
        return Graph(self.n, [(u, v) for u, v in combinations(range(self.n), 2)
                              if not self.has_edge(u, v)])

    def bfs_tree(self, root: int = 0) -> tuple[list[int], list[int]]:
        """Lexicographic BFS: returns (order, parent) with parent[root] = -1.

        Only the component of ``root`` is visited; other vertices keep parent -2.
        """
        parent = [-2] * self.n
        parent[root] = -1
        order = [root]
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            for y in self._adj[x]:
                if parent[y] == -2:
                    parent[y] = x
                    order.append(y)
        return order, parent

    def girth(self) -> int | None:
        """Length of a shortest cycle, None for forests."""
        best = None
        for s in range(self.n):
            dist = {s: 0}
            par = {s: -1}
            queue = [s]
            for x in queue:
                for y in self._adj[x]:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        par[y] = x
                        queue.append(y)
                    elif par[x] != y:
                        c = dist[x] + dist[y] + 1
                        if best is None or c < best:
                            best = c
        return best


# ---------------------------------------------------------------------------
# constructors


def complete_graph(k: int) -> Graph:
    return Graph(k, combinations(range(k), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise InputError("a cycle needs at least 3 vertices")
    return Graph(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    return Graph(k, [(i, i + 1) for i in range(k - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def wheel_graph(spokes: int) -> Graph:
    """Hub 0 joined to the rim cycle 1..spokes."""
    rim = [(i, i % spokes + 1) for i in range(1, spokes + 1)]
    return Graph(spokes + 1, [(0, i) for i in range(1, spokes + 1)] + rim)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def theta_graph(a: int, b: int, c: int) -> Graph:
    """Two branch vertices 0 and 1 joined by paths with a, b, c internal vertices."""
    edges: list[Edge] = []
    n = 2
    for k in (a, b, c):
        prev = 0
        for _ in range(k):
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, 1))
    return Graph(n, edges)


def complete_binary_tree(height: int) -> Graph:
    """Complete binary tree with ``height`` levels of vertices."""
    n = 2 ** height - 1
    return Graph(n, [((i - 1) // 2, i) for i in range(1, n)])


# ---------------------------------------------------------------------------
# minor operations


@dataclass(frozen=True)
class MinorOp:
    kind: str  # "delete-vertex" | "delete-edge" | "contract-edge"
    target: int | Edge

    def __post_init__(self) -> None:
        if self.kind not in ("delete-vertex", "delete-edge", "contract-edge"):
            raise InputError(f"unknown minor operation {self.kind!r}")


def apply_minor_op(g: Graph, op: MinorOp) -> Graph:
    if op.kind == "delete-vertex":
        v = op.target
        if not isinstance(v, int) or not 0 <= v < g.n:
            raise InputError(f"vertex {v!r} not in graph")
        return g.induced_subgraph(x for x in range(g.n) if x != v)[0]
    u, v = op.target  # type: ignore[misc]
    if not g.has_edge(u, v):
        raise InputError(f"edge {u}-{v} not in graph")
    if op.kind == "delete-edge":
        e = norm_edge(u, v)
        return Graph(g.n, [f for f in g.edges if f != e])
    # contraction: keep the smaller endpoint, drop the larger, simplify
    keep, gone = norm_edge(u, v)
    new = lambda x: keep if x == gone else x  # noqa: E731
    shift = lambda x: x - 1 if x > gone else x  # noqa: E731
    es = {norm_edge(shift(new(a)), shift(new(b))) for a, b in g.edges}
    es = {e for e in es if e[0] != e[1]}
    return Graph(g.n - 1, sorted(es))


def one_step_minors(g: Graph) -> Iterator[tuple[MinorOp, Graph]]:
    """All single deletions and contractions in the fixed order vertex, edge, contraction."""
    for v in range(g.n):
        op = MinorOp("delete-vertex", v)
        yield op, apply_minor_op(g, op)
    for e in g.edges:
        op = MinorOp("delete-edge", e)
        yield op, apply_minor_op(g, op)
    for e in g.edges:
        op = MinorOp("contract-edge", e)
        yield op, apply_minor_op(g, op)


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass
class MinorModel:
    """Branch sets: ``branch[i]`` is the vertex set of g representing vertex i of h."""

    branch: list[frozenset[int]]

    def verify(self, h: Graph, g: Graph) -> bool:
        if len(self.branch) != h.n:
            return False
        seen: set[int] = set()
        for b in self.branch:
            if not b or seen & b:
                return False
            seen |= b
            sub, _ = g.induced_subgraph(b)
            if not sub.is_connected():
                return False
        for a, b in h.edges:
            if not any(g.has_edge(x, y) for x in self.branch[a] for y in self.branch[b]):
                return False
        return True


MINOR_SEARCH_LIMIT = 16


def is_minor_of(h: Graph, g: Graph, budget: int = 5_000_000) -> MinorModel | None:
    """Branch-set search. Returns a model when h is a minor of g, else None.

    Raises BudgetExceeded when the node budget runs out before a verdict.
    """
    if g.n > MINOR_SEARCH_LIMIT:
        raise InputError(f"host graph too large for minor search ({g.n} > {MINOR_SEARCH_LIMIT})")
    if h.n > g.n or h.m > g.m:
        return None
    if h.n == 0:
        return MinorModel([])
    nbr = [0] * g.n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    full = (1 << g.n) - 1
    connected: list[tuple[int, int]] = []
    for mask in range(1, full + 1):
        low = mask & -mask
        reach = low
        while True:
            grow = reach
            x = reach
            while x:
                b = x & -x
                grow |= nbr[b.bit_length() - 1]
                x ^= b
            grow &= mask
            if grow == reach:
                break
            reach = grow
        if reach == mask:
            nm = 0
            x = mask
            while x:
                b = x & -x
                nm |= nbr[b.bit_length() - 1]
                x ^= b
            connected.append((mask, nm & ~mask))
    connected.sort(key=lambda t: (_popcount(t[0]), t[0]))

    # h-vertex order: grow along h's adjacency, highest degree first
    order: list[int] = []
    placed = [False] * h.n
    while len(order) < h.n:
        rest = [v for v in range(h.n) if not placed[v]]
        frontier = [v for v in rest if any(placed[u] for u in h.neighbors(v))]
        pool = frontier or rest
        v = max(pool, key=lambda x: (sum(placed[u] for u in h.neighbors(x)), h.degree(x), -x))
        placed[v] = True
        order.append(v)
    pos = {v: i for i, v in enumerate(order)}
    need = [[u for u in h.neighbors(v) if pos[u] < pos[v]] for v in order]
    later = [any(pos[u] > pos[v] for u in h.neighbors(v)) for v in order]
    hdeg = [h.degree(v) for v in order]

    assign = [0] * h.n
    nodes = 0

    def dfs(i: int, used: int) -> bool:
        nonlocal nodes
        if i == h.n:
            return True
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("minor search budget exhausted")
        free_after = g.n - _popcount(used) - (h.n - i - 1)
        for mask, nm in connected:
            if mask & used:
                continue
            if _popcount(mask) > free_after:
                break
            if any(not (nm & assign[pos[u]]) for u in need[i]):
                continue
            if later[i] and not (nm & ~used):
                continue
            if _popcount(nm) < hdeg[i]:
                continue
            assign[i] = mask
            if dfs(i + 1, used | mask):
                return True
        assign[i] = 0
        return False

    if not dfs(0, 0):
        return None
    branch = [frozenset()] * h.n
    for i, v in enumerate(order):
        branch[v] = frozenset(x for x in range(g.n) if assign[i] >> x & 1)
    return MinorModel(branch)


# ---------------------------------------------------------------------------
# blocks


def block_edge_partition(g: Graph) -> list[list[Edge]]:
    """Edge sets of the 2-connected blocks (bridges are single-edge blocks)."""
    disc = [-1] * g.n
    low = [0] * g.n
    blocks: list[list[Edge]] = []
    time = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = time
        time += 1
        stack: list[Edge] = []
        it = [(root, -1, iter(g.neighbors(root)))]
        while it:
            v, parent, nbrs = it[-1]
            advanced = False
            for w in nbrs:
                if disc[w] == -1:
                    stack.append((v, w))
                    disc[w] = low[w] = time
                    time += 1
                    it.append((w, v, iter(g.neighbors(w))))
                    advanced = True
                    break
                if w != parent and disc[w] < disc[v]:
                    stack.append((v, w))
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            it.pop()
            if parent >= 0:
                low[parent] = min(low[parent], low[v])
                if low[v] >= disc[parent]:
                    block: list[Edge] = []
                    while True:
                        e = stack.pop()
                        block.append(norm_edge(*e))
                        if e == (parent, v):
                            break
                    blocks.append(sorted(block))
    blocks.sort()
    return blocks


def biconnected_blocks(g: Graph) -> list[Graph]:
    """Blocks as standalone graphs, vertices relabelled order-preservingly."""
    return [g.edge_subgraph(b)[0] for b in block_edge_partition(g)]


# ---------------------------------------------------------------------------
# canonical labelling


def _refine(g: Graph, cells: list[list[int]]) -> list[list[int]]:
    while True:
        cell_of = {}
        for i, c in enumerate(cells):
            for v in c:
                cell_of[v] = i
        new: list[list[int]] = []
        changed = False
        for c in cells:
            if len(c) == 1:
                new.append(c)
                continue
            sig = {}
            for v in c:
                cnt = [0] * len(cells)
                for w in g.neighbors(v):
                    cnt[cell_of[w]] += 1
                sig[v] = tuple(cnt)
            groups: dict[tuple[int, ...], list[int]] = {}
            for v in c:
                groups.setdefault(sig[v], []).append(v)
            if len(groups) > 1:
                changed = True
            for key in sorted(groups):
                new.append(groups[key])
        cells = new
        if not changed:
            return cells


def canonical_labeling(g: Graph, budget: int = 2_000_000) -> tuple[int, list[int]]:
    """Return (certificate, labelling) with labelling[v] the canonical label of v.

    The certificate is the upper-triangle adjacency bitmask of the relabelled
    graph, minimised over the leaves of an individualise-refine search with
    pruning by discovered automorphisms.
    """
    n = g.n
    if n == 0:
        return 0, []
    best: list = [None, None]
    autos: list[list[int]] = []
    leaves = 0

    def cert_of(lab: list[int]) -> int:
        c = 0
        for u, v in g.edges:
            a, b = lab[u], lab[v]
            if a > b:
                a, b = b, a
            c |= 1 << (b * (b - 1) // 2 + a)
        return c

    def search(cells: list[list[int]], fixed: list[int]) -> None:
        nonlocal leaves
        cells = _refine(g, cells)
        if all(len(c) == 1 for c in cells):
            leaves += 1
            if leaves > budget:
                raise BudgetExceeded("canonical labelling budget exhausted")
            lab = [0] * n
            for i, c in enumerate(cells):
                lab[c[0]] = i
            c = cert_of(lab)
            if best[0] is None or c < best[0]:
                best[0], best[1] = c, lab
            elif c == best[0]:
                inv = [0] * n
                for v, l in enumerate(best[1]):
                    inv[l] = v
                autos.append([inv[lab[v]] for v in range(n)])
            return
        idx = next(i for i, c in enumerate(cells) if len(c) > 1)
        target = cells[idx]
        done: list[int] = []
        for v in target:
            # skip v if an automorphism fixing `fixed` pointwise maps an explored child to v
            if done and _in_orbit(v, done, fixed, autos, n):
                continue
            rest = [w for w in target if w != v]
            search(cells[:idx] + [[v], rest] + cells[idx + 1:], fixed + [v])
            done.append(v)

    search([list(range(n))], [])
    return best[0], best[1]


def _in_orbit(v: int, done: list[int], fixed: list[int], autos: list[list[int]], n: int) -> bool:
    gens = [a for a in autos if all(a[x] == x for x in fixed)]
    if not gens:
        return False
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in gens:
        for x in range(n):
            rx, ry = find(x), find(a[x])
            if rx != ry:
                parent[rx] = ry
    rv = find(v)
    return any(find(d) == rv for d in done)


def canonical_form(g: Graph) -> Graph:
    _, lab = canonical_labeling(g)
    return g.relabel(lab)


def certificate(g: Graph) -> tuple[int, int]:
    return g.n, canonical_labeling(g)[0]


def is_isomorphic(a: Graph, b: Graph) -> bool:
    if a.n != b.n or a.m != b.m or sorted(a.degrees()) != sorted(b.degrees()):
        return False
    return certificate(a) == certificate(b)


def connected_graphs(n: int) -> list[Graph]:
    """All connected graphs on n vertices up to isomorphism, in canonical form.

    Every connected graph has a non-cut vertex, so each arises from a
    connected graph on n-1 vertices by adding a vertex with a nonempty
    neighbourhood; duplicates are removed by canonical certificate.
    """
    if n <= 0:
        return []
    level = {certificate(Graph(1)): Graph(1)}
    for k in range(2, n + 1):
        nxt: dict[tuple[int, int], Graph] = {}
        for base in level.values():
            for r in range(1, k):
                for nb in combinations(range(k - 1), r):
                    cand = Graph(k, list(base.edges) + [(x, k - 1) for x in nb])
                    key = certificate(cand)
                    if key not in nxt:
                        nxt[key] = cand
        level = nxt
    return [canonical_form(g) for _, g in sorted(level.items())]
