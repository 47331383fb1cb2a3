"""Tree and path decompositions: validation, metrics, linkedness, exact widths."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .errors import InputError, PreconditionError
from .graph import Graph, certificate, norm_edge

MAX_EXACT_VERTICES = 12
# the separation DP is cheaper per state than the elimination DP
MAX_PATHWIDTH_VERTICES = 16


@dataclass
class TreeDecomposition:
    """Bags indexed by tree node; the tree is given by its edge list."""

    bags: list[frozenset[int]]
    tree_edges: list[tuple[int, int]]

    def __post_init__(self) -> None:
        self.bags = [frozenset(b) for b in self.bags]
        self.tree_edges = [norm_edge(a, b) for a, b in self.tree_edges]

    @property
    def nodes(self) -> int:
        return len(self.bags)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def is_tree(self) -> bool:
        k = self.nodes
        if k == 0 or len(self.tree_edges) != k - 1:
            return False
        if any(not (0 <= a < k and 0 <= b < k) or a == b for a, b in self.tree_edges):
            return False
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == k

    def is_path(self) -> bool:
        return self.is_tree() and all(len(a) <= 2 for a in self.adjacency())

    def tree_path(self, s: int, t: int) -> list[int]:
        adj = self.adjacency()
        parent = {s: None}
        dq = deque([s])
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if y not in parent:
                    parent[y] = x
                    dq.append(y)
        if t not in parent:
            raise PreconditionError(f"no tree path between nodes {s} and {t}")
        path = [t]
        while path[-1] != s:
            path.append(parent[path[-1]])
        return path[::-1]

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def to_document(self) -> dict:
        return {"bags": [sorted(b) for b in self.bags],
                "tree_edges": [list(e) for e in self.tree_edges]}

    @classmethod
    def from_document(cls, doc: dict) -> TreeDecomposition:
        try:
            return cls([frozenset(b) for b in doc["bags"]],
                       [tuple(e) for e in doc["tree_edges"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed decomposition document: {exc}") from None


@dataclass
class Validation:
    valid: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def validate_decomposition(g: Graph, d: TreeDecomposition) -> Validation:
    """Check the tree shape and the three axioms; report the first violation."""
    if not d.is_tree():
        return Validation(False, "tree: node graph is not a tree")
    covered = set().union(*d.bags)
    extra = covered - set(range(g.n))
    if extra:
        return Validation(False, f"bags mention non-vertices {sorted(extra)}")
    missing = set(range(g.n)) - covered
    if missing:
        return Validation(False, f"axiom 1: vertex {min(missing)} in no bag")
    for u, v in g.edges:
        if not any(u in b and v in b for b in d.bags):
            return Validation(False, f"axiom 2: edge {u}-{v} in no bag")
    adj = d.adjacency()
    for v in range(g.n):
        holders = [t for t, b in enumerate(d.bags) if v in b]
        seen = {holders[0]}
        stack = [holders[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen and v in d.bags[y]:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(holders):
            return Validation(False, f"axiom 3: nodes holding vertex {v} are not connected")
    return Validation(True)


@dataclass
class Metrics:
    width: int
    height: int        # order of a longest tree path
    max_degree: int
    nodes: int


def decomposition_metrics(d: TreeDecomposition) -> Metrics:
    if not d.is_tree():
        raise PreconditionError("metrics need a decomposition whose node graph is a tree")
    adj = d.adjacency()

    def farthest(s: int) -> tuple[int, int]:
        dist = {s: 1}
        dq = deque([s])
        last = s
        while dq:
            x = dq.popleft()
            last = x
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    dq.append(y)
        return last, dist[last]

    a, _ = farthest(0)
    _, height = farthest(a)
    return Metrics(d.width(), height, max(len(x) for x in adj), d.nodes)


# ---------------------------------------------------------------------------
# linkedness


def max_disjoint_paths(g: Graph, sources: frozenset[int], targets: frozenset[int]) -> int:
    """Maximum number of vertex-disjoint sources-targets paths (Menger, unit flow).

    A vertex in both sets counts as a trivial path.
    """
    # vertex v splits into in=2v, out=2v+1 with capacity 1
    n = 2 * g.n + 2
    src, snk = n - 2, n - 1
    cap: dict[tuple[int, int], int] = {}
    adj: list[list[int]] = [[] for _ in range(n)]

    def arc(a: int, b: int) -> None:
        if (a, b) not in cap:
            adj[a].append(b)
            adj[b].append(a)
            cap.setdefault((b, a), 0)
        cap[(a, b)] = 1

    for v in range(g.n):
        arc(2 * v, 2 * v + 1)
    for u, v in g.edges:
        arc(2 * u + 1, 2 * v)
        arc(2 * v + 1, 2 * u)
    for s in sources:
        arc(src, 2 * s)
    for t in targets:
        arc(2 * t + 1, snk)
    flow = 0
    while True:
        parent = {src: None}
        dq = deque([src])
        while dq and snk not in parent:
            x = dq.popleft()
            for y in adj[x]:
                if y not in parent and cap[(x, y)] > 0:
                    parent[y] = x
                    dq.append(y)
        if snk not in parent:
            return flow
        y = snk
        while parent[y] is not None:
            x = parent[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x
        flow += 1


@dataclass
class LinkedResult:
    linked: bool
    violation: tuple[int, int, int] | None = None   # (t1, t2, k)
    flow: int | None = None

    def __bool__(self) -> bool:
        return self.linked


def is_linked(g: Graph, d: TreeDecomposition, k_max: int | None = None) -> LinkedResult:
    """Every node pair has k disjoint bag-to-bag paths or a bag of size < k between them.

    k_max defaults to width + 1; larger k is vacuous since every bag is smaller.
    """
    if not validate_decomposition(g, d):
        raise PreconditionError("is_linked needs a valid decomposition")
    if k_max is None:
        k_max = d.width() + 1
    for t1, t2 in combinations(range(d.nodes), 2):
        path = d.tree_path(t1, t2)
        smallest = min(len(d.bags[t]) for t in path)
        need = min(smallest, k_max)
        f = max_disjoint_paths(g, d.bags[t1], d.bags[t2])
        if f < need:
            return LinkedResult(False, (t1, t2, f + 1), f)
    return LinkedResult(True)


def check_path_minimality(d: TreeDecomposition, path: list[int]) -> bool:
    """No bag along the path is covered by the union of the bags before it."""
    for a, b in zip(path, path[1:]):
        if norm_edge(a, b) not in set(d.tree_edges):
            raise PreconditionError(f"{a}-{b} is not a tree edge")
    seen: set[int] = set()
    for i, t in enumerate(path):
        if i and d.bags[t] <= seen:
            return False
        seen |= d.bags[t]
    return True


def all_tree_paths(d: TreeDecomposition) -> list[list[int]]:
    return [d.tree_path(s, t) for s in range(d.nodes) for t in range(d.nodes) if s != t]


def minimize_decomposition(d: TreeDecomposition) -> TreeDecomposition:
    """Contract tree edges whose one bag contains the other."""
    bags = list(d.bags)
    edges = set(d.tree_edges)
    alive = set(range(len(bags)))
    changed = True
    while changed:
        changed = False
        for a, b in sorted(edges):
            if bags[a] <= bags[b] or bags[b] <= bags[a]:
                keep, gone = (b, a) if bags[a] <= bags[b] else (a, b)
                edges.discard((a, b))
                for x, y in list(edges):
                    if gone in (x, y):
                        edges.discard((x, y))
                        other = y if x == gone else x
                        edges.add(norm_edge(keep, other))
                alive.discard(gone)
                changed = True
                break
    order = sorted(alive)
    idx = {t: i for i, t in enumerate(order)}
    return TreeDecomposition([bags[t] for t in order],
                             [(idx[a], idx[b]) for a, b in sorted(edges)])


# ---------------------------------------------------------------------------
# exact widths


def _check_size(g: Graph, limit: int = MAX_EXACT_VERTICES) -> None:
    if g.n > limit:
        raise PreconditionError(f"exact width limited to {limit} vertices")
    if g.n == 0:
        raise PreconditionError("exact widths need at least one vertex")


def _nbr_masks(g: Graph) -> list[int]:
    return [sum(1 << w for w in g.neighbors(v)) for v in range(g.n)]


def exact_treewidth(g: Graph) -> tuple[int, TreeDecomposition]:
    """Treewidth by DP over eliminated sets; witness built from the best ordering.

    TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|), where Q(S, v)
    is the set of vertices outside S + v reachable from v through S.
    """
    _check_size(g)
    n = g.n
    nb = _nbr_masks(g)
    full = (1 << n) - 1

    def q_size(s: int, v: int) -> int:
        seen = 1 << v
        frontier = [v]
        out = 0
        while frontier:
            x = frontier.pop()
            m = nb[x] & ~seen
            seen |= m
            while m:
                low = m & -m
                y = low.bit_length() - 1
                m ^= low
                if s >> y & 1:
                    frontier.append(y)
                else:
                    out += 1
        return out

    tw = [0] * (1 << n)
    choice = [0] * (1 << n)
    tw[0] = -1
    for s in range(1, 1 << n):
        best, arg = n + 1, -1
        m = s
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            rest = s ^ low
            val = max(tw[rest], q_size(rest, v))
            if val < best:
                best, arg = val, v
        tw[s], choice[s] = best, arg
    order = []
    s = full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    d = decomposition_from_ordering(g, order)
    d = minimize_decomposition(d)
    width = tw[full]
    if d.width() != width:
        raise AssertionError("elimination witness does not reach the DP width")
    return width, d


def decomposition_from_ordering(g: Graph, order: list[int]) -> TreeDecomposition:
    """Tree decomposition of the fill-in graph for an elimination ordering."""
    n = g.n
    pos = {v: i for i, v in enumerate(order)}
    adj = [set(g.neighbors(v)) for v in range(n)]
    bags = []
    parent = []
    for v in order:
        higher = {w for w in adj[v] if pos[w] > pos[v]}
        for a in higher:
            adj[a] |= higher - {a}
        bags.append(frozenset(higher | {v}))
        parent.append(min(higher, key=lambda w: pos[w]) if higher else None)
    edges = []
    roots = []
    for i, v in enumerate(order):
        if parent[i] is None:
            roots.append(i)
        else:
            edges.append((i, pos[parent[i]]))
    # components of a disconnected graph give several roots; chain them
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags, edges)


def exact_pathwidth(g: Graph) -> tuple[int, TreeDecomposition]:
    """Pathwidth as vertex separation number by DP over vertex-ordering prefixes."""
    _check_size(g, MAX_PATHWIDTH_VERTICES)
    n = g.n
    nb = _nbr_masks(g)
    full = (1 << n) - 1

    def boundary(s: int) -> int:
        c = 0
        m = s
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            if nb[v] & ~s:
                c += 1
        return c

    pw = [0] * (1 << n)
    choice = [0] * (1 << n)
    for s in range(1, 1 << n):
        best, arg = n + 1, -1
        m = s
        # placing v last in s opens the bag {v} + boundary(s - v)
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            rest = s ^ low
            val = max(pw[rest], boundary(rest))
            if val < best:
                best, arg = val, v
        pw[s], choice[s] = best, arg
    order = []
    s = full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    d = path_decomposition_from_ordering(g, order)
    width = pw[full]
    if d.width() != width:
        raise AssertionError("ordering witness does not reach the DP width")
    return width, d


def path_decomposition_from_ordering(g: Graph, order: list[int]) -> TreeDecomposition:
    bags = []
    placed: set[int] = set()
    for v in order:
        active = {u for u in placed if any(w not in placed for w in g.neighbors(u))}
        bags.append(frozenset(active | {v}))
        placed.add(v)
    d = TreeDecomposition(bags, [(i, i + 1) for i in range(len(bags) - 1)])
    return d


# ---------------------------------------------------------------------------
# minimal linked decompositions (exhaustive, desk scale)


def _unlabeled_trees(k: int) -> list[list[tuple[int, int]]]:
    """One representative per isomorphism class of trees on k nodes."""
    from itertools import product
    if k == 1:
        return [[]]
    if k == 2:
        return [[(0, 1)]]
    out: dict = {}
    for seq in product(range(k), repeat=k - 2):
        degree = [1] * k
        for x in seq:
            degree[x] += 1
        edges = []
        seq = list(seq)
        for x in seq:
            leaf = min(i for i in range(k) if degree[i] == 1)
            edges.append(norm_edge(leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(k) if degree[i] == 1]
        edges.append(norm_edge(u, v))
        key = certificate(Graph(k, edges))
        out.setdefault(key, sorted(edges))
    return [out[key] for key in sorted(out)]


def _connected_subsets(k: int, edges: list[tuple[int, int]]) -> list[int]:
    adj = [0] * k
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    out = []
    for s in range(1, 1 << k):
        start = s & -s
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            m = frontier
            while m:
                low = m & -m
                m ^= low
                nxt |= adj[low.bit_length() - 1]
            nxt &= s & ~seen
            seen |= nxt
            frontier = nxt
        if seen == s:
            out.append(s)
    return out


def minimal_linked_decomposition(g: Graph, max_nodes: int = 6,
                                 budget: int = 2_000_000) -> TreeDecomposition | None:
    """Fewest-node linked decomposition among those of optimal width.

    Every vertex is assigned a connected set of tree nodes; adjacent vertices
    must share a node and bags stay within the width. Trees are tried up to
    isomorphism in increasing order.
    """
    width, _ = exact_treewidth(g)
    cap = width + 1
    order = sorted(range(g.n), key=lambda v: -g.degree(v))
    counter = [0]
    for k in range(1, max_nodes + 1):
        for tedges in _unlabeled_trees(k):
            subsets = _connected_subsets(k, tedges)
            assign: dict[int, int] = {}
            load = [0] * k

            def rec(i: int) -> TreeDecomposition | None:
                counter[0] += 1
                if counter[0] > budget:
                    from .errors import BudgetExceeded
                    raise BudgetExceeded("decomposition search budget exhausted")
                if i == len(order):
                    if any(x == 0 for x in load):
                        return None
                    bags = [frozenset(v for v in range(g.n) if assign[v] >> t & 1)
                            for t in range(k)]
                    d = TreeDecomposition(bags, tedges)
                    if validate_decomposition(g, d) and is_linked(g, d):
                        return d
                    return None
                v = order[i]
                for s in subsets:
                    if any(load[t] >= cap for t in range(k) if s >> t & 1):
                        continue
                    if any(w in assign and not assign[w] & s for w in g.neighbors(v)):
                        continue
                    assign[v] = s
                    for t in range(k):
                        if s >> t & 1:
                            load[t] += 1
                    got = rec(i + 1)
                    if got is not None:
                        return got
                    for t in range(k):
                        if s >> t & 1:
                            load[t] -= 1
                    del assign[v]
                return None

            found = rec(0)
            if found is not None:
                return found
    return None
