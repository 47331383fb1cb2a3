"""Excluded minors: certification, greedy extraction, enumeration and audit.

A graph is an excluded minor for a surface when it does not embed there
but every proper minor does. Genus is minor-monotone, so checking the
one-step minors (each G-v, G-e, G/e) is enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .bounds import (BoundParams, BigBound, clique_euler_genus, compare_bounds,  # noqa: F401
                     evaluate_bound, lower_bound_L, m_of)
from .decompositions import exact_treewidth, MAX_EXACT_VERTICES
from .embedding import (Embedding, SurfaceSpec, component_genus, is_orientable_embedding,
                        trace_faces)
from .errors import BudgetExceeded, InputError, PreconditionError
from .genus import DEFAULT_BUDGET, decide_embedding
from .graph import (Graph, MinorOp, apply_minor_op, biconnected_blocks, canonical_labeling,
                    norm_edge, one_step_minors)
from .graph6 import parse_graph6, write_graph6
from .structures import (Piece, max_disjoint_noncontractible, max_isolated_paths,
                         max_well_homotopic_depth, max_well_nested_depth)
from .topology import (CONTRACTIBLE, NONSEPARATING, ONE_SIDED, classify_cycle,
                       enumerate_cycles, interior_of)


def relabel_embedding(e: Embedding, perm: list[int]) -> Embedding:
    """The same embedding with vertex v renamed perm[v]."""
    g = e.graph.relabel(perm)
    rotation: list = [()] * g.n
    for v in range(e.graph.n):
        rotation[perm[v]] = tuple(perm[w] for w in e.rotation[v])
    signs = {norm_edge(perm[u], perm[v]): e.sign(u, v) for u, v in e.graph.edges}
    return Embedding.from_maps(g, rotation, signs)


class EmbeddingCache:
    """Embeddability verdicts keyed by canonical form and surface.

    Witnesses are stored for the canonical form and relabelled on lookup.
    """

    def __init__(self) -> None:
        self._store: dict = {}
        self.hits = 0
        self.misses = 0

    def decide(self, g: Graph, s: SurfaceSpec, budget: int) -> tuple[bool, Embedding | None, str]:
        cert, lab = canonical_labeling(g)
        key = (g.n, cert, s)
        if key in self._store:
            self.hits += 1
            ok, canon_emb, transcript = self._store[key]
        else:
            self.misses += 1
            r = decide_embedding(g, s, budget)
            canon_emb = relabel_embedding(r.witness, lab) if r.witness is not None else None
            ok, transcript = r.embeds, r.transcript
            self._store[key] = (ok, canon_emb, transcript)
        if canon_emb is None:
            return ok, None, transcript
        inv = [0] * g.n
        for v, c in enumerate(lab):
            inv[c] = v
        return ok, relabel_embedding(canon_emb, inv), transcript


@dataclass
class MinorWitness:
    op: MinorOp
    minor: Graph
    embedding: Embedding | None     # None only for the empty graph


@dataclass
class ExclusionCertificate:
    graph: Graph
    surface: SurfaceSpec
    excluded: bool
    reason: str
    evidence: str | None = None            # transcript hash of the refuting search
    embedding: Embedding | None = None     # when the graph itself embeds
    witnesses: list[MinorWitness] = field(default_factory=list)
    blocking: MinorOp | None = None        # a one-step minor that still does not embed

    def verify(self) -> bool:
        """Re-trace every recorded witness embedding.

        Forests have no nonorientable embedding, so their witnesses are only
        held to the genus bound.
        """
        s = self.surface
        items = [(None, self.graph, self.embedding)] if self.embedding is not None else []
        items += [(w.op, w.minor, w.embedding) for w in self.witnesses]
        for op, h, emb in items:
            if op is not None and apply_minor_op(self.graph, op) != h:
                return False
            if h.n == 0:
                continue
            if emb is None or emb.graph != h:
                return False
            if component_genus(emb) > s.euler_genus:
                return False
            has_cycle = h.m >= h.n - len(h.components()) + 1
            if has_cycle and is_orientable_embedding(emb) != s.orientable:
                return False
        return True

    def to_document(self) -> dict:
        return {
            "graph6": write_graph6(self.graph),
            "surface": self.surface.name,
            "excluded": self.excluded,
            "reason": self.reason,
            "evidence": self.evidence,
            "blocking": None if self.blocking is None else
            {"kind": self.blocking.kind, "target": _target(self.blocking.target)},
            "witnesses": [{"op": w.op.kind, "target": _target(w.op.target),
                           "embedding": None if w.embedding is None else w.embedding.to_document()}
                          for w in self.witnesses],
        }


def _target(t):
    return list(t) if isinstance(t, tuple) else t


def is_excluded_minor(g: Graph, s: SurfaceSpec, budget: int = DEFAULT_BUDGET,
                      cache: EmbeddingCache | None = None) -> tuple[bool, ExclusionCertificate]:
    """Verdict plus certificate; stops at the first one-step minor that does not embed."""
    cache = cache or EmbeddingCache()
    ok, emb, transcript = cache.decide(g, s, budget)
    if ok:
        return False, ExclusionCertificate(g, s, False, "embeds", embedding=emb)
    cert = ExclusionCertificate(g, s, True, "minimal non-embeddable", evidence=transcript)
    for op, h in one_step_minors(g):
        if h.n == 0:
            cert.witnesses.append(MinorWitness(op, h, None))
            continue
        ok, emb, _ = cache.decide(h, s, budget)
        if not ok:
            cert.excluded = False
            cert.reason = "a one-step minor does not embed"
            cert.blocking = op
            return False, cert
        cert.witnesses.append(MinorWitness(op, h, emb))
    return True, cert


def extract_excluded_minor(g: Graph, s: SurfaceSpec, budget: int = DEFAULT_BUDGET,
                           cache: EmbeddingCache | None = None,
                           trace: list | None = None) -> Graph:
    """Greedily take the first non-embeddable one-step minor until none is left.

    Minors are tried in the fixed order: vertex deletions, edge deletions,
    contractions, each by increasing target.
    """
    cache = cache or EmbeddingCache()
    ok, _, _ = cache.decide(g, s, budget)
    if ok:
        raise PreconditionError(f"graph embeds in {s.name}; nothing to extract")
    cur = g
    while True:
        for op, h in one_step_minors(cur):
            if h.n == 0:
                continue
            ok, _, _ = cache.decide(h, s, budget)
            if not ok:
                if trace is not None:
                    trace.append(op)
                cur = h
                break
        else:
            return cur


@dataclass
class EnumerationReport:
    surface: SurfaceSpec
    found: list[Graph]
    examined: int
    budget_exceeded: list[str]              # graph6 lines whose check ran out of budget
    certificates: list[ExclusionCertificate]

    def to_document(self) -> dict:
        return {"surface": self.surface.name, "examined": self.examined,
                "found": [write_graph6(g) for g in self.found],
                "budget_exceeded": self.budget_exceeded}


def enumerate_excluded_minors(s: SurfaceSpec, candidates: Iterable[str | Graph],
                              budget: int = DEFAULT_BUDGET,
                              cache: EmbeddingCache | None = None) -> EnumerationReport:
    """Filter a graph6 stream through is_excluded_minor, deduplicating by canonical form.

    A candidate whose check exceeds the budget is listed, never dropped.
    """
    cache = cache or EmbeddingCache()
    seen: set = set()
    found, certs, over = [], [], []
    examined = 0
    for item in candidates:
        if isinstance(item, str):
            line = item.strip()
            if not line or line.startswith(">>"):
                continue
            g = parse_graph6(line)
        else:
            g = item
            line = write_graph6(g)
        examined += 1
        key = (g.n, canonical_labeling(g)[0])
        if key in seen:
            continue
        seen.add(key)
        try:
            ok, cert = is_excluded_minor(g, s, budget, cache)
        except BudgetExceeded:
            over.append(line)
            continue
        if ok:
            found.append(g)
            certs.append(cert)
    return EnumerationReport(s, found, examined, over, certs)


def clique_order_bound(g: int) -> int:
    """Least k with clique_euler_genus(k) > g, by direct search (oracle for L)."""
    k = 3
    while clique_euler_genus(k) <= g:
        k += 1
    return k


# ---------------------------------------------------------------------------
# audit


@dataclass
class AuditCheck:
    name: str
    measured: int | None
    bound: str
    status: str          # "pass" | "fail" | "skipped"
    exact: bool = True
    witness: object = None
    note: str = ""

    def to_document(self) -> dict:
        return {"name": self.name, "measured": self.measured, "bound": self.bound,
                "status": self.status, "exact": self.exact, "note": self.note}


@dataclass
class AuditReport:
    graph: Graph
    surface: SurfaceSpec
    embedding_genus: int
    checks: list[AuditCheck]

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_document(self) -> dict:
        return {"graph6": write_graph6(self.graph), "surface": self.surface.name,
                "embedding_genus": self.embedding_genus, "passed": self.passed,
                "checks": [c.to_document() for c in self.checks]}


def _pieces(e: Embedding) -> list[Piece]:
    out = [Piece(vertex=v) for v in range(e.graph.n)]
    out += [Piece(face=f) for f in trace_faces(e)]
    return out


def _against(name: str, measured: int, bound: BigBound | int, note: str = "", witness=None,
             exact: bool = True) -> AuditCheck:
    if isinstance(bound, int):
        ok = measured <= bound
        text = str(bound)
    else:
        verdict = compare_bounds(BigBound("measured", exact=measured), bound)
        ok = verdict in ("less", "equal")
        row = bound.to_row()
        text = row.get("value") or f"2^[{row.get('log2_lo')}, {row.get('log2_hi')}]"
    status = "pass" if ok else "fail"
    if not exact and ok:
        note = (note + "; " if note else "") + "measured value is a lower bound (search truncated)"
    return AuditCheck(name, measured, text, status, exact, witness, note)


def audit_excluded_minor(g: Graph, s: SurfaceSpec, pi: Embedding,
                         budget: int = DEFAULT_BUDGET, cycle_budget: int = 2000,
                         cert: ExclusionCertificate | None = None) -> AuditReport:
    """Measure the forbidden structures of an excluded minor against the bounds."""
    if cert is None:
        ok, cert = is_excluded_minor(g, s, budget)
    else:
        ok = cert.excluded and cert.graph == g and cert.surface == s and cert.verify()
    if not ok:
        raise PreconditionError(f"graph is not a certified excluded minor for {s.name}")
    if pi.graph != g:
        raise PreconditionError("embedding is not of the audited graph")
    gen = s.euler_genus
    gp = component_genus(pi)
    if gp not in (gen + 1, gen + 2):
        raise PreconditionError(f"embedding genus {gp} is not {gen + 1} or {gen + 2}")
    params = BoundParams(gen)
    m = m_of(gen)
    checks: list[AuditCheck] = []

    # isolated paths between disjoint pieces
    try:
        best, wit, exact = 0, None, True
        pieces = _pieces(pi)
        for i, p in enumerate(pieces):
            for q in pieces[i + 1:]:
                if p.vertex_set & q.vertex_set:
                    continue
                r = max_isolated_paths(pi, p, q)
                exact = exact and r.exact
                if r.value > best:
                    best, wit = r.value, r.witness
        cap_pi = 4 * (6 * gp - 5)
        note = f"embedding-genus cap 4(6g(Pi)-5) = {cap_pi}: " + \
            ("holds" if best <= cap_pi else "exceeded")
        checks.append(_against("isolated_paths", best, 4 * (6 * gen + 7), note, wit, exact))
    except BudgetExceeded:
        checks.append(AuditCheck("isolated_paths", None, str(4 * (6 * gen + 7)), "skipped",
                                 note="budget exceeded"))

    try:
        r = max_well_nested_depth(pi, budget=cycle_budget)
        checks.append(_against("well_nested_depth", r.depth, m, witness=r.chain, exact=r.exact))
    except BudgetExceeded:
        checks.append(AuditCheck("well_nested_depth", None, str(m), "skipped",
                                 note="budget exceeded"))
    try:
        r = max_well_homotopic_depth(pi, budget=cycle_budget)
        checks.append(_against("well_homotopic_depth", r.depth, 2 * m, witness=r.chain,
                               exact=r.exact))
    except BudgetExceeded:
        checks.append(AuditCheck("well_homotopic_depth", None, str(2 * m), "skipped",
                                 note="budget exceeded"))
    try:
        n_cycles = len(enumerate_cycles(g, limit=cycle_budget + 1))
        k, fam = max_disjoint_noncontractible(pi, budget=cycle_budget)
        checks.append(_against("disjoint_noncontractible", k, 2 * m * (3 * gen + 3),
                               witness=fam, exact=n_cycles <= cycle_budget))
    except BudgetExceeded:
        checks.append(AuditCheck("disjoint_noncontractible", None, str(2 * m * (3 * gen + 3)),
                                 "skipped", note="budget exceeded"))

    faces = trace_faces(pi)
    max_face = max(len(f) for f in faces)
    for variant, name in (("theorem", "Delta"), ("lemma", "Delta_lemma")):
        bound = evaluate_bound(name, params)
        checks.append(_against(f"max_degree[{variant}]", g.max_degree(), bound,
                               note=f"Delta variant: {variant}"))
        checks.append(_against(f"max_face_size[{variant}]", max_face, bound,
                               note=f"Delta variant: {variant}"))

    t_bound = evaluate_bound("T", params).exact
    if g.n <= MAX_EXACT_VERTICES:
        tw, dec = exact_treewidth(g)
        checks.append(_against("treewidth", tw, t_bound, witness=dec))
    else:
        checks.append(AuditCheck("treewidth", None, str(t_bound), "skipped",
                                 note=f"exact treewidth limited to {MAX_EXACT_VERTICES} vertices"))
    return AuditReport(g, s, gp, checks)


# ---------------------------------------------------------------------------
# structural lemmas checked on certified excluded minors


def two_separations(g: Graph) -> list[tuple[int, int, frozenset[int]]]:
    """(a, b, X) for each pair {a, b} and component X of G - {a, b}, when G - {a, b}
    is disconnected."""
    out = []
    for a in range(g.n):
        for b in range(a + 1, g.n):
            rest = [v for v in range(g.n) if v not in (a, b)]
            h, keep = g.induced_subgraph(rest)
            comps = h.components()
            if len(comps) < 2:
                continue
            for comp in comps:
                out.append((a, b, frozenset(keep[v] for v in comp)))
    return out


def disk_containing(e: Embedding, vertices: frozenset[int], edges: frozenset,
                    budget: int = 5000) -> tuple[int, ...] | None:
    """A contractible cycle whose closed interior holds the given subgraph, if any."""
    for c in enumerate_cycles(e.graph, limit=budget):
        if classify_cycle(e, c).kind != CONTRACTIBLE:
            continue
        inner = interior_of(e, c)
        inside = inner.Int_edges
        verts = {v for x in inside for v in x}
        if edges <= inside and vertices <= verts:
            return c
    return None


def check_two_separations(g: Graph, pi: Embedding) -> tuple[bool, list]:
    """Every 2-separated side that is not a single edge lies in no disk of pi."""
    bad = []
    for a, b, comp in two_separations(g):
        side = comp | {a, b}
        edges = frozenset(x for x in g.edges if x[0] in side and x[1] in side
                          and x != norm_edge(a, b))
        c = disk_containing(pi, frozenset(side), edges)
        if c is not None:
            bad.append((a, b, sorted(comp), c))
    return not bad, bad


def _surfaces_below(k: int) -> list[SurfaceSpec]:
    out = []
    for eg in range(k):
        if eg % 2 == 0:
            out.append(SurfaceSpec(eg, True))
        if eg >= 1:
            out.append(SurfaceSpec(eg, False))
    return out


def blocks_excluded(g: Graph, budget: int = DEFAULT_BUDGET) -> list[tuple[Graph, SurfaceSpec | None]]:
    """For each 2-connected block, a surface for which it is an excluded minor (or None)."""
    from .genus import min_euler_genus
    out = []
    for b in biconnected_blocks(g):
        if b.m < 3:
            out.append((b, None))
            continue
        k = min_euler_genus(b, budget=budget).genus
        hit = None
        for s in _surfaces_below(k + 1):
            ok, _ = is_excluded_minor(b, s, budget)
            if ok:
                hit = s
                break
        out.append((b, hit))
    return out


@dataclass
class EdgeCycleCheck:
    edge: tuple[int, int]
    disk: tuple[int, ...] | None         # a contractible cycle with the edge in its open interior
    cycle: tuple[int, ...] | None        # C_e
    contractible: bool
    kind_in_minor: str | None
    holds: bool | None                   # None: the edge lies in no contractible disk
    note: str = ""


def check_edge_cycles(g: Graph, s: SurfaceSpec, pi: Embedding, budget: int = DEFAULT_BUDGET,
                      cycle_budget: int = 5000) -> list[EdgeCycleCheck]:
    """For each edge e inside a pi-contractible cycle, C_e = f + f' - e from the two faces
    at e should be a contractible cycle of pi and nonseparating in an embedding of G - e in s."""
    disks: dict = {}
    for c in enumerate_cycles(g, limit=cycle_budget):
        if classify_cycle(pi, c).kind != CONTRACTIBLE:
            continue
        for x in interior_of(pi, c).int_edges:
            disks.setdefault(x, c)
    faces = trace_faces(pi)
    out = []
    for x in g.edges:
        disk = disks.get(x)
        if disk is None:
            out.append(EdgeCycleCheck(x, None, None, False, None, None,
                                      "no contractible cycle has e in its interior"))
            continue
        fs = [f for f in faces if x in f.edge_set]
        if len(fs) != 2 or not all(f.is_cycle() for f in fs):
            out.append(EdgeCycleCheck(x, disk, None, False, None, False,
                                      "faces at e are not two cycles"))
            continue
        f1, f2 = fs
        if f1.edge_set & f2.edge_set != {x} or f1.vertex_set & f2.vertex_set != set(x):
            out.append(EdgeCycleCheck(x, disk, None, False, None, False,
                                      "faces at e meet outside e"))
            continue
        cyc = _edges_to_cycle((f1.edge_set | f2.edge_set) - {x})
        if cyc is None:
            out.append(EdgeCycleCheck(x, disk, None, False, None, False, "C_e is not a cycle"))
            continue
        contractible = classify_cycle(pi, cyc).kind == CONTRACTIBLE
        h = apply_minor_op(g, MinorOp("delete-edge", x))
        r = decide_embedding(h, s, budget)
        if not r.embeds:
            raise PreconditionError("G - e does not embed; graph is not excluded")
        kind = classify_cycle(r.witness, cyc).kind
        holds = contractible and kind in (NONSEPARATING, ONE_SIDED)
        out.append(EdgeCycleCheck(x, disk, cyc, contractible, kind, holds))
    return out


def _edges_to_cycle(edges) -> tuple[int, ...] | None:
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in adj.values()):
        return None
    start = min(adj)
    cyc = [start]
    prev, cur = None, start
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == start:
            break
        cyc.append(nxt)
        prev, cur = cur, nxt
    if len(cyc) != len(adj):
        return None
    return tuple(cyc)
