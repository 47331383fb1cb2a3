"""Command-line entry point: batch checks that print a JSON run report.

Exit status: 0 all checks pass, 1 a check failed, 2 usage or input error,
3 budget exceeded. The default search budget can be set with the
EXMINORS_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import bounds as B
from .corpus import random_gadget_params
from .decompositions import (TreeDecomposition, all_tree_paths, check_path_minimality,
                             decomposition_metrics, exact_pathwidth, exact_treewidth, is_linked,
                             minimal_linked_decomposition, validate_decomposition)
from .embedding import (Embedding, SurfaceSpec, component_genus, is_orientable_embedding,
                        trace_faces)
from .errors import BudgetExceeded, ExminorsError, InputError
from .excluded import (EmbeddingCache, audit_excluded_minor, enumerate_excluded_minors,
                       extract_excluded_minor, is_excluded_minor)
from .genus import DEFAULT_BUDGET, decide_embedding, min_euler_genus
from .graph import Graph, certificate
from .graph6 import parse_graph6, read_graph6_lines, write_graph6
from .grids import (annulus_band, band_torus, concentric_rings, contains_subdivision,
                    hexagonal_grid, planar_grid, prism, toroidal_grid, wheel)
from .structures import (Fan, Piece, face_piece, max_isolated_paths, max_well_homotopic_depth,
                         max_well_nested_depth, verify_fan)
from .topology import are_homotopic, as_cycle, classify_cycle, cut_along, faces_persist

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    checks: list[dict] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    budget_exceeded: bool = False

    def check(self, name: str, ok: bool, witness=None) -> None:
        self.checks.append({"name": name, "status": "pass" if ok else "fail", "witness": witness})

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def to_document(self) -> dict:
        return {"command": self.command, "inputs_digest": self.inputs_digest,
                "checks": self.checks, "result": self.result, "timings": self.timings,
                "budget_exceeded": self.budget_exceeded}


def default_budget() -> int:
    raw = os.environ.get("EXMINORS_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"EXMINORS_BUDGET is not an integer: {raw!r}") from None


# ---------------------------------------------------------------------------
# input helpers


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_json(path: str) -> dict:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None


def _graph(text: str) -> Graph:
    try:
        return parse_graph6(text.strip())
    except InputError as exc:
        raise InputError(f"graph6 {text.strip()!r}: {exc}") from None


def _embedding(path: str) -> Embedding:
    doc = _load_json(path)
    try:
        return Embedding.from_document(doc)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _decomposition(path: str) -> TreeDecomposition:
    doc = _load_json(path)
    try:
        return TreeDecomposition.from_document(doc)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _surface(text: str) -> SurfaceSpec:
    return SurfaceSpec.parse(text)


def _piece(e: Embedding, text: str) -> Piece:
    """'v:3' is a vertex, 'f:0,1,2' a face given by its boundary walk."""
    kind, _, rest = text.partition(":")
    if kind == "v":
        vs = _ints(rest, "vertex piece")
        if len(vs) != 1 or not 0 <= vs[0] < e.graph.n:
            raise InputError(f"bad vertex piece {text!r}")
        return Piece(vertex=vs[0])
    if kind == "f":
        return face_piece(e, _ints(rest, "face piece"))
    raise InputError(f"piece must look like v:<vertex> or f:<walk>, got {text!r}")


def _digest(args: argparse.Namespace) -> str:
    """Hash of the arguments and of the contents of every file they name."""
    h = hashlib.sha256()
    for k, v in sorted(vars(args).items()):
        h.update(f"{k}={v!r}\0".encode())
        if isinstance(v, str) and v != "-" and os.path.isfile(v):
            with open(v, "rb") as fh:
                h.update(fh.read())
    return h.hexdigest()[:16]


def _emb_doc(e: Embedding | None):
    return None if e is None else e.to_document()


# ---------------------------------------------------------------------------
# subcommands; each fills the report and returns nothing


def cmd_faces(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    faces = trace_faces(e)
    rep.result = {"faces": [list(f.vertices) for f in faces], "face_count": len(faces),
                  "euler_genus": component_genus(e), "orientable": is_orientable_embedding(e)}


def cmd_classify_cycle(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    c = as_cycle(e.graph, _ints(a.cycle, "cycle"))
    cls = classify_cycle(e, c)
    rep.result = {"cycle": list(c), "kind": cls.kind, "signature": cls.signature,
                  "left_genus": cls.left_genus, "right_genus": cls.right_genus}


def cmd_cut(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    c = as_cycle(e.graph, _ints(a.cycle, "cycle"))
    cut = cut_along(e, c)
    before, after = component_genus(e), component_genus(cut.embedding)
    rep.result = {"kind": cut.kind, "separating": cut.separating, "genus_before": before,
                  "genus_after": after, "vmap": list(cut.vmap),
                  "embedding": cut.embedding.to_document()}
    if not cut.separating:
        want = 2 if cut.kind == "two-sided" else 1
        rep.check("genus drop", before - after == want,
                  {"before": before, "after": after, "expected_drop": want})
    rep.check("faces persist", faces_persist(e, cut), {"cycle": list(c)})


def cmd_homotopic(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    c1 = _ints(a.cycle, "cycle")
    c2 = _ints(a.other, "other cycle")
    r = are_homotopic(e, c1, c2)
    rep.result = {"homotopic": r.homotopic, "reason": r.reason,
                  "region_vertices": sorted(r.region_vertices) if r.region_vertices else None}
    rep.check("homotopic", r.homotopic, {"c1": c1, "c2": c2, "reason": r.reason})


def cmd_min_genus(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    r = min_euler_genus(g, restrict=a.restrict, budget=a.budget)
    rep.result = {"genus": r.genus, "exact": r.exact, "lower_bound": r.lower_bound,
                  "nodes": r.nodes, "transcript": r.transcript,
                  "embedding": _emb_doc(r.witness)}
    rep.budget_exceeded = not r.exact


def cmd_embeds_in(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    s = _surface(a.surface)
    r = decide_embedding(g, s, a.budget)
    rep.result = {"surface": s.name, "embeds": r.embeds, "nodes": r.nodes,
                  "transcript": r.transcript, "embedding": _emb_doc(r.witness)}
    rep.check("embeds", r.embeds, _emb_doc(r.witness) if r.embeds else {"transcript": r.transcript})


def cmd_excluded_minor(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    s = _surface(a.surface)
    ok, cert = is_excluded_minor(g, s, a.budget)
    rep.result = {"excluded": ok, "certificate_valid": cert.verify(),
                  "certificate": cert.to_document()}
    rep.check("excluded minor", ok, {"reason": cert.reason})
    rep.check("certificate re-traces", cert.verify(), None)


def _enumerate_chunk(args) -> tuple[list[str], list[str], int]:
    sname, lines, budget = args
    r = enumerate_excluded_minors(_surface(sname), lines, budget)
    return [write_graph6(g) for g in r.found], r.budget_exceeded, r.examined


def cmd_enumerate(a, rep: RunReport) -> None:
    s = _surface(a.surface)
    lines = [write_graph6(g) for _, g in read_graph6_lines(_read_text(a.input).splitlines())]
    if a.workers <= 1:
        rep_ = enumerate_excluded_minors(s, lines, a.budget, EmbeddingCache())
        found = [write_graph6(g) for g in rep_.found]
        over, examined = rep_.budget_exceeded, rep_.examined
    else:
        # round-robin chunks; results are merged in canonical order afterwards
        chunks = [(s.name, lines[i::a.workers], a.budget) for i in range(a.workers)]
        found, over, examined = [], [], 0
        with ProcessPoolExecutor(a.workers) as ex:
            for f, o, n in ex.map(_enumerate_chunk, chunks):
                found += f
                over += o
                examined += n
        # the same graph can surface from two chunks
        seen, uniq = set(), []
        for x in found:
            key = certificate(parse_graph6(x))
            if key not in seen:
                seen.add(key)
                uniq.append(x)
        found = uniq
    found.sort(key=lambda x: (parse_graph6(x).n, parse_graph6(x).m, x))
    rep.result = {"surface": s.name, "examined": examined, "found": found,
                  "budget_exceeded": sorted(over)}
    rep.budget_exceeded = bool(over)


def cmd_extract(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    s = _surface(a.surface)
    trace: list = []
    h = extract_excluded_minor(g, s, a.budget, trace=trace)
    ok, cert = is_excluded_minor(h, s, a.budget)
    rep.result = {"minor": write_graph6(h), "order": h.n, "size": h.m,
                  "steps": [{"op": op.kind, "target": op.target} for op in trace]}
    rep.check("result is an excluded minor", ok and cert.verify(), cert.to_document())


def cmd_audit(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    s = _surface(a.surface)
    if a.embedding:
        pi = _embedding(a.embedding)
    else:
        pi = min_euler_genus(g, budget=a.budget).witness
    report = audit_excluded_minor(g, s, pi, a.budget, a.cycle_budget)
    rep.result = report.to_document()
    rep.result["embedding"] = pi.to_document()
    for c in report.checks:
        if c.status == "skipped":
            rep.budget_exceeded = True
            continue
        rep.check(c.name, c.status == "pass",
                  {"measured": c.measured, "bound": c.bound, "note": c.note,
                   "witness": _jsonable(c.witness)})


def _jsonable(x):
    if x is None or isinstance(x, (int, str, bool, float)):
        return x
    if hasattr(x, "to_document"):
        return x.to_document()
    if hasattr(x, "vertices"):
        return list(x.vertices)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "__dict__"):
        return {k: _jsonable(v) for k, v in vars(x).items()}
    return str(x)


def cmd_nested_depth(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    if a.homotopic:
        r = max_well_homotopic_depth(e, budget=a.cycle_budget)
    else:
        r = max_well_nested_depth(e, budget=a.cycle_budget)
    rep.result = {"kind": "well-homotopic" if a.homotopic else "well-nested", "depth": r.depth,
                  "exact": r.exact, "cycles_examined": r.cycles_examined,
                  "chain": _jsonable(r.chain)}
    rep.budget_exceeded = not r.exact


def cmd_isolated_paths(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    p, q = _piece(e, a.p), _piece(e, a.q)
    r = max_isolated_paths(e, p, q, budget=a.budget)
    rep.result = {"value": r.value, "exact": r.exact, "nodes": r.nodes,
                  "witness": _jsonable(r.witness)}
    rep.budget_exceeded = not r.exact


def cmd_fan_verify(a, rep: RunReport) -> None:
    e = _embedding(a.embedding)
    doc = _load_json(a.fan)
    try:
        pd = doc["p"]
        p = Piece(vertex=int(pd["vertex"])) if "vertex" in pd else face_piece(e, pd["face"])
        fan = Fan(p, tuple(doc["horizontal"]), [tuple(v) for v in doc["verticals"]],
                  tuple(doc["arch"]) if doc.get("arch") else None)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{a.fan}: malformed fan document: {exc}") from None
    v = verify_fan(e, fan)
    rep.result = {"valid": v.ok, "reason": v.reason, "size": fan.size}
    rep.check("fan", v.ok, {"reason": v.reason})


def cmd_td_validate(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    d = _decomposition(a.decomposition)
    v = validate_decomposition(g, d)
    rep.result = {"valid": v.valid, "violation": v.violation}
    if v.valid:
        m = decomposition_metrics(d)
        rep.result["metrics"] = {"width": m.width, "height": m.height,
                                 "max_degree": m.max_degree, "nodes": m.nodes}
    rep.check("decomposition axioms", v.valid, {"violation": v.violation})


def cmd_td_exact(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    w, d = exact_pathwidth(g) if a.path else exact_treewidth(g)
    rep.result = {"kind": "pathwidth" if a.path else "treewidth", "width": w,
                  "decomposition": d.to_document()}
    rep.check("witness validates", validate_decomposition(g, d).valid, d.to_document())


def cmd_linked(a, rep: RunReport) -> None:
    g = _graph(a.graph6)
    if a.decomposition:
        d = _decomposition(a.decomposition)
        v = validate_decomposition(g, d)
        if not v.valid:
            raise InputError(f"{a.decomposition}: invalid decomposition: {v.violation}")
    else:
        d = minimal_linked_decomposition(g, budget=a.budget)
        if d is None:
            raise BudgetExceeded("no linked decomposition found within the node limit")
    r = is_linked(g, d)
    rep.result = {"linked": r.linked, "violation": r.violation, "decomposition": d.to_document()}
    rep.check("linked", r.linked, {"violation": r.violation})
    # separator bags make fewest-node linked decompositions not containment-minimal,
    # so path minimality is reported, not checked
    rep.result["path_minimal"] = all(check_path_minimality(d, p) for p in all_tree_paths(d))


def _sweep(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return [int(lo)]
        a, b = int(lo), int(hi)
    except ValueError:
        raise InputError(f"--sweep expects a..b, got {text!r}") from None
    if a < 0 or b < a:
        raise InputError(f"--sweep range {text!r} is empty or negative")
    return list(range(a, b + 1))


def cmd_bounds(a, rep: RunReport) -> None:
    names = [x for x in a.names.split(",") if x]
    unknown = [x for x in names if x not in B.bound_names()]
    if unknown:
        raise InputError(f"unknown bound names {unknown}; known: {', '.join(B.bound_names())}")
    genera = _sweep(a.sweep)
    rows = []
    for g in genera:
        row: dict = {"g": g}
        # width-dependent bounds default to w = T(g)
        w = a.w if a.w is not None else B.T_of(g)
        for name in names:
            r = B.evaluate_bound(name, B.BoundParams(g, w=w), a.prec).to_row()
            r.pop("g", None)
            r.pop("name", None)
            row[name] = r
        rows.append(row)
    rep.result = {"names": names, "rows": rows}
    if a.crossover:
        c = B.crossover_T_vs_TS()
        rep.result["crossover"] = {"g": c.g, "T": str(c.T), "T_S": str(c.T_S),
                                   "certified": c.certified}
        rep.check("crossover certified", c.certified == "less", rep.result["crossover"])


_GRIDS = {
    "toroidal": lambda p: toroidal_grid(p[0], p[1]),
    "planar": lambda p: planar_grid(p[0], p[1]),
    "band-torus": lambda p: band_torus(*p)[0],
    "rings": lambda p: concentric_rings(*p)[0],
    "annulus": lambda p: annulus_band(*p)[0],
    "hex": lambda p: hexagonal_grid(p[0]).embedding,
    "wheel": lambda p: wheel(p[0]),
    "prism": lambda p: prism(p[0]),
}


def cmd_grids(a, rep: RunReport) -> None:
    if a.params:
        params = _ints(a.params, "params")
    elif a.seed is not None:
        params = random_gadget_params(random.Random(a.seed), a.kind)
    else:
        params = []
    try:
        e = _GRIDS[a.kind](params)
    except (IndexError, TypeError):
        raise InputError(f"grid kind {a.kind!r} needs more parameters, got {params}") from None
    rep.result = {"kind": a.kind, "params": params, "graph6": write_graph6(e.graph),
                  "euler_genus": component_genus(e), "embedding": e.to_document()}
    if a.contains_hex is not None:
        k = a.contains_hex
        w = contains_subdivision(e.graph, hexagonal_grid(k).graph, budget=a.budget)
        rep.check(f"contains subdivision of J_{k}", w is not None,
                  None if w is None else {"branch": {str(x): y for x, y in w.branch.items()},
                                          "paths": [list(p) for p in w.paths]})


COMMANDS = {
    "faces": cmd_faces, "classify-cycle": cmd_classify_cycle, "cut": cmd_cut,
    "homotopic": cmd_homotopic, "min-genus": cmd_min_genus, "embeds-in": cmd_embeds_in,
    "excluded-minor": cmd_excluded_minor, "enumerate": cmd_enumerate, "extract": cmd_extract,
    "audit": cmd_audit, "nested-depth": cmd_nested_depth, "isolated-paths": cmd_isolated_paths,
    "fan-verify": cmd_fan_verify, "td-validate": cmd_td_validate, "td-exact": cmd_td_exact,
    "linked": cmd_linked, "bounds": cmd_bounds, "grids": cmd_grids,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exminors", description=__doc__.splitlines()[0])
    p.add_argument("--budget", type=int, default=None,
                   help=f"search node budget (default $EXMINORS_BUDGET or {DEFAULT_BUDGET})")
    p.add_argument("--indent", type=int, default=None, help="pretty-print the report")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, *args):
        sp = sub.add_parser(name, help=help_)
        for a in args:
            a(sp)
        return sp

    emb = lambda sp: sp.add_argument("embedding", help="embedding document (JSON file, - for stdin)")
    g6 = lambda sp: sp.add_argument("graph6", help="graph in graph6")
    cyc = lambda sp: sp.add_argument("--cycle", required=True, help="cycle as v0,v1,...")
    surf = lambda sp: sp.add_argument("--surface", required=True,
                                      help="sphere, pp, torus, klein, O<h> or N<k>")
    cb = lambda sp: sp.add_argument("--cycle-budget", type=int, default=2000,
                                    help="cap on enumerated cycles")

    add("faces", "trace facial walks and genus", emb)
    add("classify-cycle", "contractible / separating / nonseparating / one-sided", emb, cyc)
    add("cut", "cut along a cycle and check the genus law", emb, cyc)
    add("homotopic", "decide whether two disjoint cycles are homotopic", emb, cyc,
        lambda sp: sp.add_argument("--other", required=True, help="second cycle"))
    add("min-genus", "minimum Euler genus with a witness", g6,
        lambda sp: sp.add_argument("--restrict", choices=["orientable", "nonorientable"]))
    add("embeds-in", "decide embeddability in a surface", g6, surf)
    add("excluded-minor", "certify an excluded minor", g6, surf)
    add("enumerate", "filter a graph6 stream for excluded minors", surf,
        lambda sp: sp.add_argument("--input", default="-", help="graph6 file (default stdin)"),
        lambda sp: sp.add_argument("--workers", type=int, default=1))
    add("extract", "greedily shrink to an excluded minor", g6, surf)
    add("audit", "measure forbidden structures against the bounds", g6, surf, cb,
        lambda sp: sp.add_argument("--embedding", help="embedding document (default: minimum genus)"))
    add("nested-depth", "longest well-nested (or well-homotopic) chain", emb, cb,
        lambda sp: sp.add_argument("--homotopic", action="store_true"))
    add("isolated-paths", "most isolated paths between two pieces", emb,
        lambda sp: sp.add_argument("--p", required=True, help="v:<vertex> or f:<walk>"),
        lambda sp: sp.add_argument("--q", required=True, help="v:<vertex> or f:<walk>"))
    add("fan-verify", "check a fan document", emb,
        lambda sp: sp.add_argument("--fan", required=True, help="fan JSON document"))
    add("td-validate", "validate a tree decomposition", g6,
        lambda sp: sp.add_argument("decomposition", help="decomposition JSON document"))
    add("td-exact", "exact treewidth or pathwidth with a witness", g6,
        lambda sp: sp.add_argument("--path", action="store_true", help="pathwidth instead"))
    add("linked", "check linkedness (or search a minimal linked decomposition)", g6,
        lambda sp: sp.add_argument("--decomposition", help="decomposition JSON document"))
    add("bounds", "tabulate the bound pipeline",
        lambda sp: sp.add_argument("--sweep", default="0", help="genus range a..b"),
        lambda sp: sp.add_argument("--names", default="m,T_S,T,L"),
        lambda sp: sp.add_argument("--w", type=int, default=None, help="width parameter (default T(g))"),
        lambda sp: sp.add_argument("--prec", type=int, default=B.DEFAULT_PREC),
        lambda sp: sp.add_argument("--crossover", action="store_true"))
    add("grids", "build a gadget embedding",
        lambda sp: sp.add_argument("kind", choices=sorted(_GRIDS)),
        lambda sp: sp.add_argument("--params", default="", help="comma-separated integers"),
        lambda sp: sp.add_argument("--seed", type=int, default=None,
                                   help="draw random parameters when --params is absent"),
        lambda sp: sp.add_argument("--contains-hex", type=int, default=None, metavar="K",
                                   help="search a subdivision of J_K"))
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = sys.stdout
    try:
        if a.budget is None:
            a.budget = default_budget()
        rep = RunReport(a.command, _digest(a))
        t0 = time.perf_counter()
        COMMANDS[a.command](a, rep)
        rep.timings["seconds"] = round(time.perf_counter() - t0, 3)
    except BudgetExceeded as exc:
        json.dump({"command": a.command, "error": "budget exceeded", "detail": str(exc),
                   "budget_exceeded": True}, out, indent=a.indent)
        out.write("\n")
        return EXIT_BUDGET
    except (InputError, ExminorsError) as exc:
        print(f"exminors {a.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    json.dump(rep.to_document(), out, indent=a.indent, default=str)
    out.write("\n")
    if not rep.passed:
        return EXIT_FAIL
    if rep.budget_exceeded:
        return EXIT_BUDGET
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
