"""Seeded random instances for test corpora. Verdicts never depend on these."""

from __future__ import annotations

import random

from .embedding import Embedding, trace_faces
from .graph import Graph, norm_edge
from .grids import annulus_band


def random_connected_graph(rng: random.Random, n: int, m: int) -> Graph:
    """A random spanning tree plus m - (n - 1) further random edges."""
    if n < 1:
        raise ValueError("n must be positive")
    top = n * (n - 1) // 2
    m = max(n - 1, min(m, top))
    order = list(range(n))
    rng.shuffle(order)
    edges = {norm_edge(order[i], order[rng.randrange(i)]) for i in range(1, n)}
    rest = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in edges]
    rng.shuffle(rest)
    edges.update(rest[:m - len(edges)])
    return Graph(n, sorted(edges))


def random_embedding(rng: random.Random, g: Graph, orientable: bool | None = None) -> Embedding:
    """Uniform random rotations; signs random unless orientable is True."""
    rotation = []
    for v in range(g.n):
        r = list(g.neighbors(v))
        rng.shuffle(r)
        rotation.append(r)
    if orientable:
        signs = {e: 1 for e in g.edges}
    else:
        signs = {e: rng.choice((1, -1)) for e in g.edges}
    return Embedding.from_maps(g, rotation, signs)


def random_band(rng: random.Random, max_faces: int = 30):
    """A width-one annulus band and a random nonempty set of its band faces.

    Returns (embedding, outer cycle, inner cycle, faces); every chosen face
    touches both cycles.
    """
    n = rng.randint(3, max_faces)
    emb, c1, c2 = annulus_band(n)
    s1, s2 = set(c1), set(c2)
    band = [f for f in trace_faces(emb)
            if f.vertex_set & s1 and f.vertex_set & s2 and not f.vertex_set <= s1
            and not f.vertex_set <= s2]
    k = rng.randint(1, len(band))
    faces = sorted(rng.sample(band, k), key=lambda f: f.key)
    return emb, c1, c2, faces


# parameter ranges for seeded gadget generation
GADGET_RANGES = {
    "toroidal": [(3, 6), (3, 6)], "planar": [(2, 8), (2, 8)], "band-torus": [(3, 8)],
    "rings": [(1, 10)], "annulus": [(3, 30)], "hex": [(1, 3)], "wheel": [(3, 20)],
    "prism": [(3, 12)],
}


def random_gadget_params(rng: random.Random, kind: str) -> list[int]:
    return [rng.randint(lo, hi) for lo, hi in GADGET_RANGES[kind]]
