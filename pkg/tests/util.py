"""Shared test fixtures and independent oracles.

Everything here deliberately avoids the library's own search code paths:
oracles are plain enumerations (or networkx), so agreement is meaningful.
"""

from __future__ import annotations

import random

import networkx as nx

from pillarkit.graph import Graph

def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def nx_has_q3(g: Graph) -> bool:
    """Independent cube-containment oracle via VF2 monomorphism."""
    cube = nx.hypercube_graph(3)
    matcher = nx.algorithms.isomorphism.GraphMatcher(to_nx(g), cube)
    return matcher.subgraph_is_monomorphic()


def all_simple_path_lengths(g: Graph, u: int, v: int, max_len: int) -> set[int]:
    """Every realizable simple-path length from u to v (plain recursion)."""
    lengths: set[int] = set()
    seen = {u}

    def rec(x: int, depth: int):
        if x == v:
            lengths.add(depth)
            return
        if depth == max_len:
            return
        for w in g.neighbors(x):
            if w not in seen:
                seen.add(w)
                rec(w, depth + 1)
                seen.discard(w)

    if u == v:
        return {0}
    rec(u, 0)
    return lengths


def random_connected_graph(n: int, extra_edges: int, seed: int) -> Graph:
    """Random tree plus a few extra edges; always connected."""
    rng = random.Random(seed)
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    tries = 0
    while extra_edges > 0 and tries < 50 * extra_edges:
        tries += 1
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b and (min(a, b), max(a, b)) not in edges:
            edges.add((min(a, b), max(a, b)))
            extra_edges -= 1
    return Graph(n, sorted(edges))


def planted_prism_with_noise(s: int, ell: int, noise_vertices: int, seed: int) -> Graph:
    """A subdivided prism plus seeded noise: chains of 2..6 fresh vertices
    hung on random prism vertices.  Every noise vertex has degree <= 2 and
    the graph stays bipartite (chains are trees)."""
    from pillarkit.generators import subdivided_prism

    base = subdivided_prism(s, ell)
    rng = random.Random(seed)
    edges = base.edges()
    nxt = base.n
    stop = base.n + noise_vertices
    while nxt < stop:
        length = min(rng.randint(2, 6), stop - nxt)
        attach = rng.randrange(base.n)
        chain = [attach] + list(range(nxt, nxt + length))
        nxt += length
        edges.extend(zip(chain, chain[1:]))
    return Graph(stop, edges)
