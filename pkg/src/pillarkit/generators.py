"""Deterministic graph generators: structured families and seeded random models."""

from __future__ import annotations

import random

from .errors import PreconditionError
from .graph import Graph

def path_graph(n: int) -> Graph:
    if n < 1:
        raise PreconditionError("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise PreconditionError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def hypercube(dim: int) -> Graph:
    """dim-dimensional cube on ids 0..2^dim-1 (edge = one flipped bit)."""
    if dim < 1:
        raise PreconditionError("hypercube needs dim >= 1")
    n = 1 << dim
    edges = [(v, v | (1 << b)) for v in range(n) for b in range(dim) if not v & (1 << b)]
    return Graph(n, edges)


def prism(s: int) -> Graph:
    """Cartesian product of an s-cycle and an edge (two cycles + matching)."""
    if s < 3:
        raise PreconditionError("prism needs s >= 3")
    edges = []
    for i in range(s):
        j = (i + 1) % s
        edges.append((i, j))
        edges.append((s + i, s + j))
        edges.append((i, s + i))
    return Graph(2 * s, edges)


def subdivided_prism(s: int, ell: int) -> Graph:
    """Prism with every matching edge subdivided into a path of length ell.

    This is exactly a pillar with cycle length s and rung length ell:
    ids 0..s-1 are the first cycle, s..2s-1 the second, then ell-1
    interior vertices per rung in rung order.
    """
    if s < 3:
        raise PreconditionError("subdivided prism needs s >= 3")
    if ell < 1:
        raise PreconditionError("subdivided prism needs ell >= 1")
    edges = []
    for i in range(s):
        j = (i + 1) % s
        edges.append((i, j))
        edges.append((s + i, s + j))
    nxt = 2 * s
    for i in range(s):
        chain = [i] + list(range(nxt, nxt + ell - 1)) + [s + i]
        nxt += ell - 1
        edges.extend(zip(chain, chain[1:]))
    return Graph(nxt, edges)


def subdivided_prism_rungs(s: int, ell: int) -> list[tuple[int, ...]]:
    """The natural rung decomposition matching :func:`subdivided_prism` ids."""
    rungs = []
    nxt = 2 * s
    for i in range(s):
        chain = (i, *range(nxt, nxt + ell - 1), s + i)
        nxt += ell - 1
        rungs.append(chain)
    return rungs


def random_bipartite(a: int, b: int, p: float, seed: int) -> Graph:
    """Each of the a*b cross pairs appears independently with probability p."""
    if a < 0 or b < 0:
        raise PreconditionError("side sizes must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError("p must be in [0, 1]")
    rng = random.Random(seed)
    edges = [(i, a + j) for i in range(a) for j in range(b) if rng.random() < p]
    return Graph(a + b, edges)


def random_regular(n: int, d: int, seed: int) -> Graph:
    """Seeded d-regular graph via the configuration model.

    Stubs are paired in shuffled order; clashing stubs are re-queued and
    re-shuffled (plain full-restart rejection has vanishing success
    probability already at d around 6).  A dead end restarts the whole
    pairing with an incremented sub-seed, so the result is a pure
    function of (n, d, seed).
    """
    if n * d % 2 != 0:
        raise PreconditionError("n*d must be even")
    if not 0 <= d < n:
        raise PreconditionError("need 0 <= d < n")
    attempt = 0
    while True:
        rng = random.Random((seed * 1_000_003 + attempt) & 0xFFFFFFFFFFFF)
        edges = _pair_stubs(n, d, rng)
        if edges is not None:
            return Graph(n, edges)
        attempt += 1


def _pair_stubs(n: int, d: int, rng: random.Random) -> set[tuple[int, int]] | None:
    edges: set[tuple[int, int]] = set()
    stubs = list(range(n)) * d
    while stubs:
        leftovers: dict[int, int] = {}
        rng.shuffle(stubs)
        it = iter(stubs)
        for s1, s2 in zip(it, it):
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((s1, s2))
            else:
                leftovers[s1] = leftovers.get(s1, 0) + 1
                leftovers[s2] = leftovers.get(s2, 0) + 1
        if leftovers and not _repairable(edges, leftovers):
            return None
        stubs = [v for v, k in leftovers.items() for _ in range(k)]
    return edges


def _repairable(edges: set[tuple[int, int]], leftovers: dict[int, int]) -> bool:
    # False iff every pair of leftover stubs is already an edge (dead end).
    for s1 in leftovers:
        for s2 in leftovers:
            if s1 == s2:
                break
            if (min(s1, s2), max(s1, s2)) not in edges:
                return True
    return False


GENERATORS = {
    "path": path_graph,
    "cycle": cycle_graph,
    "hypercube": hypercube,
    "prism": prism,
    "subdivided-prism": subdivided_prism,
    "random-regular": random_regular,
    "random-bipartite": random_bipartite,
}
