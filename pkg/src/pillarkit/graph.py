"""Immutable graph representation, edge-list I/O and the elementary
BFS/set primitives (balls, parity, set-degrees) everything else consumes.

Vertices are dense integers ``0..n-1``.  Deletions are never expressed by
mutation: operations take an ``avoid`` set and work in the graph minus
that set.  A graph carries an optional ``labels`` side table mapping its
ids back to the ids of a parent graph (used by induced subgraphs).
"""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import GraphParseError, PreconditionError

VertexSet = frozenset[int]

_EMPTY: frozenset[int] = frozenset()


class Graph:
    """Simple undirected graph: no loops, no parallel edges, ids 0..n-1.

    Immutable after construction.  ``side`` is a per-vertex two-coloring
    (0/1), present iff the graph is bipartite; every edge crosses sides.
    ``comp`` gives a connected-component id per vertex.
    """

    __slots__ = ("n", "m", "_adj", "side", "comp", "labels")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], labels: tuple[int, ...] | None = None):
        nbrs: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u},{v}) out of range for n={n}")
            if v not in nbrs[u]:
                nbrs[u].add(v)
                nbrs[v].add(u)
                m += 1
        self.n = n
        self.m = m
        self._adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        if labels is not None and len(labels) != n:
            raise PreconditionError("labels length must equal n")
        self.labels = labels
        self.side, self.comp = self._two_color()

    def _two_color(self) -> tuple[tuple[int, ...] | None, tuple[int, ...]]:
        side = [-1] * self.n
        comp = [-1] * self.n
        bipartite = True
        cid = 0
        for root in range(self.n):
            if comp[root] >= 0:
                continue
            comp[root] = cid
            side[root] = 0
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if comp[w] < 0:
                        comp[w] = cid
                        side[w] = side[u] ^ 1
                        queue.append(w)
                    elif side[w] == side[u]:
                        bipartite = False
            cid += 1
        return (tuple(side) if bipartite else None), tuple(comp)

    # -- basic queries -------------------------------------------------

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self._adj[u]
        i = bisect_left(row, v)
        return i < len(row) and row[i] == v

    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def min_degree(self) -> int:
        return min((len(r) for r in self._adj), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self._adj[u] if u < v]

    def vertices(self) -> range:
        return range(self.n)

    def is_bipartite(self) -> bool:
        return self.side is not None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._adj == other._adj

    def __hash__(self):  # pragma: no cover - graphs rarely used as keys
        return hash((self.n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, bipartite={self.side is not None})"

    def original_ids(self, vertices: Iterable[int]) -> list[int]:
        """Map this graph's ids back through the labels side table."""
        if self.labels is None:
            return list(vertices)
        return [self.labels[v] for v in vertices]


@dataclass(frozen=True)
class Path:
    """Ordered vertex sequence; length is the number of edges."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise PreconditionError("empty path")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def ends(self) -> tuple[int, int]:
        return self.vertices[0], self.vertices[-1]

    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    def failures(self, g: Graph) -> list[str]:
        out = []
        if len(set(self.vertices)) != len(self.vertices):
            out.append("repeated vertex")
        if any(not (0 <= v < g.n) for v in self.vertices):
            out.append("vertex id out of range")
            return out
        for a, b in zip(self.vertices, self.vertices[1:]):
            if not g.has_edge(a, b):
                out.append(f"missing edge {a}-{b}")
        return out

    def is_valid(self, g: Graph) -> bool:
        return not self.failures(g)


@dataclass(frozen=True)
class Cycle:
    """Cyclically ordered vertex sequence (closing edge implicit)."""

    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    def failures(self, g: Graph) -> list[str]:
        vs = self.vertices
        out = []
        if len(set(vs)) != len(vs):
            out.append("repeated vertex")
        if any(not (0 <= v < g.n) for v in vs):
            out.append("vertex id out of range")
            return out
        floor = 4 if g.is_bipartite() else 3
        if len(vs) < floor:
            out.append(f"cycle shorter than {floor}")
        for a, b in zip(vs, vs[1:] + vs[:1]):
            if not g.has_edge(a, b):
                out.append(f"missing edge {a}-{b}")
        return out

    def is_valid(self, g: Graph) -> bool:
        return not self.failures(g)


# -- edge-list I/O -----------------------------------------------------


def load_graph(text: str) -> Graph:
    """Parse edge-list text: one "u v" pair per line, '#' comments allowed.

    A line with a single id declares an isolated vertex (this is what
    keeps save/load a faithful round trip).  Duplicate edges collapse;
    self-loops are rejected.  n is max id + 1.
    """
    edges: list[tuple[int, int]] = []
    max_id = -1
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            ids = [int(p) for p in parts]
        except ValueError:
            raise GraphParseError(line_no, f"non-integer token in {line!r}")
        if any(v < 0 for v in ids):
            raise GraphParseError(line_no, f"negative vertex id in {line!r}")
        if len(ids) == 1:
            max_id = max(max_id, ids[0])
        elif len(ids) == 2:
            u, v = ids
            if u == v:
                raise GraphParseError(line_no, f"self-loop at {u}")
            edges.append((u, v))
            max_id = max(max_id, u, v)
        else:
            raise GraphParseError(line_no, f"expected 1 or 2 ids, got {len(ids)}")
    return Graph(max_id + 1, edges)


def save_graph(g: Graph) -> str:
    """Edge-list text, edges sorted lexicographically; bit-exact round trip."""
    lines = [f"{u} {v}" for u, v in sorted(g.edges())]
    lines.extend(str(v) for v in range(g.n) if g.degree(v) == 0)
    return "\n".join(lines) + ("\n" if lines else "")


# -- BFS primitives ----------------------------------------------------


def ball(g: Graph, seed: Iterable[int], radius: int, avoid: Iterable[int] = _EMPTY) -> set[int]:
    """All vertices within ``radius`` steps of ``seed`` in g minus ``avoid``.

    Includes the seed.  The seed must be disjoint from the avoid set.
    """
    avoid_set = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    reached = set(seed)
    if reached & avoid_set:
        raise PreconditionError("seed intersects avoid set")
    frontier = list(reached)
    adj = g._adj
    for _ in range(radius):
        if not frontier:
            break
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in reached and w not in avoid_set:
                    reached.add(w)
                    nxt.append(w)
        frontier = nxt
    return reached


def ball_layers(g: Graph, seed: Iterable[int], radius: int, avoid: Iterable[int] = _EMPTY) -> list[set[int]]:
    """Like :func:`ball` but returns the BFS spheres, layer 0 = seed."""
    avoid_set = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    layer = set(seed)
    if layer & avoid_set:
        raise PreconditionError("seed intersects avoid set")
    reached = set(layer)
    layers = [layer]
    adj = g._adj
    for _ in range(radius):
        nxt = set()
        for u in layers[-1]:
            for w in adj[u]:
                if w not in reached and w not in avoid_set:
                    reached.add(w)
                    nxt.add(w)
        if not nxt:
            break
        layers.append(nxt)
    return layers


def distances_from(g: Graph, sources: Iterable[int], avoid: Iterable[int] = _EMPTY,
                   cap: int | None = None) -> dict[int, int]:
    """BFS distance map from a source set in g minus avoid (cap optional)."""
    avoid_set = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    dist = {s: 0 for s in sources if s not in avoid_set}
    queue = deque(dist)
    adj = g._adj
    while queue:
        u = queue.popleft()
        du = dist[u]
        if cap is not None and du >= cap:
            continue
        for w in adj[u]:
            if w not in dist and w not in avoid_set:
                dist[w] = du + 1
                queue.append(w)
    return dist


def set_distance(g: Graph, a: Iterable[int], b: Iterable[int],
                 avoid: Iterable[int] = _EMPTY, cap: int | None = None) -> int | None:
    """Shortest distance between two vertex sets in g minus avoid."""
    bset = set(b)
    hit = [v for v in a if v in bset]
    if hit:
        return 0
    dist = distances_from(g, a, avoid, cap)
    best = None
    for v in bset:
        d = dist.get(v)
        if d is not None and (best is None or d < best):
            best = d
    return best


def shortest_set_path(g: Graph, sources: Iterable[int], targets: Iterable[int],
                      avoid: Iterable[int] = _EMPTY, cap: int | None = None) -> Path | None:
    """Shortest path from one set to another in g minus avoid.

    One endpoint in each set, no internal vertices in either set (the
    usual from-A-to-B path convention).  Returns None if disconnected
    (or farther than ``cap``).
    """
    avoid_set = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    src = [s for s in sources if s not in avoid_set]
    tgt = set(t for t in targets if t not in avoid_set)
    if not src or not tgt:
        return None
    direct = sorted(set(src) & tgt)
    if direct:
        return Path((direct[0],))
    parent: dict[int, int] = {s: -1 for s in src}
    queue = deque(src)
    adj = g._adj
    depth = {s: 0 for s in src}
    src_set = set(src)
    while queue:
        u = queue.popleft()
        if cap is not None and depth[u] >= cap:
            continue
        for w in adj[u]:
            if w in parent or w in avoid_set:
                continue
            if w in tgt:
                seq = [w, u]
                while parent[seq[-1]] != -1:
                    seq.append(parent[seq[-1]])
                seq.reverse()
                return Path(tuple(seq))
            if w in src_set:
                continue
            parent[w] = u
            depth[w] = depth[u] + 1
            queue.append(w)
    return None


# -- set and parity operations ---------------------------------------


def parity(g: Graph, u: int, v: int) -> int:
    """0 if u,v share a bipartition side, 1 otherwise.

    Equals the parity of every u,v-path length.  Errors when the graph
    is not bipartite or u and v are disconnected.
    """
    if g.side is None:
        raise PreconditionError("parity undefined: graph is not bipartite")
    if g.comp[u] != g.comp[v]:
        raise PreconditionError(f"vertices {u} and {v} are in different components")
    return g.side[u] ^ g.side[v]


def induced_degree(g: Graph, v: int, target: Iterable[int]) -> int:
    """Number of neighbors of v inside the target set."""
    tset = target if isinstance(target, (set, frozenset)) else set(target)
    return sum(1 for w in g.neighbors(v) if w in tset)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Graph:
    """Induced subgraph relabeled to 0..k-1; labels map back to g's ids."""
    keep = sorted(set(vertices))
    index = {v: i for i, v in enumerate(keep)}
    edges = []
    for v in keep:
        for w in g.neighbors(v):
            if v < w and w in index:
                edges.append((index[v], index[w]))
    if g.labels is None:
        labels = tuple(keep)
    else:
        labels = tuple(g.labels[v] for v in keep)
    return Graph(len(keep), edges, labels=labels)


def edge_subgraph(g: Graph, edges: Iterable[tuple[int, int]]) -> Graph:
    """Spanning subgraph on the same vertex set with only the given edges."""
    return Graph(g.n, edges, labels=g.labels)


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component (ties: lowest id)."""
    if g.n == 0:
        return g
    sizes: dict[int, int] = {}
    for c in g.comp:
        sizes[c] = sizes.get(c, 0) + 1
    best = max(sizes, key=lambda c: (sizes[c], -c))
    return induced_subgraph(g, [v for v in range(g.n) if g.comp[v] == best])
