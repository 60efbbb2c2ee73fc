"""Reusable expansion and connection machinery: cube finding, short robust
connection, growth past thin obstacle sets, large-ball finding, expansion
trimming, and collective expansion of set families."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import NoPathError, PillarkitError, PreconditionError, StageError
from .expander import ExpanderParams, epsilon
from .graph import Graph, Path, ball, distances_from, shortest_set_path

# Cube positions are 3-bit coordinates; adjacency = one differing bit.
CUBE_EDGES = [(i, j) for i in range(8) for j in range(8)
              if i < j and bin(i ^ j).count("1") == 1]


@dataclass(frozen=True)
class Expansion:
    """A set of ``size`` vertices all within ``radius`` of the center,
    where distance is measured inside the induced subgraph on the set."""

    center: int
    members: frozenset[int]
    radius: int

    @property
    def size(self) -> int:
        return len(self.members)

    def failures(self, g: Graph) -> list[str]:
        out = []
        if self.center not in self.members:
            out.append("center not a member")
            return out
        dist = _distances_within(g, self.center, self.members)
        missing = self.members.difference(dist)
        if missing:
            out.append(f"{len(missing)} members unreachable from center")
        elif dist and max(dist.values()) > self.radius:
            out.append(f"member at distance {max(dist.values())} > radius {self.radius}")
        return out

    def is_valid(self, g: Graph) -> bool:
        return not self.failures(g)

    def to_json_dict(self) -> dict:
        return {"kind": "expansion", "version": 1, "center": self.center,
                "members": sorted(self.members), "radius": self.radius}


def _distances_within(g: Graph, start: int, members: frozenset[int]) -> dict[int, int]:
    from collections import deque

    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w in members and w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


@dataclass(frozen=True)
class Q3Certificate:
    """Eight distinct vertices realizing a cube; index = 3-bit coordinate."""

    vertices: tuple[int, ...]

    def failures(self, g: Graph) -> list[str]:
        out = []
        if len(self.vertices) != 8:
            return ["need exactly 8 vertices"]
        if len(set(self.vertices)) != 8:
            out.append("vertices not distinct")
        if any(not (0 <= v < g.n) for v in self.vertices):
            out.append("vertex id out of range")
            return out
        for i, j in CUBE_EDGES:
            if not g.has_edge(self.vertices[i], self.vertices[j]):
                out.append(f"missing cube edge {self.vertices[i]}-{self.vertices[j]}")
        return out

    def is_valid(self, g: Graph) -> bool:
        return not self.failures(g)

    def to_json_dict(self) -> dict:
        return {"kind": "q3", "version": 1, "vertices": list(self.vertices),
                "edges": [[self.vertices[i], self.vertices[j]] for i, j in CUBE_EDGES]}


@dataclass(frozen=True)
class ThinSetWitness:
    """Per-step record of how much an obstacle set meets the growing ball.

    ``trace[i-1]`` is the number of obstacle vertices adjacent to the
    (i-1)-ball of ``around`` when the obstacle set itself is avoided.
    The set is (lam, k)-thin when trace[i-1] <= lam * i**k throughout.
    """

    around: frozenset[int]
    thin_set: frozenset[int]
    lam: float
    k: int
    trace: tuple[int, ...]

    def is_satisfied(self) -> bool:
        return all(t <= self.lam * (i ** self.k) for i, t in enumerate(self.trace, 1))


@dataclass(frozen=True)
class GrowthResult:
    ball: frozenset[int]
    witness: ThinSetWitness
    met: bool
    target: float


# -- Q3 finding --------------------------------------------------------

# Coordinates used when assembling a cube out of a 4-set {x,y,z,w} and
# one common neighbor per 3-subset: x,y,z,w land on one parity class of
# the cube, the four triple-representatives on the other, and each
# representative is non-adjacent exactly to the element it omits.
_QUAD_COORDS = (0, 3, 6, 5)           # x, y, z, w
_TRIPLE_COORDS = {0: 7, 1: 4, 2: 1, 3: 2}  # omitted index -> coordinate


def _assemble_cube(quad: Sequence[int], reps: Sequence[int]) -> Q3Certificate:
    slots = [0] * 8
    for q, coord in zip(quad, _QUAD_COORDS):
        slots[coord] = q
    for omit, rep in enumerate(reps):
        slots[_TRIPLE_COORDS[omit]] = rep
    return Q3Certificate(tuple(slots))


def find_q3_bipartite(g: Graph, u_side: Iterable[int], w_side: Iterable[int], d: int) -> Q3Certificate:
    """Build a cube in an asymmetric bipartite graph by coloring triples.

    Requires |U| > C(|W|, 3) and every U-vertex to have at least d >= 4
    neighbors in W.  Triples of W are greedily colored by an unused
    common neighbor; any vertex of U left unused as a color then has all
    triples of its neighborhood colored, and four of its neighbors plus
    the four matching colors form a cube.
    """
    u_list = sorted(set(u_side))
    w_set = frozenset(w_side)
    if w_set & set(u_list):
        raise PreconditionError("U and W must be disjoint")
    if d < 4:
        raise PreconditionError("need d >= 4")
    wn = len(w_set)
    if len(u_list) <= math.comb(wn, 3):
        raise PreconditionError(
            f"|U| = {len(u_list)} must exceed C(|W|,3) = {math.comb(wn, 3)}")
    nbrs_in_w: dict[int, frozenset[int]] = {}
    for u in u_list:
        nb = frozenset(v for v in g.neighbors(u) if v in w_set)
        if any(v in set(u_list) for v in g.neighbors(u)):
            raise PreconditionError("edge inside U: graph not bipartite between U and W")
        if len(nb) < d:
            raise PreconditionError(f"vertex {u} has only {len(nb)} neighbors in W")
        nbrs_in_w[u] = nb
    for w in w_set:
        if any(v in w_set for v in g.neighbors(w)):
            raise PreconditionError("edge inside W: graph not bipartite between U and W")

    color: dict[frozenset[int], int] = {}
    used: set[int] = set()
    for triple in combinations(sorted(w_set), 3):
        tset = frozenset(triple)
        for u in u_list:
            if u not in used and tset <= nbrs_in_w[u]:
                color[tset] = u
                used.add(u)
                break

    free = next(u for u in u_list if u not in used)
    x, y, z, w = sorted(nbrs_in_w[free])[:4]
    quad = (x, y, z, w)
    reps = []
    for omit in range(4):
        triple = frozenset(q for i, q in enumerate(quad) if i != omit)
        rep = color.get(triple)
        if rep is None:
            raise PillarkitError(
                "internal: uncolored triple in the neighborhood of an unused vertex")
        reps.append(rep)
    cert = _assemble_cube(quad, reps)
    bad = cert.failures(g)
    if bad:
        raise PillarkitError(f"internal: assembled cube invalid ({bad[0]})")
    return cert


def find_q3_bruteforce(g: Graph, cap: int = 40) -> Q3Certificate | None:
    """Exhaustive cube search; None certifies the graph cube-free.

    Uses a 4-set/representatives scan on bipartite inputs and a pruned
    backtracking over cube positions otherwise.  Refuses graphs larger
    than ``cap``.
    """
    if g.n > cap:
        raise PreconditionError(f"brute-force cube search capped at n <= {cap} (got {g.n})")
    if g.n < 8 or g.m < 12:
        return None
    if g.is_bipartite():
        return _q3_bipartite_scan(g)
    return _q3_backtrack(g)


def _q3_bipartite_scan(g: Graph) -> Q3Certificate | None:
    comps: dict[int, list[int]] = {}
    for v in range(g.n):
        if g.degree(v) >= 3:
            comps.setdefault(g.comp[v], []).append(v)
    for members in comps.values():
        if len(members) < 8:
            continue
        side0 = [v for v in members if g.side[v] == 0]
        side1 = [v for v in members if g.side[v] == 1]
        small = side0 if len(side0) <= len(side1) else side1
        for quad in combinations(small, 4):
            nb = [set(g.neighbors(q)) for q in quad]
            cands = []
            ok = True
            for omit in range(4):
                common = frozenset.intersection(
                    *(frozenset(nb[i]) for i in range(4) if i != omit))
                common = common.difference(quad)
                if not common:
                    ok = False
                    break
                cands.append(sorted(common))
            if ok:
                reps = _distinct_reps(cands)
                if reps is not None:
                    return _assemble_cube(quad, reps)
    return None


def _distinct_reps(cands: list[list[int]]) -> list[int] | None:
    order = sorted(range(len(cands)), key=lambda i: len(cands[i]))
    chosen: dict[int, int] = {}

    def rec(pos: int) -> bool:
        if pos == len(order):
            return True
        i = order[pos]
        for c in cands[i]:
            if c not in chosen.values():
                chosen[i] = c
                if rec(pos + 1):
                    return True
                del chosen[i]
        return False

    if not rec(0):
        return None
    return [chosen[i] for i in range(len(cands))]


# Fill order and the cube-neighbors already placed at each step.
_FILL_ORDER = (0, 1, 2, 4, 3, 5, 6, 7)
_PLACED_NEIGHBORS = {0: (), 1: (0,), 2: (0,), 4: (0,), 3: (1, 2), 5: (1, 4),
                     6: (2, 4), 7: (3, 5, 6)}


def _q3_backtrack(g: Graph) -> Q3Certificate | None:
    good = [v for v in range(g.n) if g.degree(v) >= 3]
    nbr = {v: frozenset(w for w in g.neighbors(v) if g.degree(w) >= 3) for v in good}
    slot = [-1] * 8

    def rec(step: int, used: set[int]) -> bool:
        if step == len(_FILL_ORDER):
            return True
        pos = _FILL_ORDER[step]
        anchors = _PLACED_NEIGHBORS[pos]
        if anchors:
            cands = frozenset.intersection(*(nbr[slot[a]] for a in anchors))
        else:
            cands = good
        for v in sorted(cands):
            if v in used:
                continue
            # the three axis neighbors of position 0 are interchangeable
            if pos == 2 and v < slot[1]:
                continue
            if pos == 4 and v < slot[2]:
                continue
            slot[pos] = v
            used.add(v)
            if rec(step + 1, used):
                return True
            used.discard(v)
            slot[pos] = -1
        return False

    if rec(0, set()):
        return Q3Certificate(tuple(slot))
    return None


def find_q3_sampled(g: Graph, seed: int, trials: int = 64, ball_cap: int = 40) -> Q3Certificate | None:
    """Seeded local cube search for graphs too large to scan exhaustively.

    Any cube containing v lies inside the radius-3 ball of v, so each
    trial brute-forces one such ball (skipped when over ``ball_cap``).
    A None is only as strong as the sampling.
    """
    if g.n == 0:
        return None
    rng = random.Random(seed)
    from .graph import induced_subgraph

    for _ in range(trials):
        v = rng.randrange(g.n)
        reached = ball(g, [v], 3)
        if len(reached) > ball_cap:
            reached = ball(g, [v], 2)
            if len(reached) > ball_cap:
                continue
        sub = induced_subgraph(g, reached)
        hit = find_q3_bruteforce(sub, cap=ball_cap)
        if hit is not None:
            return Q3Certificate(tuple(sub.labels[u] for u in hit.vertices))
    return None


# -- robust short connection -------------------------------------------


def connect_short(g: Graph, a: Iterable[int], b: Iterable[int], w: Iterable[int],
                  params: ExpanderParams, x: int | None = None, *,
                  certified: bool = False, strict: bool = False) -> Path:
    """Shortest path from A to B in the graph minus W.

    Endpoints land one in each set, interior avoids both.  When the
    caller flags the graph as expander-certified the diameter bound
    (40/eps1)*ln^3(n) is enforced on the result.  The size hypothesis
    |W|*ln^3(n) <= 10x is informational unless ``strict`` is set: at
    bench scale it fails for harmless parameters.
    """
    aset, bset, wset = frozenset(a), frozenset(b), frozenset(w)
    if aset & bset or aset & wset or bset & wset:
        raise PreconditionError("A, B, W must be pairwise disjoint")
    if not aset or not bset:
        raise PreconditionError("A and B must be nonempty")
    if x is None:
        x = min(len(aset), len(bset))
    if len(aset) < x or len(bset) < x:
        raise PreconditionError(f"|A|,|B| must be at least x = {x}")
    if strict and g.n > 2 and len(wset) * math.log(g.n) ** 3 > 10 * x:
        raise PreconditionError("avoid set too large for the size floor x")
    # interior must clear A and B as well as W
    path = shortest_set_path(g, aset, bset, wset)
    if path is None:
        raise NoPathError("disconnected under avoidance")
    if certified and g.n > 2:
        bound = (40.0 / params.eps1) * math.log(g.n) ** 3
        if path.length > bound:
            raise PillarkitError(
                f"certified expander produced a path of length {path.length} > {bound:.1f}")
    return path


# -- growth past thin sets ---------------------------------------------


def grow_past_thin(g: Graph, x: Iterable[int], y: Iterable[int], w_thin: Iterable[int],
                   r: int, params: ExpanderParams, *, lam: float | None = None,
                   k: int = 1) -> GrowthResult:
    """Grow the ball of X for r steps avoiding Y and the thin set, recording
    how often the thin set touches each sphere.

    Whether the final ball met the exp(r^(1/4)) benchmark is reported,
    not raised: non-expander inputs are legitimate.
    """
    xset = frozenset(x)
    yset = frozenset(y)
    wset = frozenset(w_thin)
    if not xset:
        raise PreconditionError("X must be nonempty")
    if xset & wset:
        raise PreconditionError("thin set must be disjoint from X")
    if xset & yset:
        raise PreconditionError("Y must be disjoint from X")
    if r < 1:
        raise PreconditionError("need r >= 1")
    cap = 0.25 * epsilon(len(xset), params) * len(xset)
    if len(yset) > cap:
        raise PreconditionError(f"|Y| = {len(yset)} exceeds eps(|X|)|X|/4 = {cap:.3f}")
    if lam is None:
        lam = math.sqrt(len(xset))

    # frontier-incremental growth: a thin-set vertex stays adjacent to the
    # ball once seen, so the per-step intersection is the cumulative set
    # of blocked vertices discovered so far
    reached = set(xset)
    frontier = set(xset)
    blocked_seen: set[int] = set()
    trace: list[int] = []
    for _ in range(r):
        fresh = set()
        for u in frontier:
            for v in g.neighbors(u):
                if v not in reached and v not in yset and v not in blocked_seen:
                    fresh.add(v)
        blocked_seen |= fresh & wset
        trace.append(len(blocked_seen))
        frontier = fresh - wset
        reached |= frontier
    target = math.exp(r ** 0.25)
    witness = ThinSetWitness(xset, wset, lam, k, tuple(trace))
    return GrowthResult(frozenset(reached), witness, len(reached) >= target, target)


# -- large balls and trimming ------------------------------------------


def find_large_ball(g: Graph, w: Iterable[int], params: ExpanderParams, *,
                    w_cap: float | None = None,
                    max_candidates: int | None = None) -> Expansion:
    """First ball avoiding W that reaches n/25 vertices within the
    polylog radius budget, grown from centers in decreasing-degree order.

    ``w_cap`` overrides the default avoid-set cap eps1*n/(100*ln^2 n),
    which is below 1 for any feasible n and only binds in formula mode.
    """
    wset = frozenset(w)
    if w_cap is None:
        w_cap = params.eps1 * g.n / (100 * math.log(g.n) ** 2) if g.n > 2 else 0.0
    if len(wset) > w_cap:
        raise PreconditionError(f"|W| = {len(wset)} over the cap {w_cap:.3f}")
    if g.n == 0:
        raise PreconditionError("empty graph")
    radius_budget = math.ceil(200 * math.log(g.n) ** 3 / params.eps1) if g.n > 2 else g.n
    target = g.n / 25
    order = sorted((v for v in range(g.n) if v not in wset),
                   key=lambda v: (-g.degree(v), v))
    if max_candidates is not None:
        order = order[:max_candidates]
    for center in order:
        reached = {center}
        frontier = [center]
        depth = 0
        while frontier and depth < radius_budget and len(reached) < target:
            nxt = []
            for u in frontier:
                for v in g.neighbors(u):
                    if v not in reached and v not in wset:
                        reached.add(v)
                        nxt.append(v)
            if nxt:
                depth += 1
            frontier = nxt
        if len(reached) >= target:
            return Expansion(center, frozenset(reached), depth)
    raise StageError("large-ball", "no center grows a large enough ball",
                     {"candidates": len(order), "target": math.ceil(target)})


def trim_expansion(g: Graph, e: Expansion, d_target: int) -> Expansion:
    """Shrink an expansion to exactly ``d_target`` vertices, keeping the
    center and never increasing any member's distance to it.

    Drops BFS-tree leaves last-discovered-first, which is the same as
    keeping a BFS-order prefix; tree parents always survive, so kept
    vertices keep their old distances.
    """
    if not 1 <= d_target <= e.size:
        raise PreconditionError(f"need 1 <= D' <= {e.size} (got {d_target})")
    order = _bfs_order_within(g, e.center, e.members)
    if len(order) < e.size:
        raise PreconditionError("expansion members are not connected to the center")
    return Expansion(e.center, frozenset(order[:d_target]), e.radius)


def _bfs_order_within(g: Graph, start: int, members: frozenset[int]) -> list[int]:
    from collections import deque

    if start not in members:
        raise PreconditionError("center not a member")
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v in members and v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
    return order


def restrict_and_trim(g: Graph, e: Expansion, d_target: int,
                      avoid: Iterable[int]) -> Expansion | None:
    """Largest-priority BFS prefix of size d_target around the center once
    ``avoid`` is deleted; None when not enough survives.  The radius is
    re-measured (deleting vertices can stretch inner distances)."""
    avoid_set = frozenset(avoid)
    if e.center in avoid_set:
        return None
    members = e.members - avoid_set
    dist = _distances_within(g, e.center, frozenset(members))
    if len(dist) < d_target:
        return None
    order = sorted(dist, key=lambda v: (dist[v], v))[:d_target]
    return Expansion(e.center, frozenset(order), max(dist[v] for v in order))


# -- collective expansion ----------------------------------------------


def expand_collectively(g: Graph, u: Iterable[int],
                        family: Sequence[tuple[Iterable[int], Iterable[int], Iterable[int]]],
                        ell0: int, threshold: int) -> tuple[int, frozenset[int]]:
    """Grow each family member's ball ell0 steps avoiding U, B_i and C_i;
    return the lowest index whose ball reaches the threshold.

    Parallel growth must agree with this sequential selection rule.
    """
    if not family:
        raise PreconditionError("family must be nonempty")
    uset = frozenset(u)
    sizes = []
    for i, (a, b, c) in enumerate(family):
        aset, bset, cset = frozenset(a), frozenset(b), frozenset(c)
        if aset & (bset | cset | uset):
            raise PreconditionError(f"family[{i}]: A intersects B, C or U")
        grown = ball(g, aset, ell0, uset | bset | cset)
        if len(grown) >= threshold:
            return i, frozenset(grown)
        sizes.append(len(grown))
    raise StageError("collective-expansion", "no family member reached the threshold",
                     {"final_sizes": sizes, "threshold": threshold})


def collective_hypotheses_report(g: Graph, u: Iterable[int],
                                 family: Sequence[tuple[Iterable[int], Iterable[int], Iterable[int]]],
                                 ell0: int, d: int, *, d0: int = 1,
                                 lam: float | None = None,
                                 size_exponent: float = 10.0) -> list[dict]:
    """Check the collective-expansion hypotheses in their relaxed,
    parameterized forms and report per family member (never enforces).

    The thinness default for C_i is lam = sqrt(|A_i|); the original
    statement's fixed (4,1)-thinness works the same way and both are
    covered by the parameter.
    """
    uset = frozenset(u)
    reports = []
    balls = []
    for a, b, c in family:
        aset, bset, cset = frozenset(a), frozenset(b), frozenset(c)
        obstacles = uset | bset | cset
        seeds = aset - obstacles
        balls.append(ball(g, seeds, ell0, obstacles - aset) if seeds else set())
    for i, (a, b, c) in enumerate(family):
        aset, bset, cset = frozenset(a), frozenset(b), frozenset(c)
        lam_i = math.sqrt(len(aset)) if lam is None else lam
        rep = {
            "index": i,
            "min_size": len(aset) >= d0,
            "disjoint": not (aset & (bset | cset | uset)),
            "b_small": len(bset) <= _size_bound(len(aset), size_exponent),
            "c_thin": _is_thin(g, aset, cset, uset | bset, lam_i, 1, ell0),
            "u_degree": all(
                sum(1 for nb in g.neighbors(v) if nb in uset) <= d / 2
                for v in balls[i]),
        }
        far = True
        for j in range(len(family)):
            if j == i:
                continue
            oa, ob, oc = family[j]
            avoid = (uset | bset | cset | frozenset(ob) | frozenset(oc)) - aset - frozenset(oa)
            dist = _family_distance(g, aset, frozenset(oa), avoid)
            if dist is not None and dist < 2 * ell0:
                far = False
                break
        rep["pairwise_far"] = far
        reports.append(rep)
    return reports


def _size_bound(a: int, exponent: float) -> float:
    if a <= 3:
        return float(a)
    return a / math.log(a) ** exponent


def _is_thin(g: Graph, around: frozenset[int], thin: frozenset[int],
             extra_avoid: frozenset[int], lam: float, k: int, steps: int) -> bool:
    reached = set(around)
    for i in range(1, steps + 1):
        boundary = set()
        for uu in reached:
            for v in g.neighbors(uu):
                if v not in reached and v not in extra_avoid:
                    boundary.add(v)
        if len(boundary & thin) > lam * i ** k:
            return False
        grow = boundary - thin
        if not grow:
            return True
        reached |= grow
    return True


def _family_distance(g: Graph, a: frozenset[int], b: frozenset[int],
                     avoid: frozenset[int]) -> int | None:
    dist = distances_from(g, a, avoid)
    hits = [dist[v] for v in b if v in dist]
    return min(hits) if hits else None
