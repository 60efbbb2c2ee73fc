"""Krakens: a cycle whose every vertex owns, through a short private path,
the center of a private expansion (its "leg").

This module has three layers: the data type with its clause-by-clause
checker, a heuristic search that carves a kraken out of free territory,
and the robust pipeline that keeps finding krakens inside a forbidden-set
survivor graph until one has its legs either ending at high-degree
vertices or re-seated on well-separated anchor sets.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .config import ResolvedConfig, RunConfig
from .errors import NoPathError, PillarkitError, PreconditionError, StageError
from .expander import extract_expander
from .graph import (Cycle, Graph, Path, ball, induced_degree, induced_subgraph,
                    largest_component, set_distance, shortest_set_path)
from .primitives import (Expansion, connect_short, find_large_ball,
                         find_q3_bruteforce, trim_expansion)
from .validity import ValidityReport

@dataclass(frozen=True)
class Kraken:
    """A (k, s, t)-kraken: cycle of length k; per cycle vertex v_j a path
    P_j of length at most 10s to an end u_j carrying a (t, s)-expansion
    leg F_j; legs pairwise disjoint and off the cycle, paths pairwise
    disjoint with interiors clear of the cycle and of every leg."""

    cycle: Cycle
    ends: tuple[int, ...]
    legs: tuple[Expansion, ...]
    paths: tuple[Path, ...]
    s: int
    t: int

    @property
    def k(self) -> int:
        return len(self.cycle.vertices)

    def vertex_set(self) -> frozenset[int]:
        out = set(self.cycle.vertices)
        for leg in self.legs:
            out |= leg.members
        for p in self.paths:
            out |= p.vertex_set()
        return frozenset(out)

    def low_degree_legs(self, high_degree: frozenset[int]) -> list[int]:
        """Indices of legs lying entirely outside the high-degree set."""
        return [j for j, leg in enumerate(self.legs) if not (leg.members & high_degree)]

    def to_json_dict(self) -> dict:
        return {
            "kind": "kraken",
            "version": 1,
            "k": self.k,
            "s": self.s,
            "t": self.t,
            "cycle": list(self.cycle.vertices),
            "ends": list(self.ends),
            "legs": [sorted(leg.members) for leg in self.legs],
            "paths": [list(p.vertices) for p in self.paths],
        }

    @classmethod
    def from_json_dict(cls, data: dict, g: Graph) -> "Kraken":
        try:
            cycle = Cycle(tuple(int(v) for v in data["cycle"]))
            ends = tuple(int(v) for v in data["ends"])
            paths = tuple(Path(tuple(int(v) for v in p)) for p in data["paths"])
            legs = []
            for end, members in zip(ends, data["legs"]):
                mset = frozenset(int(v) for v in members)
                dist = _leg_distances(g, end, mset)
                radius = max(dist.values()) if dist and len(dist) == len(mset) else int(data["s"])
                legs.append(Expansion(end, mset, radius))
            return cls(cycle, ends, tuple(legs), paths, int(data["s"]), int(data["t"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed kraken certificate: {exc}")


def _leg_distances(g: Graph, center: int, members: frozenset[int]) -> dict[int, int]:
    from collections import deque

    if center not in members or not all(0 <= v < g.n for v in members):
        return {}
    dist = {center: 0}
    queue = deque([center])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w in members and w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def verify_kraken(g: Graph, kr: Kraken) -> ValidityReport:
    """Check every kraken clause against the host graph; invalid structures
    get a report naming each failed clause, never an exception."""
    rep = ValidityReport()
    k = kr.k
    if any(not (0 <= v < g.n) for v in kr.vertex_set()):
        rep.add("ids-in-range", "vertex id out of range")
        return rep
    if not (len(kr.ends) == len(kr.legs) == len(kr.paths) == k):
        rep.add("shape", f"expected {k} ends/legs/paths")
        return rep
    if kr.t < 1 or kr.s < 0:
        rep.add("shape", "need t >= 1 and s >= 0")
    for msg in kr.cycle.failures(g):
        rep.add("cycle-valid", msg)
    cyc = kr.cycle.vertex_set()
    for j, end in enumerate(kr.ends):
        if end in cyc:
            rep.add("ends-outside-cycle", f"end {end} (leg {j}) lies on the cycle")
        if kr.legs[j].center != end:
            rep.add("end-in-leg", f"leg {j} is not an expansion of its end")
    claimed: dict[int, int] = {}
    for j, leg in enumerate(kr.legs):
        if leg.members & cyc:
            rep.add("legs-disjoint", f"leg {j} intersects the cycle")
        for v in leg.members:
            if v in claimed:
                rep.add("legs-disjoint", f"legs {claimed[v]} and {j} share vertex {v}")
                break
        for v in leg.members:
            claimed.setdefault(v, j)
        if leg.size != kr.t:
            rep.add("leg-expansion", f"leg {j} has {leg.size} vertices, expected t = {kr.t}")
        dist = _leg_distances(g, leg.center, leg.members)
        if len(dist) < leg.size:
            rep.add("leg-expansion", f"leg {j} not connected to its end")
        elif dist and max(dist.values()) > kr.s:
            rep.add("leg-expansion",
                    f"leg {j} has radius {max(dist.values())} > s = {kr.s}")
    all_legs = frozenset(claimed)
    seen_path: dict[int, int] = {}
    for j, p in enumerate(kr.paths):
        for msg in p.failures(g):
            rep.add("path-valid", f"path {j}: {msg}")
        expected = (kr.cycle.vertices[j], kr.ends[j])
        if p.ends != expected and p.ends != expected[::-1]:
            rep.add("path-endpoints", f"path {j} does not join v_{j} to u_{j}")
        if p.length > 10 * kr.s:
            rep.add("path-length", f"path {j} has length {p.length} > 10s = {10 * kr.s}")
        if p.length < 1:
            rep.add("path-length", f"path {j} is a single vertex")
        for v in p.vertices:
            if v in seen_path:
                rep.add("paths-disjoint", f"paths {seen_path[v]} and {j} share vertex {v}")
                break
        for v in p.vertices:
            seen_path.setdefault(v, j)
        bad_interior = (set(p.interior()) & (cyc | all_legs))
        if bad_interior:
            rep.add("path-internal-avoidance",
                    f"path {j} interior meets cycle or legs at {sorted(bad_interior)[:3]}")
    return rep


# -- heuristic search ---------------------------------------------------


def _shortest_cycle_from(g: Graph, start: int) -> list[int] | None:
    """Cycle recovered from the first non-tree edge in a BFS from start."""
    parent = {start: -1}
    depth = {start: 0}
    queue = [start]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for w in g.neighbors(u):
            if w not in parent:
                parent[w] = u
                depth[w] = depth[u] + 1
                queue.append(w)
            elif w != parent[u] and depth[w] >= depth[u]:
                chain_u = [u]
                while parent[chain_u[-1]] != -1:
                    chain_u.append(parent[chain_u[-1]])
                on_u = set(chain_u)
                chain_w = [w]
                while chain_w[-1] not in on_u:
                    chain_w.append(parent[chain_w[-1]])
                meet = chain_w.pop()
                cu = chain_u[:chain_u.index(meet) + 1]
                # meet -> ... -> u, then across the non-tree edge to w,
                # then back up w's branch toward meet
                return cu[::-1] + chain_w
    return None


def find_kraken(g: Graph, k_max: int | None = None, s: int | None = None,
                t: int = 1, seed: int = 0, *, eps1: float = 0.1,
                sample_starts: int = 24) -> Kraken:
    """Carve a kraken out of a connected graph.

    Three stages, each claiming territory the later ones must respect:
    find a short cycle from seeded start vertices, walk a private path
    off every cycle vertex into unclaimed space, then grow each leg to t
    vertices by BFS through what is still free.  Starving at any stage
    raises a StageError naming it.
    """
    if g.n == 0 or len(set(g.comp)) != 1:
        raise PreconditionError("kraken search needs a connected, nonempty graph")
    if t < 1:
        raise PreconditionError("leg size t must be >= 1")
    if k_max is None:
        # ln(n) undershoots the girth on desk-size graphs; 4 admits a
        # shortest even cycle
        k_max = max(4, math.floor(math.log(g.n))) if g.n > 2 else 4
    if s is None:
        s = max(1, math.ceil(200 * math.log(g.n) ** 3 / eps1)) if g.n > 2 else 1
    s = max(1, s)

    rng = random.Random(seed)
    starts = rng.sample(range(g.n), min(g.n, sample_starts))
    floor = 4 if g.is_bipartite() else 3
    best: list[int] | None = None
    for v in starts:
        cand = _shortest_cycle_from(g, v)
        if cand and (best is None or len(cand) < len(best)):
            best = cand
            if len(best) == floor:
                break
    if best is None or len(best) > k_max:
        raise StageError("cycle", "no short cycle found",
                         {"best": len(best) if best else None, "k_max": k_max})

    cycle = Cycle(tuple(best))
    claimed = set(best)
    ends: list[int] = []
    paths: list[Path] = []
    for j, v in enumerate(cycle.vertices):
        p = shortest_set_path(g, [v], set(range(g.n)) - claimed - {v},
                              claimed - {v}, cap=10 * s)
        if p is None:
            raise StageError("paths", f"no unclaimed territory reachable from cycle vertex {v}",
                             {"cycle_index": j, "claimed": len(claimed)})
        ends.append(p.vertices[-1])
        paths.append(p)
        claimed.update(p.vertices)
    legs: list[Expansion] = []
    for j, u in enumerate(ends):
        members = [u]
        frontier = [u]
        depth = 0
        seen = set(members)
        while len(members) < t and frontier and depth < s:
            nxt = []
            for a in frontier:
                for w in g.neighbors(a):
                    if w not in seen and w not in claimed:
                        seen.add(w)
                        nxt.append(w)
                        members.append(w)
                        if len(members) == t:
                            break
                if len(members) == t:
                    break
            frontier = nxt
            depth += 1
        if len(members) < t:
            raise StageError("legs", f"leg {j} starved at {len(members)}/{t} vertices",
                             {"leg_index": j, "reached": len(members)})
        radius = _leg_distances(g, u, frozenset(members))
        legs.append(Expansion(u, frozenset(members), max(radius.values())))
        claimed.update(members)

    kr = Kraken(cycle, tuple(ends), tuple(legs), tuple(paths), s, t)
    rep = verify_kraken(g, kr)
    if not rep.valid:
        raise PillarkitError(f"internal: constructed kraken invalid ({rep})")
    return kr


# -- robust pipeline ----------------------------------------------------


@dataclass
class LegLink:
    kind: str  # "P" (to a high-degree vertex) or "Q" (to an anchor)
    path: Path  # from a leg vertex to the terminal
    anchor: int | None = None


@dataclass
class KrakenEntry:
    kraken: Kraken
    n_h: int  # size of the survivor subgraph it was found in
    m_h: int


@dataclass
class KrakenSearchState:
    """Bookkeeping for the robust search: the kraken collection, the anchor
    sets, and the per-kraken links (at most one per leg, pairwise disjoint
    within a kraken, anchors used at most once per kraken)."""

    graph: Graph
    cfg: ResolvedConfig
    forbidden: frozenset[int]           # U
    high_degree: frozenset[int]         # L
    u0: frozenset[int]
    u1: frozenset[int]
    collection: list[KrakenEntry] = field(default_factory=list)
    anchors: list[Expansion] = field(default_factory=list)
    links: list[dict[int, LegLink]] = field(default_factory=list)

    def paths_to_high_degree(self) -> list[Path]:
        return [l.path for links in self.links for l in links.values() if l.kind == "P"]

    def paths_to_anchors(self) -> list[Path]:
        return [l.path for links in self.links for l in links.values() if l.kind == "Q"]

    def used_anchors(self, i: int) -> set[int]:
        return {l.anchor for l in self.links[i].values() if l.anchor is not None}

    def free_legs(self, i: int) -> list[int]:
        kr = self.collection[i].kraken
        return [j for j in range(kr.k) if j not in self.links[i]]

    def check(self) -> None:
        """Invariants re-checked after every link mutation."""
        for i, links in enumerate(self.links):
            kr = self.collection[i].kraken
            seen: set[int] = set()
            anchors_used: set[int] = set()
            for j, link in links.items():
                p = link.path
                if p.vertices[0] not in kr.legs[j].members:
                    raise PillarkitError(f"link for kraken {i} leg {j} does not start in the leg")
                if link.kind == "P":
                    if p.length > self.cfg.p_len_cap:
                        raise PillarkitError(f"high-degree link longer than {self.cfg.p_len_cap}")
                    if p.vertices[-1] not in self.high_degree - self.forbidden:
                        raise PillarkitError("high-degree link does not end in L minus U")
                else:
                    if p.length > self.cfg.q_len_cap:
                        raise PillarkitError(f"anchor link longer than {self.cfg.q_len_cap}")
                    if link.anchor is None or p.vertices[-1] not in self.anchors[link.anchor].members:
                        raise PillarkitError("anchor link does not end in its anchor")
                    if link.anchor in anchors_used:
                        raise PillarkitError(f"anchor {link.anchor} linked twice to kraken {i}")
                    anchors_used.add(link.anchor)
                overlap = seen & set(p.vertices)
                if overlap:
                    raise PillarkitError(
                        f"links of kraken {i} share vertices {sorted(overlap)[:3]}")
                seen |= set(p.vertices)


def robust_kraken(g: Graph, u: frozenset[int] | set[int], config: RunConfig, *,
                  seed: int | None = None, q3_free: bool | None = None,
                  return_state: bool = False):
    """Find a kraken in the graph minus U whose legs are each either ended
    at a high-degree vertex or fully low-degree, with the low-degree legs
    pairwise well separated (and separated from U) away from the
    high-degree set.

    The Q3-free hypothesis is certified by brute force on small graphs
    and otherwise taken from the caller (pass ``q3_free=True``); what the
    hypothesis buys algorithmically, the bound on vertices dominated by
    U, is checked directly either way.  Stages starve with a StageError
    naming the stage.
    """
    rc = config.resolve(g.n)
    if seed is None:
        seed = rc.seed
    uset = frozenset(u)
    if len(uset) > rc.u_cap:
        raise PreconditionError(f"|U| = {len(uset)} over the cap {rc.u_cap}")
    if q3_free is False:
        raise PreconditionError("caller flagged the graph as containing a cube")
    if q3_free is None and g.n <= rc.q3_cap:
        if find_q3_bruteforce(g, cap=rc.q3_cap) is not None:
            raise PreconditionError("graph contains a cube; robust search assumes cube-freeness")

    high = frozenset(v for v in range(g.n) if g.degree(v) >= rc.delta_threshold)
    u0 = frozenset(v for v in range(g.n)
                   if v not in uset and induced_degree(g, v, uset) >= config.d / 2)
    if len(u0) > rc.u0_cap:
        raise StageError("u0-bound",
                         f"{len(u0)} vertices dominated by U (cap {rc.u0_cap}); "
                         "the cube-freeness hypothesis looks violated",
                         {"u0": len(u0)})
    u1 = uset | u0

    state = KrakenSearchState(g, rc, uset, high, u0, u1)
    _build_collection(state, config, seed)
    early = _first_qualifying(state)
    if early is not None:
        return (early, state) if return_state else early
    _build_anchors(state, config)
    for round_no in range(rc.max_link_rounds):
        _augment_links(state)
        full = next((i for i in range(len(state.collection)) if not state.free_legs(i)), None)
        if full is not None:
            kr = _assemble(state, full)
            return (kr, state) if return_state else kr
        outcome = _collective_round(state)
        if outcome[0] == "rewrite":
            continue
        if outcome[0] == "winner":
            _connect_winner(state, *outcome[1:])
            continue
        raise StageError("collective-expansion",
                         "no free leg expanded to the threshold",
                         {"final_sizes": outcome[1], "threshold": rc.collective_threshold})
    raise StageError("link-rounds", f"no kraken fully linked in {rc.max_link_rounds} rounds",
                     {"linked": [len(l) for l in state.links]})


def _qualifies(g: Graph, kr: Kraken, high: frozenset[int], uset: frozenset[int],
               rc: ResolvedConfig) -> bool:
    """The two output properties: every leg ends high-degree or avoids the
    high-degree set entirely, and the avoiding legs are pairwise (and
    from U) at least the configured separation apart off the high set."""
    low = []
    for j, leg in enumerate(kr.legs):
        if kr.ends[j] in high:
            continue
        if leg.members & high:
            return False
        low.append(leg.members)
    for a in range(len(low)):
        for b in range(a + 1, len(low)):
            d = set_distance(g, low[a], low[b], avoid=high, cap=rc.separation - 1)
            if d is not None and d < rc.separation:
                return False
    u_low = uset - high
    for members in low:
        if u_low:
            d = set_distance(g, members, u_low, avoid=high, cap=rc.separation - 1)
            if d is not None and d < rc.separation:
                return False
    return True


def _child_seed(seed: int, tag: int) -> int:
    return (seed * 0x9E3779B97F4A7C15 + tag) & 0xFFFFFFFFFFFF


def _build_collection(state: KrakenSearchState, config: RunConfig, seed: int) -> None:
    g, rc = state.graph, state.cfg
    for round_no in range(rc.kraken_count):
        used = set()
        for entry in state.collection:
            used |= entry.kraken.vertex_set()
        w = (state.u1 | used) - state.high_degree
        wprime = set(ball(g, w, rc.kraken_separation, state.high_degree - w)) if w else set()
        avoid = set(state.forbidden) | wprime
        survivors = [v for v in range(g.n) if v not in avoid]
        if len(survivors) < 3:
            break
        sub = largest_component(induced_subgraph(g, survivors))
        if sub.n < 3:
            break
        target_d = max(1, config.d // 64)
        try:
            h = extract_expander(sub, target_d, config.params,
                                 seed=_child_seed(seed, round_no),
                                 trials=rc.expansion_trials,
                                 sample_cap=rc.expansion_sample_cap,
                                 workers=rc.workers)
            h = largest_component(h)
        except (PreconditionError, StageError):
            h = sub  # survivor graph too thin to re-extract; search it directly
        if h.n < 3:
            break
        try:
            local = find_kraken(h, k_max=rc.k_max, s=rc.m, t=rc.leg_size,
                                seed=_child_seed(seed, 1000 + round_no),
                                eps1=config.eps1)
        except (PreconditionError, StageError) as exc:
            if not state.collection:
                raise StageError("kraken-collection", f"no kraken found: {exc}",
                                 {"survivors": sub.n})
            break
        kr = _translate_kraken(local, h.labels)
        n_h = h.n
        m_h = max(1, math.ceil(200 * math.log(max(n_h, 3)) ** 3 / config.eps1))
        state.collection.append(KrakenEntry(kr, n_h, min(m_h, rc.m)))
        state.links.append({})
    if not state.collection:
        raise StageError("kraken-collection", "no kraken found in the survivor graph", {})


def _translate_kraken(kr: Kraken, labels: tuple[int, ...] | None) -> Kraken:
    if labels is None:
        return kr
    remap = lambda v: labels[v]
    return Kraken(
        Cycle(tuple(remap(v) for v in kr.cycle.vertices)),
        tuple(remap(v) for v in kr.ends),
        tuple(Expansion(remap(l.center), frozenset(remap(v) for v in l.members), l.radius)
              for l in kr.legs),
        tuple(Path(tuple(remap(v) for v in p.vertices)) for p in kr.paths),
        kr.s, kr.t)


def _first_qualifying(state: KrakenSearchState) -> Kraken | None:
    for entry in state.collection:
        if _qualifies(state.graph, entry.kraken, state.high_degree,
                      state.forbidden, state.cfg):
            return entry.kraken
    return None


def _build_anchors(state: KrakenSearchState, config: RunConfig) -> None:
    g, rc = state.graph, state.cfg
    used = set()
    for entry in state.collection:
        used |= entry.kraken.vertex_set()
    for _ in range(rc.anchor_count):
        core = set(state.forbidden)
        for a in state.anchors:
            core |= a.members
        core -= state.high_degree
        sep_ball = set(ball(g, core, rc.separation, state.high_degree - core)) if core else set()
        avoid = state.high_degree | state.forbidden | used | sep_ball
        try:
            exp = find_large_ball(g, avoid, config.params,
                                  w_cap=None if rc.mode == "formula" else float(g.n),
                                  max_candidates=rc.ball_candidates)
        except (PreconditionError, StageError):
            break
        if exp.size < rc.anchor_size:
            break
        anchor = trim_expansion(g, exp, rc.anchor_size)
        _assert_anchor_separation(state, anchor)
        state.anchors.append(anchor)


def _assert_anchor_separation(state: KrakenSearchState, anchor: Expansion) -> None:
    g, rc = state.graph, state.cfg
    others = set(state.forbidden) - state.high_degree
    for a in state.anchors:
        others |= a.members
    if not others:
        return
    d = set_distance(g, anchor.members, others, avoid=state.high_degree,
                     cap=rc.separation - 1)
    if d is not None and d < rc.separation:
        raise PillarkitError(
            f"internal: new anchor lands {d} < {rc.separation} from existing anchors or U")


def _link_obstacles(state: KrakenSearchState, i: int, j: int) -> set[int]:
    """What a new link path for kraken i's leg j must stay clear of: U, the
    kraken's cycle and private paths, and the vertices of its existing
    links.  Sibling legs stay traversable."""
    kr = state.collection[i].kraken
    avoid = set(state.forbidden) | set(kr.cycle.vertices)
    for p in kr.paths:
        avoid |= p.vertex_set()
    for link in state.links[i].values():
        avoid |= set(link.path.vertices)
    avoid -= kr.legs[j].members
    avoid.discard(kr.ends[j])
    return avoid


def _augment_links(state: KrakenSearchState) -> None:
    """Greedy maximal linking: every free leg tries the shortest admissible
    path to L minus U, then to an anchor unused by its kraken."""
    g, rc = state.graph, state.cfg
    hi_targets = state.high_degree - state.forbidden
    for i in range(len(state.collection)):
        kr = state.collection[i].kraken
        for j in state.free_legs(i):
            avoid = _link_obstacles(state, i, j)
            leg = kr.legs[j].members
            if hi_targets - avoid - leg:
                p = shortest_set_path(g, leg, hi_targets - avoid, avoid, cap=rc.p_len_cap)
                if p is not None:
                    state.links[i][j] = LegLink("P", p)
                    state.check()
                    continue
            used = state.used_anchors(i)
            targets = set()
            for a_idx, a in enumerate(state.anchors):
                if a_idx not in used:
                    targets |= a.members
            if not targets:
                continue
            p = shortest_set_path(g, leg, targets - avoid, avoid, cap=rc.q_len_cap)
            if p is not None:
                a_idx = next(ai for ai, a in enumerate(state.anchors)
                             if p.vertices[-1] in a.members)
                state.links[i][j] = LegLink("Q", p, a_idx)
                state.check()


def _collective_round(state: KrakenSearchState):
    """Grow a ball from one free leg of every kraken for ell0 steps.

    While growing, enforce the shortcut rule: an existing link path whose
    vertices meet the ball's neighborhood in more than r+1 vertices by
    step r gets its initial segment rewritten through the ball (which
    strictly shortens it and re-seats it on the free leg).  Returns the
    first rewrite, else the first kraken whose ball hits the collective
    threshold, else the final sizes.
    """
    g, rc = state.graph, state.cfg
    sizes: list[int] = []
    grown: list[tuple[int, dict[int, int | None]] | None] = []
    for i in range(len(state.collection)):
        kr = state.collection[i].kraken
        free = state.free_legs(i)
        if not free:
            sizes.append(0)
            grown.append(None)
            continue
        j0 = free[0]
        a = kr.legs[j0].members
        b = set(kr.cycle.vertices)
        for p in kr.paths:
            b |= p.vertex_set()
        b.discard(kr.ends[j0])
        links = sorted(state.links[i].items())
        c = set()
        for _, link in links:
            c |= set(link.path.vertices)
        hard = set(state.forbidden) | b
        seeds = a - hard - c
        parents: dict[int, int | None] = {v: None for v in seeds}
        reached = set(seeds)
        for r in range(1, rc.ell0 + 1):
            boundary = set()
            for v in reached:
                for w in g.neighbors(v):
                    if w not in reached and w not in hard:
                        boundary.add(w)
            for j, link in links:
                hits = boundary & set(link.path.vertices)
                if len(hits) > r + 1:
                    _apply_shortcut(state, i, j, j0, link, hits, parents)
                    return ("rewrite", i)
            new = boundary - c
            for w in sorted(new):
                if w not in parents:
                    nb = min(v for v in g.neighbors(w) if v in reached)
                    parents[w] = nb
            reached |= new
            if not new:
                break
        sizes.append(len(reached))
        grown.append((j0, parents))
    for i, size in enumerate(sizes):
        if grown[i] is not None and size >= rc.collective_threshold:
            return ("winner", i, grown[i][0], grown[i][1])
    return ("starve", sizes)


def _chain_from(parents: dict[int, int | None], v: int) -> list[int]:
    chain = [v]
    while parents[chain[-1]] is not None:
        chain.append(parents[chain[-1]])
    chain.reverse()
    return chain


def _apply_shortcut(state: KrakenSearchState, i: int, j: int, j0: int,
                    link: LegLink, hits: set[int], parents: dict[int, int | None]) -> None:
    """Replace the initial segment of an overlapped link path by a route
    through the free leg's ball; the path gets strictly shorter and now
    belongs to leg j0."""
    g = state.graph
    verts = link.path.vertices
    idx = max(verts.index(h) for h in hits)
    z = verts[idx]
    y = min(v for v in g.neighbors(z) if v in parents)
    new_path = Path(tuple(_chain_from(parents, y)) + verts[idx:])
    if new_path.length >= link.path.length:
        raise PillarkitError("internal: shortcut rewrite failed to shorten the path")
    del state.links[i][j]
    state.links[i][j0] = LegLink(link.kind, new_path, link.anchor)
    state.check()


def _connect_winner(state: KrakenSearchState, i: int, j0: int,
                    parents: dict[int, int | None]) -> None:
    """Connect the expanded free leg to an anchor its kraken has not used,
    then record the combined path as a new anchor link."""
    g, rc = state.graph, state.cfg
    kr = state.collection[i].kraken
    used = state.used_anchors(i)
    fresh = [a_idx for a_idx in range(len(state.anchors)) if a_idx not in used]
    if not fresh:
        raise StageError("anchors-exhausted",
                         f"kraken {i} has a free leg but every anchor is already linked to it",
                         {"anchors": len(state.anchors)})
    targets = set()
    for a_idx in fresh:
        targets |= state.anchors[a_idx].members
    ball_set = set(parents)
    prior = set()
    for a_idx in used:
        prior |= state.anchors[a_idx].members
    b = set(kr.cycle.vertices)
    for p in kr.paths:
        b |= p.vertex_set()
    b.discard(kr.ends[j0])
    c = set()
    for link in state.links[i].values():
        c |= set(link.path.vertices)
    inside = sorted(ball_set & targets)
    if inside:
        tail: list[int] = []
    else:
        avoid = (set(state.forbidden) | b | c | prior) - ball_set
        try:
            p = connect_short(g, ball_set - prior, targets, avoid, state.cfg.params)
        except NoPathError:
            raise StageError("link-starved",
                             f"expanded free leg of kraken {i} cannot reach a fresh anchor",
                             {"ball": len(ball_set), "targets": len(targets)})
        inside = [p.vertices[0]]
        tail = list(p.vertices[1:])
    combined = _chain_from(parents, inside[0]) + tail
    if len(combined) - 1 > rc.q_len_cap:
        raise StageError("link-starved",
                         f"anchor route of length {len(combined) - 1} over the cap {rc.q_len_cap}",
                         {"length": len(combined) - 1})
    terminal = combined[-1]
    a_idx = next(ai for ai in fresh if terminal in state.anchors[ai].members)
    state.links[i][j0] = LegLink("Q", Path(tuple(combined)), a_idx)
    state.check()


def _assemble(state: KrakenSearchState, i: int) -> Kraken:
    """Upgrade a fully linked kraken: each high-degree link contributes its
    terminal plus fresh neighbors as the new leg, each anchor link a
    trimmed connected piece of its anchor; private paths are extended
    through the old legs onto the link paths."""
    g, rc = state.graph, state.cfg
    kr = state.collection[i].kraken
    links = state.links[i]
    new_paths: list[Path] = []
    linkverts = set()
    for link in links.values():
        linkverts |= set(link.path.vertices)
    for j in range(kr.k):
        link = links[j]
        lp = link.path
        a = lp.vertices[0]
        blocked = (linkverts - set(lp.vertices)) | {v for p in new_paths for v in p.vertices}
        old = kr.paths[j].vertices
        if old[0] != kr.cycle.vertices[j]:
            old = old[::-1]
        if kr.ends[j] == a:
            traverse: tuple[int, ...] = (a,)
        else:
            tr = shortest_set_path(g, [kr.ends[j]], [a],
                                   (blocked | (set(g.vertices()) - kr.legs[j].members))
                                   - {kr.ends[j], a})
            if tr is None:
                raise StageError("assembly",
                                 f"cannot route through leg {j} around crossing links",
                                 {"kraken": i, "leg": j})
            traverse = tr.vertices
        new_paths.append(Path(old + traverse[1:] + lp.vertices[1:]))
    claims = set(kr.cycle.vertices)
    for p in new_paths:
        claims |= p.vertex_set()
    new_legs: list[Expansion | None] = [None] * kr.k
    new_ends: list[int] = [p.vertices[-1] for p in new_paths]
    for j in range(kr.k):
        if links[j].kind != "Q":
            continue
        anchor = state.anchors[links[j].anchor]
        end = new_ends[j]
        piece = _grow_within(g, end, anchor.members - (claims - {end}), rc.leg_size)
        if piece is None:
            raise StageError("assembly", f"anchor {links[j].anchor} too crowded to seat leg {j}",
                             {"kraken": i, "leg": j})
        new_legs[j] = piece
        claims |= piece.members
    for j in range(kr.k):
        if links[j].kind != "P":
            continue
        end = new_ends[j]
        fresh = [w for w in g.neighbors(end) if w not in claims][:rc.leg_size - 1]
        if len(fresh) < rc.leg_size - 1:
            raise StageError("assembly",
                             f"high-degree vertex {end} has too few free neighbors for leg {j}",
                             {"kraken": i, "leg": j, "free": len(fresh)})
        members = frozenset([end, *fresh])
        new_legs[j] = Expansion(end, members, 1 if len(members) > 1 else 0)
        claims |= members
    s_new = max(1, max(l.radius for l in new_legs),
                max(math.ceil(p.length / 10) for p in new_paths))
    upgraded = Kraken(kr.cycle, tuple(new_ends), tuple(new_legs), tuple(new_paths),
                      s_new, rc.leg_size)
    rep = verify_kraken(g, upgraded)
    if not rep.valid:
        raise PillarkitError(f"internal: assembled kraken invalid ({rep})")
    if not _qualifies(g, upgraded, state.high_degree, state.forbidden, rc):
        raise StageError("assembly-quality",
                         "assembled kraken misses the separation properties", {"kraken": i})
    return upgraded


def _grow_within(g: Graph, start: int, allowed: frozenset[int] | set[int],
                 size: int) -> Expansion | None:
    if start not in allowed:
        return None
    members = [start]
    seen = {start}
    frontier = [start]
    depth = 0
    while len(members) < size and frontier:
        nxt = []
        for v in frontier:
            for w in g.neighbors(v):
                if w in allowed and w not in seen:
                    seen.add(w)
                    members.append(w)
                    nxt.append(w)
                    if len(members) == size:
                        break
            if len(members) == size:
                break
        frontier = nxt
        depth += 1
    if len(members) < size:
        return None
    dist = _leg_distances(g, start, frozenset(members))
    return Expansion(start, frozenset(members), max(dist.values()))
