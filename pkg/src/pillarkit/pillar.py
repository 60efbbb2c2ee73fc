"""Pillars and how to build them: the certificate type and checker, the
exact-length connector (complete search at small n, detour splicing at
scale), kraken-to-kraken linking, and the end-to-end driver."""

from __future__ import annotations

from dataclasses import dataclass

from .config import ResolvedConfig, RunConfig
from .errors import (LengthNotRealizedError, NoPathError, PillarkitError,
                     PreconditionError, StageError)
from .graph import (Cycle, Graph, Path, ball, distances_from, largest_component,
                    parity, set_distance, shortest_set_path)
from .kraken import Kraken, robust_kraken, verify_kraken
from .primitives import (Expansion, Q3Certificate, connect_short,
                         find_q3_bruteforce, find_q3_sampled, restrict_and_trim)
from .validity import ValidityReport
from .expander import extract_expander

@dataclass(frozen=True)
class Pillar:
    """Two disjoint cycles of length s joined by s disjoint equal-length
    paths connecting matching vertices in order around the cycles."""

    s: int
    ell: int
    cycle1: Cycle
    cycle2: Cycle
    paths: tuple[Path, ...]

    def vertex_set(self) -> frozenset[int]:
        out = set(self.cycle1.vertices) | set(self.cycle2.vertices)
        for p in self.paths:
            out |= p.vertex_set()
        return frozenset(out)

    def to_json_dict(self) -> dict:
        return {
            "kind": "pillar",
            "version": 1,
            "s": self.s,
            "ell": self.ell,
            "cycle1": list(self.cycle1.vertices),
            "cycle2": list(self.cycle2.vertices),
            "paths": [list(p.vertices) for p in self.paths],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Pillar":
        try:
            return cls(
                int(data["s"]),
                int(data["ell"]),
                Cycle(tuple(int(v) for v in data["cycle1"])),
                Cycle(tuple(int(v) for v in data["cycle2"])),
                tuple(Path(tuple(int(v) for v in p)) for p in data["paths"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed pillar certificate: {exc}")


def _is_rotation_or_reflection(seq: list[int], ref: list[int]) -> bool:
    n = len(ref)
    if len(seq) != n:
        return False
    for rev in (ref, ref[::-1]):
        for r in range(n):
            if seq == rev[r:] + rev[:r]:
                return True
    return False


def verify_pillar(g: Graph, p: Pillar) -> ValidityReport:
    """Check every pillar clause; the in-order matching accepts any
    rotation or reflection of the second cycle's indexing."""
    rep = ValidityReport()
    ids = set(p.cycle1.vertices) | set(p.cycle2.vertices)
    for q in p.paths:
        ids |= q.vertex_set()
    if any(not (0 <= v < g.n) for v in ids):
        rep.add("ids-in-range", "vertex id out of range")
        return rep
    if len(p.cycle1.vertices) != p.s or len(p.cycle2.vertices) != p.s:
        rep.add("cycles-equal-length",
                f"cycle lengths {len(p.cycle1.vertices)}, {len(p.cycle2.vertices)} != s = {p.s}")
    for msg in p.cycle1.failures(g):
        rep.add("cycle1-valid", msg)
    for msg in p.cycle2.failures(g):
        rep.add("cycle2-valid", msg)
    c1 = set(p.cycle1.vertices)
    c2 = set(p.cycle2.vertices)
    if c1 & c2:
        rep.add("cycles-disjoint", f"cycles share {sorted(c1 & c2)[:3]}")
    if len(p.paths) != p.s:
        rep.add("path-count", f"{len(p.paths)} paths for s = {p.s}")
        return rep
    for i, q in enumerate(p.paths):
        for msg in q.failures(g):
            rep.add("path-valid", f"path {i}: {msg}")
        if q.length != p.ell:
            rep.add("path-length-uniform", f"path {i} has length {q.length} != ell = {p.ell}")
    ends2 = []
    for i, q in enumerate(p.paths):
        v = p.cycle1.vertices[i]
        if q.vertices[0] == v:
            w = q.vertices[-1]
        elif q.vertices[-1] == v:
            w = q.vertices[0]
        else:
            rep.add("path-endpoint-cycle1", f"path {i} misses cycle1 vertex {v}")
            cands = [e for e in (q.vertices[0], q.vertices[-1]) if e in c2]
            w = cands[0] if cands else q.vertices[-1]
        ends2.append(w)
    if set(ends2) != c2 or len(ends2) != len(set(ends2)):
        rep.add("matching-in-order", "cycle2 endpoints do not cover the second cycle exactly")
    elif not _is_rotation_or_reflection(ends2, list(p.cycle2.vertices)):
        rep.add("matching-in-order",
                "cycle2 endpoints are out of cyclic order (no rotation/reflection matches)")
    seen: dict[int, int] = {}
    for i, q in enumerate(p.paths):
        for v in q.vertices:
            if v in seen:
                rep.add("paths-disjoint", f"paths {seen[v]} and {i} share vertex {v}")
                break
        for v in q.vertices:
            seen.setdefault(v, i)
        bad = set(q.interior()) & (c1 | c2)
        if bad:
            rep.add("paths-internal-avoid-cycles",
                    f"path {i} interior meets a cycle at {sorted(bad)[:3]}")
    return rep


# -- exact-length connection -------------------------------------------


@dataclass(frozen=True)
class Detour:
    """An even cycle hung on one core edge: the edge's endpoints plus an
    alternative odd-length route between them through otherwise unused
    vertices.  Splicing it in lengthens the core by a positive even
    increment."""

    entry: int
    exit: int
    alternative: Path  # entry -> exit, interior disjoint from everything else

    @property
    def increment(self) -> int:
        return self.alternative.length - 1

    def failures(self, g: Graph) -> list[str]:
        out = self.alternative.failures(g)
        if self.alternative.ends != (self.entry, self.exit):
            out.append("alternative does not join entry to exit")
        if not g.has_edge(self.entry, self.exit):
            out.append("entry-exit edge missing")
        if self.increment <= 0 or self.increment % 2 != 0:
            out.append(f"increment {self.increment} not even positive")
        return out


@dataclass(frozen=True)
class Adjuster:
    """A core path plus disjoint even-cycle detours; splicing any subset of
    detours realizes core length + that subset's increment sum."""

    core: Path
    detours: tuple[Detour, ...]

    def failures(self, g: Graph) -> list[str]:
        out = self.core.failures(g)
        core_set = self.core.vertex_set()
        used: set[int] = set()
        edges = set(zip(self.core.vertices, self.core.vertices[1:]))
        for i, det in enumerate(self.detours):
            out.extend(f"detour {i}: {m}" for m in det.failures(g))
            if (det.entry, det.exit) not in edges and (det.exit, det.entry) not in edges:
                out.append(f"detour {i} not attached to a core edge")
            inner = set(det.alternative.interior())
            if inner & core_set:
                out.append(f"detour {i} interior meets the core")
            if inner & used:
                out.append(f"detour {i} interior meets another detour")
            used |= inner
        return out

    def realizable_lengths(self) -> set[int]:
        sums = {0}
        for det in self.detours:
            sums |= {s + det.increment for s in sums}
        return {self.core.length + s for s in sums}

    def realize(self, ell: int) -> Path:
        """Splice a subset of detours so the result has length exactly ell."""
        target = ell - self.core.length
        chosen = _subset_sum(
            [det.increment for det in self.detours], target)
        if chosen is None:
            raise LengthNotRealizedError(ell, _nearest_sums(
                self.core.length, [d.increment for d in self.detours], ell))
        by_edge = {}
        for idx in chosen:
            det = self.detours[idx]
            by_edge[frozenset((det.entry, det.exit))] = det
        out = [self.core.vertices[0]]
        for a, b in zip(self.core.vertices, self.core.vertices[1:]):
            det = by_edge.get(frozenset((a, b)))
            if det is None:
                out.append(b)
            else:
                alt = det.alternative.vertices
                if alt[0] != a:
                    alt = alt[::-1]
                out.extend(alt[1:])
        return Path(tuple(out))


def _subset_sum(values: list[int], target: int) -> list[int] | None:
    """Indices of a subset summing exactly to target (None if impossible)."""
    if target < 0:
        return None
    reachable = [1] + [0] * len(values)  # bitmask per prefix
    for i, v in enumerate(values):
        reachable[i + 1] = reachable[i] | (reachable[i] << v)
    if not (reachable[len(values)] >> target) & 1:
        return None
    chosen = []
    rem = target
    for i in range(len(values), 0, -1):
        if (reachable[i - 1] >> rem) & 1:
            continue
        chosen.append(i - 1)
        rem -= values[i - 1]
    return chosen[::-1]


def _nearest_sums(base: int, values: list[int], ell: int) -> list[int]:
    sums = {0}
    for v in values:
        sums |= {s + v for s in sums}
    lengths = sorted(base + s for s in sums)
    below = [x for x in lengths if x <= ell]
    above = [x for x in lengths if x > ell]
    out = []
    if below:
        out.append(below[-1])
    if above:
        out.append(above[0])
    return out


def _exact_fixed_path(g: Graph, v1: int, v2: int, ell: int, avoid: frozenset[int],
                      node_budget: int = 2_000_000) -> tuple[Path | None, bool]:
    """Complete DFS for a simple v1,v2-path of length exactly ell in the
    graph minus ``avoid``.  Pruned by a distance table and, on bipartite
    graphs, by walk parity (both are necessary conditions, so the search
    stays complete).  Second return value reports completeness: a blown
    node budget gives (None, False)."""
    if v1 in avoid or v2 in avoid:
        return None, True
    if ell > g.n - 1:
        return None, True  # a simple path has at most n-1 edges
    dist2 = distances_from(g, [v2], avoid)
    if v1 not in dist2 or dist2[v1] > ell:
        return None, True
    bip = g.side is not None
    stack = [v1]
    on_stack = {v1}
    nodes = 0

    def rec(x: int, remaining: int) -> Path | None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            return None
        if remaining == 0:
            return Path(tuple(stack)) if x == v2 else None
        for w in g.neighbors(x):
            if w in on_stack or w in avoid:
                continue
            d = dist2.get(w)
            if d is None or d > remaining - 1:
                continue
            if bip and (remaining - 1 - d) % 2 != 0:
                continue
            if w == v2 and remaining != 1:
                continue  # simple path: v2 may appear only as the last vertex
            stack.append(w)
            on_stack.add(w)
            hit = rec(w, remaining - 1)
            if hit is not None:
                return hit
            stack.pop()
            on_stack.discard(w)
        return None

    if ell == 0:
        return (Path((v1,)), True) if v1 == v2 else (None, True)
    found = rec(v1, ell)
    return found, nodes <= node_budget


def _chain_within(g: Graph, members: frozenset[int], a: int, b: int) -> Path | None:
    """Shortest a,b-path staying inside a vertex set."""
    if a == b:
        return Path((a,))
    outside = frozenset(range(g.n)) - members
    return shortest_set_path(g, [a], [b], outside - {a, b})


def _base_path(g: Graph, f1: Expansion, f2: Expansion, avoid: frozenset[int],
               params) -> Path:
    mid = connect_short(g, f1.members, f2.members, avoid, params)
    a1, a2 = mid.vertices[0], mid.vertices[-1]
    if mid.vertices[0] in f2.members:
        a1, a2 = a2, a1
        mid = Path(mid.vertices[::-1])
    c1 = _chain_within(g, f1.members, f1.center, a1)
    c2 = _chain_within(g, f2.members, a2, f2.center)
    if c1 is None or c2 is None:
        raise PillarkitError("internal: expansion not connected to its center")
    return Path(c1.vertices + mid.vertices[1:] + c2.vertices[1:])


def _harvest_detours(g: Graph, core: Path, avoid: frozenset[int], need: int) -> list[Detour]:
    """Hang at most one even-cycle detour on each core edge, greedily along
    the path, using only vertices free of the core, the avoid set and
    earlier detours.  Stops once the collected increments can cover
    ``need`` by a safe margin."""
    detours: list[Detour] = []
    blocked = set(avoid) | core.vertex_set()
    total = 0
    for a, b in zip(core.vertices, core.vertices[1:]):
        if total >= 2 * max(need, 0) + 2:
            break
        cap = need if need > 0 else 2 * len(core.vertices)
        alt = _alt_route(g, a, b, blocked, cap + 1)
        if alt is None:
            continue
        det = Detour(a, b, alt)
        if det.increment <= 0 or det.increment % 2 != 0:
            continue
        detours.append(det)
        blocked |= set(alt.interior())
        total += det.increment
    return detours


def _alt_route(g: Graph, a: int, b: int, blocked: set[int], max_len: int) -> Path | None:
    """Shortest a,b-path of length >= 2 with free interior (None if over
    max_len)."""
    dist = {a: 0}
    parent = {a: -1}
    queue = [a]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        if dist[u] + 1 > max_len:
            break
        for w in g.neighbors(u):
            if w == b:
                if u == a:
                    continue  # that is the core edge itself
                chain = [b, u]
                while parent[chain[-1]] != -1:
                    chain.append(parent[chain[-1]])
                return Path(tuple(chain[::-1]))
            if w not in dist and w not in blocked:
                dist[w] = dist[u] + 1
                parent[w] = u
                queue.append(w)
    return None


def connect_fixed_length(g: Graph, f1: Expansion, f2: Expansion, ell: int,
                         avoid: frozenset[int] | set[int], config: RunConfig) -> Path:
    """A path of exactly length ell between the two expansion centers,
    avoiding the given set.

    Strategy ladder: complete DFS when the graph is small enough, else a
    base path through the expansions with even-cycle detours spliced in
    to make up the length (subset sum over their increments).  Failures
    raise LengthNotRealizedError carrying the nearest achievable lengths.
    """
    rc = config.resolve(g.n)
    uset = frozenset(avoid)
    if f1.members & f2.members:
        raise PreconditionError("expansions must be vertex-disjoint")
    if (f1.members | f2.members) & uset:
        raise PreconditionError("expansions must avoid the forbidden set")
    if ell < 1:
        raise PreconditionError("target length must be >= 1")
    if not rc.ell_min <= ell <= rc.ell_max:
        raise PreconditionError(
            f"target length {ell} outside the window [{rc.ell_min}, {rc.ell_max}]")
    v1, v2 = f1.center, f2.center
    if g.side is not None and g.comp[v1] == g.comp[v2]:
        if ell % 2 != parity(g, v1, v2):
            raise PreconditionError(
                f"parity mismatch: every {v1},{v2}-path has length {parity(g, v1, v2)} mod 2")

    if g.n <= rc.connector_exact_cap:
        found, complete = _exact_fixed_path(g, v1, v2, ell, uset)
        if found is not None:
            return found
        if complete:
            raise LengthNotRealizedError(ell, _probe_exact(g, v1, v2, ell, uset, rc))
        # budget blown: fall through to the detour strategy

    base = _base_path(g, f1, f2, uset, rc.params)
    need = ell - base.length
    detours = _harvest_detours(g, base, uset, need)
    adj = Adjuster(base, tuple(detours))
    path = adj.realize(ell)  # raises with nearest achievable lengths
    bad = path.failures(g)
    if bad or path.ends not in ((v1, v2), (v2, v1)):
        raise PillarkitError(f"internal: spliced path invalid ({bad})")
    return path


def _probe_exact(g: Graph, v1: int, v2: int, ell: int, uset: frozenset[int],
                 rc: ResolvedConfig, tries: int = 6) -> list[int]:
    step = 2 if g.side is not None else 1
    nearest = []
    for delta in range(step, step * (tries + 1), step):
        for cand in (ell - delta, ell + delta):
            if cand < 1 or cand > rc.ell_max:
                continue
            hit, complete = _exact_fixed_path(g, v1, v2, cand, uset)
            if hit is not None:
                nearest.append(cand)
        if nearest:
            break
    return sorted(nearest)


# -- linking two krakens ------------------------------------------------


def link_krakens(g: Graph, ka: Kraken, kb: Kraken, ell: int,
                 high_degree: frozenset[int] | set[int],
                 config: RunConfig) -> list[Path]:
    """Join matching cycle vertices of two disjoint krakens by disjoint
    paths of the same exact length.

    Worked one index at a time; each side's leg is turned into an
    expansion of its cycle vertex by one of three routes: the leg end is
    already high-degree (use its neighborhood), the grown leg ball stays
    clear of high-degree vertices (use the ball), or the ball touches one
    (walk to it and use its neighborhood).  The expansion is then trimmed
    clear of everything still needed and handed to the exact-length
    connector.  Failures carry the index, side, and case.
    """
    rc = config.resolve(g.n)
    high = frozenset(high_degree)
    s = ka.k
    if kb.k != s:
        raise PreconditionError(f"cycle lengths differ: {s} vs {kb.k}")
    if ka.vertex_set() & kb.vertex_set():
        raise PreconditionError("krakens are not disjoint")
    for name, kr in (("first", ka), ("second", kb)):
        rep = verify_kraken(g, kr)
        if not rep.valid:
            raise PreconditionError(f"{name} kraken invalid: {rep}")
        for j, leg in enumerate(kr.legs):
            if kr.ends[j] not in high and leg.members & high:
                raise PreconditionError(
                    f"{name} kraken leg {j} straddles the high-degree set")
    v1a, v1b = ka.cycle.vertices[0], kb.cycle.vertices[0]
    if g.side is None:
        raise PreconditionError("linking needs a bipartite host graph")
    if g.comp[v1a] != g.comp[v1b]:
        raise PreconditionError("krakens lie in different components")
    if ell % 2 != parity(g, v1a, v1b):
        raise PreconditionError("target length has the wrong parity")

    low_legs = [leg.members for kr in (ka, kb) for j, leg in enumerate(kr.legs)
                if kr.ends[j] not in high]
    min_sep = None
    for i in range(len(low_legs)):
        for j in range(i + 1, len(low_legs)):
            d = set_distance(g, low_legs[i], low_legs[j], avoid=high, cap=rc.separation)
            if d is not None and (min_sep is None or d < min_sep):
                min_sep = d
    if min_sep is not None and min_sep < rc.separation:
        raise PreconditionError(
            f"low-degree legs only {min_sep} apart (need {rc.separation})")

    cycles = set(ka.cycle.vertices) | set(kb.cycle.vertices)
    z_base = set(cycles)
    for kr in (ka, kb):
        for p in kr.paths:
            z_base |= p.vertex_set()
    built: list[Path] = []
    for j in range(s):
        z = frozenset(z_base | {v for q in built for v in q.vertices})
        zhat = {v for q in built for v in q.vertices}
        for i in range(j + 1, s):
            for kr in (ka, kb):
                zhat |= kr.legs[i].members
                zhat |= kr.paths[i].vertex_set()
        unused_low = set()
        for i in range(j + 1, s):
            for kr in (ka, kb):
                if kr.ends[i] not in high:
                    unused_low |= kr.legs[i].members
        expansions = []
        for side_name, kr in (("first", ka), ("second", kb)):
            exp, case = _side_expansion(g, kr, j, z, high, rc, side_name,
                                        frozenset(unused_low))
            conn_avoid = frozenset((zhat | (cycles - {ka.cycle.vertices[j], kb.cycle.vertices[j]}))
                                   | (expansions[0].members if expansions else set()))
            trimmed = restrict_and_trim(g, exp, rc.link_expansion_size, conn_avoid)
            if trimmed is None:
                raise StageError(
                    "link-trim",
                    f"index {j + 1}, {side_name} side, case {case}: expansion too small "
                    f"after clearing reserved vertices",
                    {"index": j, "side": side_name, "case": case,
                     "available": len(exp.members - conn_avoid)})
            expansions.append(trimmed)
        conn_avoid = frozenset(zhat | (cycles - {ka.cycle.vertices[j], kb.cycle.vertices[j]}))
        try:
            q = connect_fixed_length(g, expansions[0], expansions[1], ell, conn_avoid, config)
        except (LengthNotRealizedError, NoPathError, PreconditionError) as exc:
            raise StageError("link-connect", f"index {j + 1}: {exc}",
                             {"index": j, "nearest": getattr(exc, "nearest", None)})
        built.append(q)

    _assert_link_output(g, ka, kb, built)
    return built


def _side_expansion(g: Graph, kr: Kraken, j: int, z: frozenset[int],
                    high: frozenset[int], rc: ResolvedConfig, side_name: str,
                    unused_low: frozenset[int]) -> tuple[Expansion, int]:
    """Case analysis turning leg j into an expansion of its cycle vertex."""
    center = kr.cycle.vertices[j]
    u = kr.ends[j]
    pathv = kr.paths[j].vertex_set()
    if u in high:
        members = frozenset(g.neighbors(u)) | pathv | {u}
        return Expansion(center, members, len(pathv) + 1), 1
    seeds = kr.legs[j].members - z
    grown = frozenset(ball(g, seeds, rc.ell0, z - kr.legs[j].members)) | kr.legs[j].members
    touched = grown & high
    if not touched:
        others = unused_low - kr.legs[j].members
        if others:
            sep = set_distance(g, kr.legs[j].members, others, avoid=high, cap=rc.ell0)
            if sep is None and grown & others:
                # separation hypothesis held with room to spare, so the
                # ball cannot have reached a still-unused low-degree leg
                raise PillarkitError(
                    "internal: leg ball reached a separated unused leg")
        members = grown | pathv
        return Expansion(center, members, rc.ell0 + kr.legs[j].radius + len(pathv)), 2
    route = shortest_set_path(g, [u], touched,
                              frozenset(range(g.n)) - grown - {u} - touched)
    if route is None:
        raise StageError("link-route",
                         f"{side_name} side, index {j + 1}: high-degree vertex "
                         "unreachable inside the grown ball",
                         {"index": j, "side": side_name, "case": 3})
    w = route.vertices[-1]
    members = route.vertex_set() | frozenset(g.neighbors(w)) | pathv
    return Expansion(center, members, len(route.vertices) + len(pathv) + 1), 3


def _assert_link_output(g: Graph, ka: Kraken, kb: Kraken, built: list[Path]) -> None:
    cycles = set(ka.cycle.vertices) | set(kb.cycle.vertices)
    seen: set[int] = set()
    for j, q in enumerate(built):
        if set(q.interior()) & cycles:
            raise PillarkitError(f"internal: link path {j} runs through a cycle")
        if seen & q.vertex_set():
            raise PillarkitError(f"internal: link path {j} overlaps an earlier one")
        seen |= q.vertex_set()
        if q.failures(g):
            raise PillarkitError(f"internal: link path {j} invalid in the host graph")


# -- end-to-end driver --------------------------------------------------


_CYCLE1_COORDS = (0, 1, 3, 2)  # one cube face in cyclic order; +4 is the other


def pillar_from_q3(cert: Q3Certificate) -> Pillar:
    vs = cert.vertices
    c1 = tuple(vs[c] for c in _CYCLE1_COORDS)
    c2 = tuple(vs[c | 4] for c in _CYCLE1_COORDS)
    paths = tuple(Path((a, b)) for a, b in zip(c1, c2))
    return Pillar(4, 1, Cycle(c1), Cycle(c2), paths)


def _rotate_kraken(kr: Kraken, shift: int, reflect: bool) -> Kraken:
    idx = list(range(kr.k))
    idx = idx[shift:] + idx[:shift]
    if reflect:
        idx = [idx[0]] + idx[1:][::-1]
    return Kraken(
        Cycle(tuple(kr.cycle.vertices[i] for i in idx)),
        tuple(kr.ends[i] for i in idx),
        tuple(kr.legs[i] for i in idx),
        tuple(kr.paths[i] for i in idx),
        kr.s, kr.t)


def _translate_pillar(p: Pillar, labels: tuple[int, ...] | None) -> Pillar:
    if labels is None:
        return p
    remap = lambda v: labels[v]
    return Pillar(
        p.s, p.ell,
        Cycle(tuple(remap(v) for v in p.cycle1.vertices)),
        Cycle(tuple(remap(v) for v in p.cycle2.vertices)),
        tuple(Path(tuple(remap(v) for v in q.vertices)) for q in p.paths))


def _child_seed(seed: int, tag: int) -> int:
    return (seed * 0x9E3779B97F4A7C15 + tag) & 0xFFFFFFFFFFFF


def find_pillar(g: Graph, config: RunConfig, seed: int = 0) -> Pillar:
    """The end-to-end driver.

    Pass to a well-expanding bipartite subgraph when the degree allows it
    (otherwise search the graph as-is); return a cube directly as the
    smallest pillar when one exists; else amass disjoint krakens until
    two share a cycle length and link them with equal-length paths,
    trying cycle alignments and lengths until one goes through.
    """
    if g.n == 0:
        raise PreconditionError("empty graph")
    rc = config.resolve(g.n)
    # pass to a bipartite expanding subgraph at the configured degree
    # target, or at the largest target the average degree supports
    h = None
    for target in sorted({rc.d_target, max(1, int(g.average_degree() // 8))},
                         reverse=True):
        try:
            h = largest_component(extract_expander(
                g, target, config.params, seed=_child_seed(seed, 0),
                trials=rc.expansion_trials, sample_cap=rc.expansion_sample_cap,
                workers=rc.workers))
            break
        except (PreconditionError, StageError):
            continue
    if h is None:
        h = largest_component(g)  # too sparse to pass to a denser subgraph

    if h.n <= rc.q3_cap:
        cube = find_q3_bruteforce(h, cap=rc.q3_cap)
    else:
        cube = find_q3_sampled(h, _child_seed(seed, 1), ball_cap=rc.q3_cap)
    if cube is not None:
        pillar = _translate_pillar(pillar_from_q3(cube), h.labels)
        rep = verify_pillar(g, pillar)
        if not rep.valid:
            raise PillarkitError(f"internal: cube pillar invalid ({rep})")
        return pillar

    forbidden: set[int] = set()
    found: list[Kraken] = []
    pair: tuple[Kraken, Kraken] | None = None
    for i in range(rc.max_krakens):
        kr = robust_kraken(h, frozenset(forbidden), config,
                           seed=_child_seed(seed, 2 + i), q3_free=True)
        mate = next((old for old in found if old.k == kr.k), None)
        if mate is not None:
            pair = (mate, kr)
            break
        found.append(kr)
        forbidden |= kr.vertex_set()
    if pair is None:
        raise StageError("pigeonhole",
                         f"no two of {len(found)} krakens share a cycle length",
                         {"lengths": sorted(k.k for k in found)})

    ka, kb = pair
    high = frozenset(v for v in range(h.n) if h.degree(v) >= rc.delta_threshold)
    last_error: Exception | None = None
    for reflect in (False, True):
        for shift in range(kb.k):
            aligned = _rotate_kraken(kb, shift, reflect)
            try:
                target = parity(h, ka.cycle.vertices[0], aligned.cycle.vertices[0])
            except PreconditionError as exc:
                raise StageError("link", f"parity unavailable: {exc}", {})
            ell = rc.pillar_ell_min
            if ell % 2 != target:
                ell += 1
            for _ in range(rc.link_retries):
                try:
                    paths = link_krakens(h, ka, aligned, ell, high, config)
                    pillar = Pillar(ka.k, ell, ka.cycle, aligned.cycle, tuple(paths))
                    rep = verify_pillar(h, pillar)
                    if not rep.valid:
                        raise PillarkitError(f"internal: linked pillar invalid ({rep})")
                    out = _translate_pillar(pillar, h.labels)
                    rep = verify_pillar(g, out)
                    if not rep.valid:
                        raise PillarkitError(f"internal: translated pillar invalid ({rep})")
                    return out
                except (StageError, LengthNotRealizedError, NoPathError) as exc:
                    last_error = exc
                    hint = None
                    if isinstance(exc, StageError):
                        nearest = exc.details.get("nearest")
                        if nearest:
                            cands = [x for x in nearest
                                     if x > ell and x % 2 == target and x <= rc.ell_max]
                            if cands:
                                hint = min(cands)
                    ell = hint if hint is not None else ell + 2
                    if ell > rc.ell_max:
                        break
    raise StageError("link", f"no alignment and length linked the krakens: {last_error}",
                     {"cycle_length": ka.k})
