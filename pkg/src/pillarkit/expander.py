"""Sublinear expansion: the rate function, expansion checking, and
extraction of a bipartite subgraph with a minimum-degree guarantee.

A graph is treated as expanding if every medium set X (k/2 <= |X| <= n/2)
keeps |N(X)| >= eps(|X|)*|X| even after an adversary deletes an edge set F
with e(F) <= d(G)*eps(|X|)*|X|.  Robust verification is co-NP-hard, so the
exact mode pairs the F-empty check with a greedy adversary that deletes
the cheapest external neighbors first; this limitation is recorded in the
report type.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import PreconditionError, StageError
from .graph import Graph, edge_subgraph, induced_subgraph

@dataclass(frozen=True)
class ExpanderParams:
    """Expansion parameters; k = eps2 * d drives all thresholds."""

    eps1: float
    eps2: float
    d: int

    def __post_init__(self):
        if not 0 < self.eps1 < 1:
            raise PreconditionError("need 0 < eps1 < 1")
        if not 0 < self.eps2 <= 0.2:
            raise PreconditionError("need 0 < eps2 <= 1/5")
        if self.d < 1:
            raise PreconditionError("need d >= 1")

    @property
    def k(self) -> float:
        return self.eps2 * self.d


def epsilon(x: float, params: ExpanderParams) -> float:
    """Expansion rate at set size x: 0 below k/5, else eps1/ln^2(15x/k).

    Natural logarithm throughout.  Nonincreasing for x >= k/2 while
    x*epsilon(x) is nondecreasing there.
    """
    if x < 0:
        raise PreconditionError("x must be nonnegative")
    k = params.k
    if x < k / 5:
        return 0.0
    return params.eps1 / math.log(15.0 * x / k) ** 2


@dataclass
class ExpansionReport:
    """Outcome of an expansion check.

    ``witness`` is a violating set X when one was found, together with
    the deleted edge set ``removed_edges`` (empty when X already fails
    with no deletions).  ``checked_mode`` records exact vs sampled and
    ``samples`` how many candidate sets were inspected.  The exact-mode
    adversary is the greedy one described in the module docstring, not a
    complete robust check.
    """

    checked_mode: str
    samples: int
    witness: frozenset[int] | None = None
    removed_edges: list[tuple[int, int]] | None = None
    params: ExpanderParams | None = None

    @property
    def clean(self) -> bool:
        return self.witness is None

    def to_json_dict(self) -> dict:
        out = {
            "kind": "expansion-report",
            "version": 1,
            "mode": self.checked_mode,
            "samples": self.samples,
            "clean": self.clean,
        }
        if self.params is not None:
            out["params"] = {"eps1": self.params.eps1, "eps2": self.params.eps2, "d": self.params.d}
        if self.witness is not None:
            out["witness"] = sorted(self.witness)
            out["removed_edges"] = [list(e) for e in (self.removed_edges or [])]
        return out


def _size_bounds(n: int, params: ExpanderParams) -> tuple[int, int]:
    lo = max(1, math.ceil(params.k / 2))
    hi = math.floor(n / 2)
    return lo, hi


def _violation(g: Graph, members: list[int],
               params: ExpanderParams) -> tuple[frozenset[int], list[tuple[int, int]]] | None:
    """Check one candidate X; return (X, F) on violation, else None.

    Tries F empty first, then greedily spends the deletion budget on the
    external neighbors with the fewest edges into X.
    """
    xset = set(members)
    counts: dict[int, int] = {}  # external neighbor -> number of edges into X
    for v in members:
        for w in g.neighbors(v):
            if w not in xset:
                counts[w] = counts.get(w, 0) + 1
    need = epsilon(len(members), params) * len(members)
    if len(counts) < need:
        return frozenset(members), []
    budget = g.average_degree() * need
    order = sorted((c, y) for y, c in counts.items())
    removed: list[tuple[int, int]] = []
    spent = 0
    remaining = len(counts)
    for cost, y in order:
        if spent + cost > budget:
            break
        spent += cost
        remaining -= 1
        removed.extend((min(u, y), max(u, y)) for u in g.neighbors(y) if u in xset)
        if remaining < need:
            return frozenset(members), removed
    return None


def check_expansion(g: Graph, params: ExpanderParams, mode: str = "exact", *,
                    seed: int = 0, trials: int = 500, exact_cap: int = 20,
                    sample_cap: int | None = None, workers: int = 1) -> ExpansionReport:
    """Search for a set violating the expansion condition.

    Exact mode enumerates every X with k/2 <= |X| <= n/2 (only allowed up
    to ``exact_cap`` vertices); sampled mode draws ``trials`` random
    connected sets as BFS prefixes of seeded random size.  The first
    violating X (by enumeration order / trial index) is reported.
    """
    if mode == "exact":
        return _check_exact(g, params, exact_cap)
    if mode == "sampled":
        return _check_sampled(g, params, seed, trials, sample_cap, workers)
    raise PreconditionError(f"unknown mode {mode!r}")


def _check_exact(g: Graph, params: ExpanderParams, exact_cap: int) -> ExpansionReport:
    from itertools import combinations

    if g.n > exact_cap:
        raise PreconditionError(
            f"exact mode capped at n <= {exact_cap} (got n={g.n}); use sampled mode")
    lo, hi = _size_bounds(g.n, params)
    count = 0
    for size in range(lo, hi + 1):
        for combo in combinations(range(g.n), size):
            count += 1
            hit = _violation(g, list(combo), params)
            if hit is not None:
                return ExpansionReport("exact", count, hit[0], hit[1], params)
    return ExpansionReport("exact", count, params=params)


def _sample_connected(g: Graph, rng: random.Random, size: int) -> list[int]:
    start = rng.randrange(g.n)
    out = [start]
    seen = {start}
    frontier = [start]
    while frontier and len(out) < size:
        u = frontier.pop(rng.randrange(len(frontier)))
        nbrs = [w for w in g.neighbors(u) if w not in seen]
        rng.shuffle(nbrs)
        for w in nbrs:
            if len(out) >= size:
                break
            seen.add(w)
            out.append(w)
            frontier.append(w)
    return out


def _check_sampled(g: Graph, params: ExpanderParams, seed: int, trials: int,
                   sample_cap: int | None, workers: int) -> ExpansionReport:
    if g.n == 0:
        return ExpansionReport("sampled", 0, params=params)
    lo, hi = _size_bounds(g.n, params)
    if sample_cap is not None:
        hi = min(hi, sample_cap)
    if hi < lo:
        return ExpansionReport("sampled", 0, params=params)

    def run_trial(t: int):
        rng = random.Random((seed * 0x9E3779B9 + t) & 0xFFFFFFFFFFFF)
        members = _sample_connected(g, rng, rng.randint(lo, hi))
        if len(members) < lo:
            return None
        return _violation(g, members, params)

    if workers > 1:
        # Deterministic reduce: first violation by trial index wins.
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_trial, range(trials)))
        for t, hit in enumerate(results):
            if hit is not None:
                return ExpansionReport("sampled", t + 1, hit[0], hit[1], params)
        return ExpansionReport("sampled", trials, params=params)

    for t in range(trials):
        hit = run_trial(t)
        if hit is not None:
            return ExpansionReport("sampled", t + 1, hit[0], hit[1], params)
    return ExpansionReport("sampled", trials, params=params)


# -- extraction --------------------------------------------------------


def greedy_max_cut_sides(g: Graph, order: list[int] | None = None) -> list[int]:
    """Greedy two-coloring in BFS order, each vertex opposite the majority
    of its placed neighbors.  Recovers a proper coloring on bipartite
    inputs and keeps at least half the edges in general."""
    side = [-1] * g.n
    if order is None:
        from collections import deque

        order = []
        seen = [False] * g.n
        for root in range(g.n):
            if seen[root]:
                continue
            seen[root] = True
            queue = deque([root])
            while queue:
                u = queue.popleft()
                order.append(u)
                for w in g.neighbors(u):
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
    for v in order:
        same0 = sum(1 for w in g.neighbors(v) if side[w] == 0)
        same1 = sum(1 for w in g.neighbors(v) if side[w] == 1)
        side[v] = 0 if same0 <= same1 else 1
    return side


def _peel(g: Graph, keep: set[int], d: int) -> set[int]:
    """Iteratively drop vertices with fewer than d neighbors inside keep."""
    deg = {v: sum(1 for w in g.neighbors(v) if w in keep) for v in keep}
    queue = [v for v, dv in deg.items() if dv < d]
    alive = set(keep)
    while queue:
        v = queue.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in g.neighbors(v):
            if w in alive:
                deg[w] -= 1
                if deg[w] < d:
                    queue.append(w)
    return alive


def extract_expander(g: Graph, d: int, params: ExpanderParams, *, seed: int = 0,
                     trials: int = 200, sample_cap: int | None = None,
                     max_rounds: int = 30, workers: int = 1) -> Graph:
    """Extract a bipartite subgraph H with min degree >= d that passes the
    sampled expansion check.

    Needs average degree at least 8d.  Bipartiteness comes from the
    stored two-coloring when the input is bipartite, else from a greedy
    max-cut (in-side edges dropped).  Then: peel low-degree vertices,
    run the sampled violation search, and on a violation recurse into
    the denser side of the witness cut until the check comes back clean.
    """
    if d < 1:
        raise PreconditionError("target degree must be >= 1")
    if g.average_degree() < 8 * d:
        raise PreconditionError(
            f"average degree {g.average_degree():.3f} below 8*d = {8 * d}")
    side = list(g.side) if g.side is not None else greedy_max_cut_sides(g)
    cross = [(u, v) for u, v in g.edges() if side[u] != side[v]]
    cut = edge_subgraph(g, cross)

    keep = set(range(cut.n))
    for round_no in range(max_rounds):
        keep = _peel(cut, keep, d)
        if len(keep) < max(2, d + 1):
            raise StageError("extract-peel", f"no expander found at d={d}",
                             {"survivors": len(keep)})
        keep_sorted = sorted(keep)
        h = induced_subgraph(cut, keep)
        report = check_expansion(h, params, "sampled", seed=seed + round_no,
                                 trials=trials, sample_cap=sample_cap, workers=workers)
        if report.clean:
            return h
        witness = {keep_sorted[v] for v in report.witness}  # back to cut ids
        rest = keep - witness
        if not rest or not witness:
            raise StageError("extract-split", f"degenerate witness split at d={d}",
                             {"witness": len(witness), "rest": len(rest)})
        dens_w = _avg_degree_within(cut, witness)
        dens_r = _avg_degree_within(cut, rest)
        keep = witness if dens_w >= dens_r else rest
    raise StageError("extract-rounds", f"no clean subgraph within {max_rounds} rounds",
                     {"survivors": len(keep)})


def _avg_degree_within(g: Graph, members: set[int]) -> float:
    if not members:
        return 0.0
    inner = sum(1 for v in members for w in g.neighbors(v) if w in members)
    return inner / len(members)
