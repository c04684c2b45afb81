"""Maximum weighted independent set solvers.

Two solvers share one contract:

* :func:`mwis_exact` is a branch-and-bound oracle for any graph up to a
  size cap;
* :func:`mwis_clawfree` runs in polynomial time on claw-free graphs by
  growing the heaviest independent set of each size through maximum-gain
  augmenting paths.

Both return the lexicographically smallest member list among all optimal
sets, so on claw-free input they agree on the set as well as the weight.

Notes
-----
Weights are converted to exact rationals before solving (floats keep
their exact binary value), so optimality and tie-breaking never depend on
rounding.

Augmenting paths.  Let ``S`` be a heaviest independent set of size
``k``.  Call the members of ``S`` black and the other vertices white.  In
a claw-free graph every white vertex has at most two black neighbours,
and a heaviest set of size ``k + 1`` is obtained by exchanging ``S``
along one alternating path ``w0 b1 w1 ... bm wm`` of maximum gain
(total white weight minus total black weight):

* the end whites ``w0`` and ``wm`` have exactly one black neighbour
  each (or, for ``m = 0``, a single white has none);
* every inner white has exactly two black neighbours;
* two whites that are consecutive around a black must be nonadjacent
  and lead to different blacks.  Claw-freeness makes whites with
  disjoint black pairs automatically nonadjacent, so these local
  conditions are the only ones.

For a fixed pair of end whites the best path is found with a maximum
weight perfect matching on an auxiliary graph.  Every black gets two
*hub* nodes joined by an edge (meaning "not on the path") and every inner
white gets a *port* node at each of its two blacks, the two ports joined
by an edge (meaning "not on the path").  A port matched to a hub puts
its white on the path; a black with both hubs matched to ports is an
inner black of the path.  End blacks have a single hub that must be
matched.  Around each black the whites are split into two *wings* so
that valid consecutive pairs are exactly the cross-wing pairs of
different blacks; ports connect only to the hub of their wing.  When no
such split exists the black falls back to hubs that accept every port.

A perfect matching decomposes into the path plus cycles.  Cycles whose
transitions are all valid are alternating cycles of ``S`` and cannot have
positive gain because ``S`` is heaviest for its size, so they never
inflate the objective.  A matching that uses an invalid pair ``(p, q)``
at some black only bounds the true optimum from above; the search then
branches into two subproblems, one without ``p`` and one without ``q``,
and keeps the best valid path found, best-first, until the bound no
longer beats it.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx

from .conflict import ConflictGraph
from .errors import CapExceededError, NotClawFreeError
from .graphcore import find_claw, is_independent

DEFAULT_EXACT_CAP = 28


@dataclass(frozen=True)
class MwisResult:
    """Solver output.

    Attributes
    ----------
    members : frozenset of int
        The independent set (vertex indices).
    weight : Fraction or float
        Sum of member weights; a float when any input weight was a float.
    method : str
        ``"exact"`` or ``"clawfree"``.
    seconds : float
        Wall-clock solve time.
    stats : dict
        Solver counters (matchings solved, branch steps, ...).
    """

    members: frozenset[int]
    weight: Fraction | float
    method: str
    seconds: float = 0.0
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def set(self) -> frozenset[int]:
        return self.members

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


def _exact_weights(g: ConflictGraph) -> tuple[list[Fraction], bool]:
    floats = any(isinstance(w, float) for w in g.weights)
    return [Fraction(w) for w in g.weights], floats


def _report_weight(total: Fraction, floats: bool) -> Fraction | float:
    return float(total) if floats else total


# ------------------------------------------------------------------ exact
def mwis_exact(g: ConflictGraph, cap: int = DEFAULT_EXACT_CAP) -> MwisResult:
    """Exact MWIS by depth-first branch and bound.

    Branching takes the lowest-index candidate vertex, including it first,
    so optimal sets are met in lexicographic order of their sorted member
    lists and the first optimum found is the lexicographically smallest.
    The bound adds, over a greedy clique cover of the candidates, the
    heaviest weight of each clique.

    Raises
    ------
    CapExceededError
        ``g`` has more than ``cap`` vertices.
    """
    if g.n > cap:
        raise CapExceededError(f"exact MWIS is capped at {cap} vertices (graph has {g.n})")
    start = time.perf_counter()
    w, floats = _exact_weights(g)
    n = g.n
    nbr = [sum(1 << u for u in g.adjacency[v]) for v in range(n)]
    best_w = Fraction(-1)
    best: tuple[int, ...] = ()
    nodes = 0

    def bound(cand: int) -> Fraction:
        total = Fraction(0)
        rest = cand
        while rest:
            v = (rest & -rest).bit_length() - 1
            clique_w = w[v]
            members = 1 << v
            pool = rest & nbr[v]
            while pool:
                u = (pool & -pool).bit_length() - 1
                pool &= pool - 1
                if all(nbr[u] >> m & 1 for m in _bits(members)):
                    members |= 1 << u
                    clique_w = max(clique_w, w[u])
            total += clique_w
            rest &= ~members
        return total

    def rec(cand: int, cur_w: Fraction, cur: list[int]) -> None:
        nonlocal best_w, best, nodes
        nodes += 1
        if cur_w > best_w:
            best_w, best = cur_w, tuple(cur)
        if not cand or cur_w + bound(cand) <= best_w:
            return
        v = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << v)
        cur.append(v)
        rec(rest & ~nbr[v], cur_w + w[v], cur)
        cur.pop()
        if rest & nbr[v]:
            rec(rest, cur_w, cur)

    rec((1 << n) - 1, Fraction(0), [])
    return MwisResult(
        frozenset(best),
        _report_weight(best_w, floats),
        "exact",
        time.perf_counter() - start,
        {"nodes": nodes},
    )


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -------------------------------------------------------------- claw-free
class _Augmenter:
    """Heaviest independent sets of growing size on a claw-free graph."""

    def __init__(self, adj: Sequence[frozenset[int]], w: Sequence[Fraction]) -> None:
        self.adj = adj
        self.w = w
        self.stats = {"rounds": 0, "matchings": 0, "branches": 0}

    # ---------------------------------------------------------- outer loop
    def solve(self, vertices: Sequence[int]) -> tuple[Fraction, frozenset[int]]:
        """Optimum over the subgraph induced by ``vertices``."""
        live = frozenset(vertices)
        S: set[int] = set()
        best_w, best_S = Fraction(0), frozenset()
        while True:
            path = self._best_path(live, S)
            if path is None:
                break
            whites, blacks = path
            S = (S - set(blacks)) | set(whites)
            self.stats["rounds"] += 1
            total = sum((self.w[v] for v in S), Fraction(0))
            if total > best_w:
                best_w, best_S = total, frozenset(S)
        return best_w, best_S

    def _best_path(self, live: frozenset[int], S: set[int]):
        adj, w = self.adj, self.w
        black_nb = {x: frozenset(u for u in adj[x] if u in S) for x in live if x not in S}
        best = None  # (gain, whites, blacks)

        def offer(gain, whites, blacks):
            nonlocal best
            if best is None or gain > best[0]:
                best = (gain, tuple(whites), tuple(blacks))

        for x in sorted(black_nb):
            if not black_nb[x]:
                offer(w[x], [x], [])
        single: dict[int, list[int]] = {}
        for x in sorted(black_nb):
            if len(black_nb[x]) == 1:
                single.setdefault(next(iter(black_nb[x])), []).append(x)
        for b in sorted(single):
            for x, y in itertools.combinations(single[b], 2):
                if y not in adj[x]:
                    offer(w[x] + w[y] - w[b], [x, y], [b])
        inner = sorted(x for x in black_nb if len(black_nb[x]) == 2)
        ends = sorted(x for x in black_nb if len(black_nb[x]) == 1)
        for w0, wk in itertools.combinations(ends, 2):
            (b1,), (bk,) = black_nb[w0], black_nb[wk]
            if b1 == bk or wk in adj[w0]:
                continue
            cands = frozenset(x for x in inner if w0 not in adj[x] and wk not in adj[x])
            found = self._best_between(black_nb, w0, wk, b1, bk, cands, None if best is None else best[0])
            if found is not None:
                offer(*found)
        if best is None:
            return None
        return best[1], best[2]

    # ------------------------------------------------------ fixed endpoints
    def _best_between(self, black_nb, w0, wk, b1, bk, cands, floor):
        """Best path ``w0 b1 ... bk wk`` whose gain beats ``floor``."""
        adj, w = self.adj, self.w
        base = w[w0] + w[wk]
        heap: list = []
        tick = itertools.count()

        def push(whites: frozenset[int]) -> None:
            solved = self._relaxation(black_nb, b1, bk, whites)
            if solved is not None:
                value, used, kept = solved
                heapq.heappush(heap, (-(value + base), next(tick), used, kept))

        push(cands)
        best = None
        while heap:
            neg, _, used, kept = heapq.heappop(heap)
            value = -neg
            if floor is not None and value <= floor:
                break
            if best is not None and value <= best[0]:
                break
            bad = None
            for b in sorted(used):
                pair = used[b]
                if len(pair) == 2:
                    p, q = pair
                    if q in adj[p] or black_nb[p] == black_nb[q]:
                        bad = (p, q)
                        break
            path = self._trace(used, black_nb, w0, wk, b1, bk)
            if path is not None:
                whites, blacks = path
                gain = sum((w[x] for x in whites), Fraction(0)) - sum((w[b] for b in blacks), Fraction(0))
                if best is None or gain > best[0]:
                    best = (gain, whites, blacks)
            if bad is None:
                continue
            self.stats["branches"] += 1
            for x in bad:
                push(kept - {x})
        return best

    def _trace(self, used, black_nb, w0, wk, b1, bk):
        """Follow the path component from ``b1``; ``None`` if it is invalid."""
        adj = self.adj
        whites, blacks = [w0], [b1]
        cur, prev = b1, w0
        while cur != bk:
            nxt = [x for x in used.get(cur, ()) if x != prev]
            if len(nxt) != 1:
                return None
            x = nxt[0]
            whites.append(x)
            (cur,) = black_nb[x] - {cur}
            if cur in blacks:
                return None
            blacks.append(cur)
            prev = x
        whites.append(wk)
        for a, b in itertools.combinations(whites, 2):
            if b in adj[a]:
                return None
        return whites, blacks

    def _relaxation(self, black_nb, b1, bk, whites: frozenset[int]):
        """Solve the matching relaxation; ``None`` when no path exists."""
        adj, w = self.adj, self.w
        whites = self._prune(black_nb, b1, bk, whites)
        at: dict[int, list[int]] = {}
        for x in sorted(whites):
            for b in sorted(black_nb[x]):
                at.setdefault(b, []).append(x)
        if b1 not in at or bk not in at:
            return None
        edges: list[tuple[tuple, tuple, Fraction]] = []
        for b in sorted(at):
            ws = at[b]
            if b in (b1, bk):
                hub_of = {x: (("h", b, 0),) for x in ws}
                cost = w[b]
            else:
                edges.append((("h", b, 0), ("h", b, 1), Fraction(0)))
                side = _wings(ws, adj, black_nb)
                if side is None:
                    hub_of = {x: (("h", b, 0), ("h", b, 1)) for x in ws}
                else:
                    hub_of = {x: (("h", b, side[x]),) for x in ws}
                cost = w[b] / 2
            for x in ws:
                gain = w[x] / 2 - cost
                for hub in hub_of[x]:
                    edges.append((("p", x, b), hub, gain))
        for x in sorted(whites):
            b, c = sorted(black_nb[x])
            edges.append((("p", x, b), ("p", x, c), Fraction(0)))
        den = 1
        for *_, c in edges:
            den = den * c.denominator // math.gcd(den, c.denominator)
        shift = sum(abs(c) for *_, c in edges) * den + 1
        H = nx.Graph()
        for a, b, c in edges:
            H.add_edge(a, b, weight=int(c * den + shift))
        self.stats["matchings"] += 1
        matching = nx.max_weight_matching(H, maxcardinality=True)
        if 2 * len(matching) != H.number_of_nodes():
            return None
        value = Fraction(0)
        used: dict[int, list[int]] = {}
        for a, b in matching:
            value += Fraction(H[a][b]["weight"] - shift, den)
            for p, q in ((a, b), (b, a)):
                if p[0] == "p" and q[0] == "h":
                    used.setdefault(q[1], []).append(p[1])
        return value, {b: sorted(v) for b, v in used.items()}, whites

    def _prune(self, black_nb, b1, bk, whites: frozenset[int]) -> frozenset[int]:
        """Drop whites that have no valid partner at one of their inner blacks."""
        adj = self.adj
        keep = set(whites)
        while True:
            at: dict[int, list[int]] = {}
            for x in keep:
                for b in black_nb[x]:
                    at.setdefault(b, []).append(x)
            drop = set()
            for x in keep:
                for b in black_nb[x]:
                    if b in (b1, bk):
                        continue
                    if not any(y != x and black_nb[y] != black_nb[x] and y not in adj[x] for y in at[b]):
                        drop.add(x)
                        break
            if not drop:
                return frozenset(keep)
            keep -= drop


def _wings(ws: Sequence[int], adj, black_nb) -> dict[int, int] | None:
    """Two-colour the whites at a black so valid pairs are the cross pairs.

    Pairs leading to the same other black are unconstrained (they can never
    be consecutive on a path).  Returns ``None`` when the constraints are
    inconsistent.
    """
    parent = {x: x for x in ws}
    parity = {x: 0 for x in ws}

    def find(x: int) -> tuple[int, int]:
        acc = 0
        while parent[x] != x:
            acc ^= parity[x]
            x = parent[x]
        return x, acc

    for x, y in itertools.combinations(ws, 2):
        if black_nb[x] == black_nb[y]:
            continue
        want = 0 if y in adj[x] else 1
        rx, px = find(x)
        ry, py = find(y)
        if rx == ry:
            if px ^ py != want:
                return None
        else:
            parent[rx] = ry
            parity[rx] = px ^ py ^ want
    return {x: find(x)[1] for x in ws}


def _clawfree_optimum(aug: _Augmenter, vertices: Sequence[int]) -> Fraction:
    """Optimum weight, summed over connected components."""
    live = set(vertices)
    total = Fraction(0)
    for comp in _components(aug.adj, live):
        total += aug.solve(comp)[0]
    return total


def _components(adj, live: set[int]) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for s in sorted(live):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u in live and u not in seen:
                    seen.add(u)
                    stack.append(u)
        out.append(sorted(comp))
    return out


def mwis_clawfree(g: ConflictGraph, *, check: bool = True) -> MwisResult:
    """Polynomial-time MWIS for claw-free graphs.

    The optimum weight comes from the augmenting-path method described in
    the module notes.  The returned set is then fixed greedily: vertices are
    tried in index order and kept when the remaining graph can still reach
    the optimum, which yields the lexicographically smallest optimal member
    list (the same set :func:`mwis_exact` returns).

    Raises
    ------
    NotClawFreeError
        ``g`` contains a claw; the witness is attached to the exception.
    """
    start = time.perf_counter()
    if check:
        witness = find_claw(g)
        if witness is not None:
            raise NotClawFreeError(witness, witness.describe(g))
    w, floats = _exact_weights(g)
    aug = _Augmenter(g.adjacency, w)
    target = _clawfree_optimum(aug, range(g.n))
    chosen: list[int] = []
    have = Fraction(0)
    blocked: set[int] = set()
    for v in range(g.n):
        if have == target:
            break
        if v in blocked:
            continue
        remaining = [u for u in range(v + 1, g.n) if u not in blocked and u not in g.adjacency[v]]
        if have + w[v] + _clawfree_optimum(aug, remaining) == target:
            chosen.append(v)
            have += w[v]
            blocked |= g.adjacency[v]
        blocked.add(v)
    members = frozenset(chosen)
    assert is_independent(g, members) and have == target
    return MwisResult(members, _report_weight(target, floats), "clawfree", time.perf_counter() - start, dict(aug.stats))


def mwis(g: ConflictGraph, *, method: str = "clawfree", fallback_exact: bool = False) -> MwisResult:
    """Dispatch helper used by the command line.

    ``method="clawfree"`` raises :class:`NotClawFreeError` on a claw unless
    ``fallback_exact`` is set, in which case the exact oracle is used.
    """
    if method == "exact":
        return mwis_exact(g)
    try:
        return mwis_clawfree(g)
    except NotClawFreeError:
        if fallback_exact:
            return mwis_exact(g)
        raise

