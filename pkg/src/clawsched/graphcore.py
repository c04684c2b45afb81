"""Scenario-independent graph algorithms on :class:`ConflictGraph`.

Independent sets are represented as ``frozenset`` objects of vertex
indices.  Every function is deterministic: ties are broken by vertex
index, so listings are stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import networkx as nx

from .conflict import ConflictGraph
from .errors import CapExceededError, UnknownVertexError

IndependentSet = frozenset
DEFAULT_MIS_CAP = 30


@dataclass(frozen=True)
class ClawWitness:
    """An induced ``K_{1,3}``: a center adjacent to three independent leaves."""

    center: int
    leaves: tuple[int, int, int]

    def describe(self, g: ConflictGraph) -> str:
        """Render as ``"(A,B); (E,B),(F,C),(G,D)"``."""
        return f"{g.label(self.center)}; " + ",".join(g.label(v) for v in self.leaves)


def find_claw(g: ConflictGraph) -> ClawWitness | None:
    """Return the lexicographically first induced claw, or ``None``.

    Centers are scanned in index order and, for each center, leaf triples
    in lexicographic order; the first triple of pairwise nonadjacent
    neighbours wins.  The scan costs ``O(|V| * deg^3)``.
    """
    for c in range(g.n):
        nb = sorted(g.adjacency[c])
        if len(nb) < 3:
            continue
        for a_pos, a in enumerate(nb):
            adj_a = g.adjacency[a]
            rest = [b for b in nb[a_pos + 1 :] if b not in adj_a]
            for b_pos, b in enumerate(rest):
                adj_b = g.adjacency[b]
                for d in rest[b_pos + 1 :]:
                    if d not in adj_b:
                        return ClawWitness(c, (a, b, d))
    return None


def is_claw_free(g: ConflictGraph) -> bool:
    return find_claw(g) is None


def complement(g: ConflictGraph) -> ConflictGraph:
    """Same vertices and weights with the complementary edge set."""
    everyone = frozenset(range(g.n))
    adj = tuple(everyone - g.adjacency[v] - {v} for v in range(g.n))
    return ConflictGraph(g.vertices, adj, g.weights)


def is_independent(g: ConflictGraph, s: Iterable[int]) -> bool:
    """True iff no edge of ``g`` joins two members of ``s``.

    Raises
    ------
    UnknownVertexError
        A member is not a vertex index of ``g``.
    """
    members = list(s)
    for v in members:
        if not isinstance(v, int) or not 0 <= v < g.n:
            raise UnknownVertexError(f"unknown vertex {v!r}")
    chosen = set(members)
    return all(not (g.adjacency[v] & chosen) for v in chosen)


def is_maximal_independent(g: ConflictGraph, s: Iterable[int]) -> bool:
    chosen = set(s)
    if not is_independent(g, chosen):
        return False
    return all(v in chosen or g.adjacency[v] & chosen for v in range(g.n))


def enumerate_maximal_independent_sets(g: ConflictGraph, cap: int = DEFAULT_MIS_CAP) -> list[frozenset[int]]:
    """All inclusion-maximal independent sets, sorted by member list.

    The sets are the maximal cliques of the complement, enumerated with
    the pivoting Bron-Kerbosch procedure of :func:`networkx.find_cliques`.

    Raises
    ------
    CapExceededError
        ``g`` has more than ``cap`` vertices.
    """
    if g.n > cap:
        raise CapExceededError(
            f"maximal independent set enumeration is capped at {cap} vertices (graph has {g.n})"
        )
    if g.n == 0:
        return [frozenset()]
    comp = nx.Graph()
    comp.add_nodes_from(range(g.n))
    everyone = set(range(g.n))
    for v in range(g.n):
        for u in everyone - g.adjacency[v] - {v}:
            if u > v:
                comp.add_edge(v, u)
    sets = {tuple(sorted(c)) for c in nx.find_cliques(comp)}
    return [frozenset(s) for s in sorted(sets)]


def induced_subgraph(g: ConflictGraph, keep: Iterable[int]) -> tuple[ConflictGraph, list[int]]:
    """Subgraph on ``keep`` (sorted) plus the map from new to old indices."""
    order = sorted(set(keep))
    pos = {v: k for k, v in enumerate(order)}
    adj = tuple(frozenset(pos[u] for u in g.adjacency[v] if u in pos) for v in order)
    sub = ConflictGraph(tuple(g.vertices[v] for v in order), adj, tuple(g.weights[v] for v in order))
    return sub, order


def connected_components(g: ConflictGraph) -> list[list[int]]:
    """Vertex sets of connected components, each sorted, in order of first vertex."""
    seen = [False] * g.n
    comps: list[list[int]] = []
    for s in range(g.n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def is_disjoint_union_of_cliques(g: ConflictGraph) -> bool:
    """True when every connected component is a complete graph."""
    for comp in connected_components(g):
        members = set(comp)
        if any(g.adjacency[v] != members - {v} for v in comp):
            return False
    return True


def independent_sets_brute(g: ConflictGraph) -> list[frozenset[int]]:
    """Every independent set (including the empty set); for small test graphs."""
    out = [frozenset()]
    for size in range(1, g.n + 1):
        found = False
        for combo in itertools.combinations(range(g.n), size):
            if is_independent(g, combo):
                out.append(frozenset(combo))
                found = True
        if not found:
            break
    return out
