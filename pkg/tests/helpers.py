"""Random instance generators shared by the property tests.

Claw-free graphs come from three constructions: claw-free line-network
conflict graphs, Scenario II tree conflict graphs and line graphs.  Each
is followed by induced subgraphs and edge deletions that are kept only
when the result is still claw-free.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx

from clawsched.conflict import ConflictGraph, build_conflict_graph
from clawsched.graphcore import induced_subgraph, is_claw_free
from clawsched.netmodel import line_network, tree_network

FIXTURE_NAMES = [
    "fig3_line.net",
    "fig1_star.net",
    "fig8_tree.net",
    "fig10_tree.net",
    "fig12_butterfly.net",
    "line5_geometric.net",
    "line7_geometric.net",
    "line9_geometric.net",
]


def random_line_gaps(rng: random.Random, n: int) -> list[Fraction]:
    """Gaps for ``n`` collinear nodes with every three consecutive gaps summing past 1."""
    while True:
        gaps = [Fraction(rng.randint(25, 90), 100) for _ in range(n - 1)]
        if all(sum(gaps[k : k + 3]) > 1 for k in range(len(gaps) - 2)):
            return gaps


def random_line_network(rng: random.Random, n: int):
    return line_network(random_line_gaps(rng, n), r_T=1, reach_limit=2)


def random_tree_scenario_ii(rng: random.Random, max_nodes: int = 14):
    """Tree where exactly one node per level has children (1 to 3 of them)."""
    parents: dict[str, str | None] = {"r": None}
    level = ["r"]
    count = 1
    while count < max_nodes:
        hub = rng.choice(level)
        k = min(rng.randint(1, 3), max_nodes - count)
        kids = [f"v{count + j}" for j in range(k)]
        for kid in kids:
            parents[kid] = hub
        count += k
        level = kids
        if rng.random() < 0.05:
            break
    return tree_network(parents)


def random_tree_any(rng: random.Random, max_nodes: int = 14, max_children: int = 4):
    """Random rooted tree with bounded out-degree."""
    parents: dict[str, str | None] = {"r": None}
    kids: dict[str, int] = {"r": 0}
    ids = ["r"]
    for k in range(1, rng.randint(2, max_nodes)):
        open_nodes = [v for v in ids if kids[v] < max_children]
        p = rng.choice(open_nodes)
        name = f"v{k}"
        parents[name] = p
        kids[p] += 1
        kids[name] = 0
        ids.append(name)
    return tree_network(parents)


def _line_graph(rng: random.Random) -> ConflictGraph:
    base = nx.gnm_random_graph(rng.randint(5, 10), rng.randint(6, 18), seed=rng.randrange(1 << 30))
    lg = nx.line_graph(base)
    nodes = sorted(lg.nodes())
    pos = {v: k for k, v in enumerate(nodes)}
    return ConflictGraph.from_edges(len(nodes), [(pos[a], pos[b]) for a, b in lg.edges()])


def _base_clawfree(rng: random.Random) -> ConflictGraph:
    kind = rng.randrange(3)
    if kind == 0:
        # Line conflict graphs are not always claw-free (see the counterexample fixture).
        while True:
            g = build_conflict_graph(random_line_network(rng, rng.randint(5, 10)), "I")
            if is_claw_free(g):
                return g
    if kind == 1:
        return build_conflict_graph(random_tree_scenario_ii(rng, rng.randint(4, 16)), "II")
    return _line_graph(rng)


def random_clawfree_graph(rng: random.Random, max_n: int = 18, max_weight: int = 100) -> ConflictGraph:
    """Claw-free graph with at most ``max_n`` vertices and integer weights in ``[0, max_weight]``."""
    g = _base_clawfree(rng)
    if g.n > max_n:
        keep = rng.sample(range(g.n), rng.randint(max_n // 2, max_n))
        g, _ = induced_subgraph(g, keep)
    elif rng.random() < 0.2:
        keep = rng.sample(range(g.n), rng.randint(1, g.n))
        g, _ = induced_subgraph(g, keep)
    edges = g.edges()
    rng.shuffle(edges)
    for e in edges[: rng.randint(0, max(0, len(edges) // 3))]:
        adj = [set(a) for a in g.adjacency]
        a, b = e
        adj[a].discard(b)
        adj[b].discard(a)
        trial = ConflictGraph(g.vertices, tuple(frozenset(s) for s in adj), g.weights)
        if is_claw_free(trial):
            g = trial
    assert is_claw_free(g)
    return g.with_weights([rng.randint(0, max_weight) for _ in range(g.n)])


def random_graph(rng: random.Random, n: int, p: float, max_weight: int = 100) -> ConflictGraph:
    """Erdos-Renyi graph with random integer weights (not necessarily claw-free)."""
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return ConflictGraph.from_edges(n, edges, [rng.randint(0, max_weight) for _ in range(n)])


def brute_force_mwis(g: ConflictGraph) -> tuple[Fraction, tuple[int, ...]]:
    """Heaviest independent set by full enumeration; smallest sorted member list on ties."""
    best_w, best = Fraction(-1), ()
    for mask in range(1 << g.n):
        members = [v for v in range(g.n) if mask >> v & 1]
        if any(g.adjacency[v] & set(members) for v in members):
            continue
        w = sum((Fraction(g.weights[v]) for v in members), Fraction(0))
        key = tuple(members)
        if w > best_w or (w == best_w and key < best):
            best_w, best = w, key
    return best_w, best
