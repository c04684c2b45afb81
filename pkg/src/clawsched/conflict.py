"""Transmission enumeration and conflict-graph construction.

A transmission ``(i, J)`` activates the hyperedge from source ``i`` to the
receiver set ``J``.  Two transmissions conflict when they cannot share a
time slot; the rules differ per :class:`~clawsched.netmodel.Scenario`:

* ``I`` (geometric, Protocol model): same source, a source that is also a
  receiver of the other, shared receivers, or a receiver ``j`` of one
  transmission for which the other transmitter is within ``(1 + delta)``
  times the distance to its own transmitter.
* ``II`` (tree, half duplex): same source, source/receiver overlap, shared
  receivers, or a parent/child relation between the sources.
* ``III`` (tree, full duplex): same source or shared receivers.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .errors import CapExceededError, InputError, InvalidParameterError, ScenarioViolationError, UnknownVertexError
from .netmodel import Hypergraph, Network, Scenario, forward_neighbors, format_number, validate_scenario

MAX_FORWARD = 12


@dataclass(frozen=True)
class Transmission:
    """Activation of the hyperedge ``source -> receivers``.

    ``receivers`` is kept as a tuple in network order so labels and hashes
    are canonical.
    """

    source: str
    receivers: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.receivers:
            raise InvalidParameterError("a transmission needs at least one receiver")
        if self.source in self.receivers:
            raise InvalidParameterError("a transmission cannot target its own source")

    @property
    def receiver_set(self) -> frozenset[str]:
        return frozenset(self.receivers)

    @property
    def label(self) -> str:
        """``(A,B)`` for one receiver, ``(A,{B,C})`` for several."""
        if len(self.receivers) == 1:
            return f"({self.source},{self.receivers[0]})"
        return f"({self.source},{{{','.join(self.receivers)}}})"

    def __str__(self) -> str:
        return self.label


def parse_transmission(label: str) -> Transmission:
    """Inverse of :attr:`Transmission.label`."""
    text = label.strip()
    if not (text.startswith("(") and text.endswith(")")) or "," not in text:
        raise InputError(f"not a transmission label: {label!r}")
    body = text[1:-1]
    src, _, rest = body.partition(",")
    rest = rest.strip()
    if rest.startswith("{") and rest.endswith("}"):
        recv = tuple(r.strip() for r in rest[1:-1].split(","))
    else:
        recv = (rest,)
    return Transmission(src.strip(), recv)


@dataclass(frozen=True)
class ConflictGraph:
    """Undirected, vertex-weighted conflict graph.

    Attributes
    ----------
    vertices : tuple
        Vertex payloads in canonical order, normally :class:`Transmission`
        objects.  Vertex identity elsewhere is the integer index.
    adjacency : tuple of frozenset of int
        ``adjacency[v]`` is the neighbour set of ``v``.
    weights : tuple
        Nonnegative vertex weights (Fractions or floats).
    """

    vertices: tuple[Any, ...]
    adjacency: tuple[frozenset[int], ...]
    weights: tuple[Fraction | float, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.vertices)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "adjacency", tuple(frozenset(a) for a in self.adjacency))
        if not self.weights:
            object.__setattr__(self, "weights", tuple(Fraction(1) for _ in range(n)))
        else:
            object.__setattr__(self, "weights", tuple(_weight(w) for w in self.weights))
        if len(self.adjacency) != n or len(self.weights) != n:
            raise InvalidParameterError("vertices, adjacency and weights must have equal length")
        for v, nb in enumerate(self.adjacency):
            if v in nb:
                raise InvalidParameterError(f"self-loop at vertex {v}")
            for u in nb:
                if not 0 <= u < n or v not in self.adjacency[u]:
                    raise InvalidParameterError(f"adjacency is not symmetric at ({v}, {u})")

    # -------------------------------------------------------------- builders
    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Sequence[Any] | None = None,
        labels: Sequence[Any] | None = None,
    ) -> "ConflictGraph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise InvalidParameterError(f"self-loop at vertex {a}")
            adj[a].add(b)
            adj[b].add(a)
        verts = tuple(labels) if labels is not None else tuple(f"v{k}" for k in range(n))
        return cls(verts, tuple(frozenset(a) for a in adj), tuple(weights) if weights is not None else ())

    @classmethod
    def from_networkx(cls, g: Any, weight: str = "weight") -> "ConflictGraph":
        """Build from a networkx graph; nodes are taken in sorted order."""
        nodes = sorted(g.nodes())
        pos = {v: k for k, v in enumerate(nodes)}
        edges = [(pos[a], pos[b]) for a, b in g.edges()]
        ws = [g.nodes[v].get(weight, 1) for v in nodes]
        return cls.from_edges(len(nodes), edges, ws, labels=nodes)

    def with_weights(self, weights: Sequence[Any] | Mapping[Hashable, Any]) -> "ConflictGraph":
        """Copy with new weights, given as a sequence or a map keyed by label or index."""
        if isinstance(weights, Mapping):
            current = list(self.weights)
            for key, w in weights.items():
                current[self.index_of(key)] = w
            weights = current
        return ConflictGraph(self.vertices, self.adjacency, tuple(weights))

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "ConflictGraph":
        """Copy with additional edges."""
        adj = [set(a) for a in self.adjacency]
        for a, b in extra:
            if a == b:
                raise InvalidParameterError("cannot add a self-loop")
            adj[a].add(b)
            adj[b].add(a)
        return ConflictGraph(self.vertices, tuple(frozenset(a) for a in adj), self.weights)

    # -------------------------------------------------------------- queries
    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in sorted(self.adjacency[u]) if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def label(self, v: int) -> str:
        x = self.vertices[v]
        return x.label if isinstance(x, Transmission) else str(x)

    def labels(self) -> list[str]:
        return [self.label(v) for v in range(self.n)]

    def index_of(self, key: Hashable) -> int:
        """Resolve a vertex by index, payload or label."""
        if isinstance(key, int) and not isinstance(key, bool) and 0 <= key < self.n:
            return key
        for v, x in enumerate(self.vertices):
            if x == key or self.label(v) == str(key):
                return v
        if isinstance(key, str):
            try:
                t = parse_transmission(key)
            except InputError:
                t = None
            if t is not None:
                for v, x in enumerate(self.vertices):
                    if isinstance(x, Transmission) and x.source == t.source and x.receiver_set == t.receiver_set:
                        return v
        raise UnknownVertexError(f"unknown vertex {key!r}")

    def edge_labels(self) -> set[frozenset[str]]:
        """Edges as unordered label pairs (handy for comparisons)."""
        return {frozenset((self.label(a), self.label(b))) for a, b in self.edges()}

    def to_networkx(self) -> Any:
        import networkx as nx

        g = nx.Graph()
        for v in range(self.n):
            g.add_node(v, weight=self.weights[v])
        g.add_edges_from(self.edges())
        return g


def _weight(w: Any) -> Fraction | float:
    if isinstance(w, bool):
        raise InvalidParameterError("weights must be numbers")
    if isinstance(w, float):
        if not math.isfinite(w) or w < 0:
            raise InvalidParameterError(f"weights must be finite and nonnegative, got {w!r}")
        return w
    try:
        val = Fraction(w) if not isinstance(w, str) else Fraction(w.strip())
    except (TypeError, ValueError, ZeroDivisionError):
        raise InvalidParameterError(f"invalid weight {w!r}") from None
    if val < 0:
        raise InvalidParameterError(f"weights must be nonnegative, got {w!r}")
    return val


# ----------------------------------------------------------------- enumeration
def enumerate_transmissions(
    net: Network,
    scenario: Scenario | str,
    *,
    force: bool = False,
    bidirectional: bool = False,
    max_forward: int = MAX_FORWARD,
) -> list[Transmission]:
    """All valid transmissions ``(i, J)`` in canonical order.

    ``J`` ranges over the nonempty subsets of the forward neighbours of
    ``i``.  Sources follow document order; for one source, smaller receiver
    sets come first and equal-size sets are ordered by node position.

    Raises
    ------
    ScenarioViolationError
        A blocking premise fails and ``force`` is not set.
    CapExceededError
        Some node has more than ``max_forward`` forward neighbours.
    """
    report = validate_scenario(net, scenario)
    if not report.ok and not force:
        raise ScenarioViolationError(report)
    out: list[Transmission] = []
    for i in net.node_ids:
        fwd = sorted(forward_neighbors(net, i, bidirectional=bidirectional), key=net.index)
        if len(fwd) > max_forward:
            raise CapExceededError(
                f"node {i} has {len(fwd)} forward neighbours; receiver-set enumeration is capped at {max_forward}"
            )
        for size in range(1, len(fwd) + 1):
            for combo in itertools.combinations(fwd, size):
                out.append(Transmission(i, combo))
    return out


def _guard_violated(net: Network, interferer: str, own: str, j: str) -> bool:
    """``|interferer - j| <= (1 + delta) |own - j|`` with boundary slack."""
    factor = 1 + net.delta
    d_int = net.distance2(interferer, j)
    d_own = net.distance2(own, j)
    if d_int <= factor * factor * d_own:
        return True
    if net.tolerance <= 0:
        return False
    return math.sqrt(d_int) - float(factor) * math.sqrt(d_own) <= net.tolerance


def conflict_predicate(scenario: Scenario | str, t1: Transmission, t2: Transmission, net: Network) -> bool:
    """Whether ``t1`` and ``t2`` cannot be scheduled in the same slot.

    The result is symmetric in its two transmission arguments.
    """
    sc = Scenario.parse(scenario)
    i1, i2 = t1.source, t2.source
    J1, J2 = t1.receiver_set, t2.receiver_set
    if i1 == i2 or (J1 & J2):
        return True
    if sc is Scenario.III:
        return False
    if i1 in J2 or i2 in J1:
        return True
    if sc is Scenario.II:
        return net.parent(i1) == i2 or net.parent(i2) == i1
    return any(_guard_violated(net, i2, i1, j) for j in t1.receivers) or any(
        _guard_violated(net, i1, i2, j) for j in t2.receivers
    )


def build_conflict_graph(
    net: Network,
    scenario: Scenario | str,
    *,
    force: bool = False,
    bidirectional: bool = False,
    weights: Sequence[Any] | Mapping[Hashable, Any] | None = None,
) -> ConflictGraph:
    """Conflict graph over :func:`enumerate_transmissions` (unit weights by default)."""
    sc = Scenario.parse(scenario)
    txs = enumerate_transmissions(net, sc, force=force, bidirectional=bidirectional)
    adj: list[set[int]] = [set() for _ in txs]
    for a, b in itertools.combinations(range(len(txs)), 2):
        if conflict_predicate(sc, txs[a], txs[b], net):
            adj[a].add(b)
            adj[b].add(a)
    g = ConflictGraph(tuple(txs), tuple(frozenset(s) for s in adj))
    return g.with_weights(weights) if weights is not None else g


def build_orthogonal_graph(transmissions: Sequence[Transmission]) -> ConflictGraph:
    """Complete conflict graph: every slot carries a single transmission."""
    n = len(transmissions)
    adj = tuple(frozenset(u for u in range(n) if u != v) for v in range(n))
    return ConflictGraph(tuple(transmissions), adj)


def hypergraph(net: Network, transmissions: Sequence[Transmission]) -> Hypergraph:
    """Hypergraph whose hyperedges are the given transmissions."""
    return Hypergraph(frozenset(net.node_ids), tuple((t.source, t.receiver_set) for t in transmissions))


# ---------------------------------------------------------------- export
def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: ConflictGraph, name: str = "conflict", highlight: Iterable[int] = ()) -> str:
    """Undirected DOT rendering with transmission labels.

    ``highlight`` vertices are drawn filled, which is how schedules and
    MWIS answers are overlaid.
    """
    marked = set(highlight)
    lines = [f"graph {_dot_quote(name)} {{"]
    for v in range(g.n):
        attrs = [f"label={_dot_quote(g.label(v))}"]
        if g.weights[v] != 1:
            attrs.append(f"weight={_dot_quote(format_number(g.weights[v]))}")
        if v in marked:
            attrs.append('style="filled" fillcolor="lightblue"')
        lines.append(f"  v{v} [{' '.join(attrs)}];")
    for a, b in g.edges():
        lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_machine(g: ConflictGraph) -> str:
    """JSON adjacency document; :func:`parse_machine` reads it back."""
    doc = {
        "vertices": g.labels(),
        "weights": [format_number(w) for w in g.weights],
        "edges": [list(e) for e in g.edges()],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_machine(text: str) -> ConflictGraph:
    """Read a document produced by :func:`to_machine`."""
    try:
        doc = json.loads(text)
        labels = doc["vertices"]
        edges = [tuple(e) for e in doc["edges"]]
        weights = [float(w) if ("." in w or "e" in w.lower()) else Fraction(w) for w in doc["weights"]]
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"invalid conflict-graph document: {exc}") from None
    verts: list[Any] = []
    for lab in labels:
        try:
            verts.append(parse_transmission(lab))
        except InputError:
            verts.append(lab)
    return ConflictGraph.from_edges(len(labels), edges, weights, labels=verts)
