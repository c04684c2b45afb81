"""Network data model, file format and scenario premise checks.

A :class:`Network` is either *geometric* (every node has planar coordinates
and links are decided by a common transmission range) or a *tree* (links
run from each parent to its children).  All numeric fields are stored as
:class:`fractions.Fraction` so that range and guard-zone comparisons can be
made exactly whenever the input is rational.

The on-disk format is YAML.  Numbers may be written as integers, decimals
or ``"p/q"`` strings; decimals are read digit-for-digit, never through a
binary float.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import yaml

from .errors import (
    DuplicateIdError,
    InvalidParameterError,
    MissingPositionError,
    NetworkFormatError,
    TreeStructureError,
    UnknownNodeError,
)

DEFAULT_DELTA = Fraction(1, 100)
DEFAULT_TOLERANCE = 1e-9


class Scenario(str, enum.Enum):
    """Interference scenario.

    ``I`` is the geometric Protocol-model scenario, ``II`` the half-duplex
    tree scenario and ``III`` the full-duplex tree scenario.
    """

    I = "I"
    II = "II"
    III = "III"

    @classmethod
    def parse(cls, value: "Scenario | str") -> "Scenario":
        if isinstance(value, Scenario):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise InvalidParameterError(f"unknown scenario {value!r}; expected I, II or III") from None


def as_number(value: Any, what: str = "value") -> Fraction:
    """Convert an int, decimal, ``"p/q"`` string or Fraction to a Fraction.

    Floats are converted through their shortest decimal representation, so
    ``0.1`` becomes ``1/10`` rather than the nearest binary fraction.
    """
    if isinstance(value, bool):
        raise NetworkFormatError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise NetworkFormatError(f"{what}: non-finite number {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise NetworkFormatError(f"{what}: cannot parse number {value!r}") from None
    raise NetworkFormatError(f"{what}: expected a number, got {value!r}")


def format_number(value: Fraction | float | int) -> str:
    """Render a number compactly: ``2/3``, ``1`` or a float with 12 digits."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return format(value, ".12g")


@dataclass(frozen=True)
class Node:
    """A network node.

    Attributes
    ----------
    id : str
        Unique identifier.
    x, y : Fraction or None
        Planar coordinates (geometric networks only).
    parent : str or None
        Parent identifier (tree networks only; ``None`` for the root).
    """

    id: str
    x: Fraction | None = None
    y: Fraction | None = None
    parent: str | None = None

    @property
    def position(self) -> tuple[Fraction, Fraction] | None:
        if self.x is None or self.y is None:
            return None
        return (self.x, self.y)


@dataclass(frozen=True)
class Network:
    """An immutable wireless network description.

    Attributes
    ----------
    nodes : tuple of Node
        Nodes in document order.  Document order fixes the canonical
        ordering of transmissions.
    r_T : Fraction
        Common maximum transmission range (positive).
    delta : Fraction
        Guard-zone factor used by the Protocol-model interference rule.
    topology : str
        ``"geometric"`` or ``"tree"``.
    orientation : tuple of str or None
        Source-to-sink order of the nodes for geometric networks.  When
        absent, document order is used.
    capacities : dict
        Map ``(i, j) -> capacity`` for directed links; missing links have
        unit capacity.
    reach_limit : int or None
        Maximum number of forward neighbours a transmitter may address.
        ``None`` means unlimited.
    source, sinks :
        Multicast session endpoints used by the rate solver.
    tolerance : float
        Absolute slack for boundary comparisons on inexact coordinates.
    """

    nodes: tuple[Node, ...]
    r_T: Fraction
    delta: Fraction = DEFAULT_DELTA
    topology: str = "geometric"
    orientation: tuple[str, ...] | None = None
    capacities: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)
    reach_limit: int | None = None
    source: str | None = None
    sinks: tuple[str, ...] = ()
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "r_T", as_number(self.r_T, "r_T"))
        object.__setattr__(self, "delta", as_number(self.delta, "delta"))
        object.__setattr__(self, "sinks", tuple(self.sinks))
        if self.orientation is not None:
            object.__setattr__(self, "orientation", tuple(self.orientation))
        object.__setattr__(
            self, "capacities", {(str(a), str(b)): as_number(c, "capacity") for (a, b), c in self.capacities.items()}
        )
        self._validate()
        index = {n.id: k for k, n in enumerate(self.nodes)}
        object.__setattr__(self, "_index", index)
        order = self.orientation if self.orientation is not None else tuple(n.id for n in self.nodes)
        object.__setattr__(self, "_rank", {nid: k for k, nid in enumerate(order)})
        if self.topology == "tree":
            children: dict[str, list[str]] = {n.id: [] for n in self.nodes}
            for n in self.nodes:
                if n.parent is not None:
                    children[n.parent].append(n.id)
            object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})

    def _validate(self) -> None:
        seen: set[str] = set()
        for n in self.nodes:
            if n.id in seen:
                raise DuplicateIdError(f"duplicate node id {n.id!r}")
            seen.add(n.id)
        if self.r_T <= 0:
            raise InvalidParameterError(f"r_T must be positive, got {format_number(self.r_T)}")
        if self.delta < 0:
            raise InvalidParameterError(f"delta must be nonnegative, got {format_number(self.delta)}")
        if self.topology not in ("geometric", "tree"):
            raise InvalidParameterError(f"topology must be 'geometric' or 'tree', got {self.topology!r}")
        if self.reach_limit is not None and (not isinstance(self.reach_limit, int) or self.reach_limit < 1):
            raise InvalidParameterError(f"reach_limit must be a positive integer, got {self.reach_limit!r}")
        if self.tolerance < 0:
            raise InvalidParameterError("tolerance must be nonnegative")
        if self.topology == "geometric":
            for n in self.nodes:
                if n.position is None:
                    raise MissingPositionError(f"node {n.id!r} has no position in a geometric network")
        else:
            self._validate_tree(seen)
        if self.orientation is not None:
            if sorted(self.orientation) != sorted(seen) or len(set(self.orientation)) != len(self.orientation):
                raise InvalidParameterError("orientation must list every node exactly once")
        for (a, b), c in self.capacities.items():
            for nid in (a, b):
                if nid not in seen:
                    raise UnknownNodeError(f"capacity refers to unknown node {nid!r}")
            if c <= 0:
                raise InvalidParameterError(f"capacity of link {a}->{b} must be positive")
        for nid in ((self.source,) if self.source is not None else ()) + self.sinks:
            if nid not in seen:
                raise UnknownNodeError(f"session endpoint {nid!r} is not a node")
        if self.source is not None and self.source in self.sinks:
            raise InvalidParameterError("the source cannot also be a sink")

    def _validate_tree(self, ids: set[str]) -> None:
        roots = [n.id for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise TreeStructureError(f"a tree needs exactly one root, found {len(roots)}: {roots}")
        parent = {n.id: n.parent for n in self.nodes}
        for nid, p in parent.items():
            if p is not None and p not in ids:
                raise TreeStructureError(f"node {nid!r} has unknown parent {p!r}")
        for nid in parent:
            steps, cur = 0, nid
            while parent[cur] is not None:
                cur = parent[cur]
                steps += 1
                if steps > len(parent):
                    raise TreeStructureError(f"parent links starting at {nid!r} form a cycle")

    # ------------------------------------------------------------------ access
    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def node(self, nid: str) -> Node:
        try:
            return self.nodes[self._index[nid]]  # type: ignore[attr-defined]
        except KeyError:
            raise UnknownNodeError(f"unknown node {nid!r}") from None

    def index(self, nid: str) -> int:
        """Position of ``nid`` in document order."""
        self.node(nid)
        return self._index[nid]  # type: ignore[attr-defined]

    def rank(self, nid: str) -> int:
        """Position of ``nid`` in the source-to-sink orientation."""
        self.node(nid)
        return self._rank[nid]  # type: ignore[attr-defined]

    @property
    def order(self) -> tuple[str, ...]:
        """Node ids sorted by orientation."""
        return tuple(sorted(self.node_ids, key=self.rank))

    def capacity(self, i: str, j: str) -> Fraction:
        return self.capacities.get((i, j), Fraction(1))

    def children(self, nid: str) -> tuple[str, ...]:
        if self.topology != "tree":
            return ()
        self.node(nid)
        return self._children[nid]  # type: ignore[attr-defined]

    def parent(self, nid: str) -> str | None:
        return self.node(nid).parent

    def level(self, nid: str) -> int:
        """Tree level, with the root on level 1."""
        lvl, cur = 1, self.node(nid)
        while cur.parent is not None:
            cur = self.node(cur.parent)
            lvl += 1
        return lvl

    def distance2(self, a: str, b: str) -> Fraction:
        """Exact squared Euclidean distance between two positioned nodes."""
        pa, pb = self.node(a).position, self.node(b).position
        if pa is None or pb is None:
            raise MissingPositionError("distance requested between nodes without positions")
        return (pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2

    def replace(self, **changes: Any) -> "Network":
        """Return a copy with some fields replaced (validation re-runs)."""
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return Network(**data)


def within(d2: Fraction, bound2: Fraction, tolerance: float) -> bool:
    """Decide ``sqrt(d2) <= sqrt(bound2)`` with an absolute distance slack.

    The comparison is exact first; the tolerance only rescues boundary cases
    where decimal coordinates approximate an irrational position.
    """
    if d2 <= bound2:
        return True
    if tolerance <= 0:
        return False
    return math.sqrt(d2) - math.sqrt(bound2) <= tolerance


def neighbors(net: Network, i: str) -> frozenset[str]:
    """Nodes that ``i`` can physically reach.

    Geometric networks: every ``j != i`` with ``|i - j| <= r_T`` (inclusive).
    Tree networks: the children of ``i``.
    """
    net.node(i)
    if net.topology == "tree":
        return frozenset(net.children(i))
    r2 = net.r_T * net.r_T
    return frozenset(j for j in net.node_ids if j != i and within(net.distance2(i, j), r2, net.tolerance))


def forward_neighbors(net: Network, i: str, *, bidirectional: bool = False) -> tuple[str, ...]:
    """Neighbours that ``i`` may address, in orientation order.

    Only neighbours later than ``i`` in the orientation (children, for a
    tree) are kept unless ``bidirectional`` is set, in which case every
    physical neighbour (and the parent, for a tree) is kept.  The result is
    truncated to the first ``reach_limit`` entries.
    """
    if net.topology == "tree":
        cands = list(net.children(i))
        if bidirectional and net.parent(i) is not None:
            cands.append(net.parent(i))  # type: ignore[arg-type]
    else:
        cands = [j for j in neighbors(net, i) if bidirectional or net.rank(j) > net.rank(i)]
    cands.sort(key=net.rank)
    if net.reach_limit is not None:
        cands = cands[: net.reach_limit]
    return tuple(cands)


# ---------------------------------------------------------------- hypergraph
@dataclass(frozen=True)
class Hypergraph:
    """Broadcast hypergraph: nodes plus hyperedges ``(i, J)``."""

    nodes: frozenset[str]
    hyperedges: tuple[tuple[str, frozenset[str]], ...]

    def __post_init__(self) -> None:
        for i, J in self.hyperedges:
            if not J:
                raise InvalidParameterError(f"hyperedge from {i!r} has an empty receiver set")
            if i in J:
                raise InvalidParameterError(f"hyperedge from {i!r} lists its own source as a receiver")
            missing = ({i} | set(J)) - self.nodes
            if missing:
                raise UnknownNodeError(f"hyperedge refers to unknown nodes {sorted(missing)}")

    def out_neighbors(self, i: str) -> frozenset[str]:
        """Union of the receiver sets of hyperedges leaving ``i``."""
        out: set[str] = set()
        for src, J in self.hyperedges:
            if src == i:
                out |= J
        return frozenset(out)


# ---------------------------------------------------------------- validation
@dataclass(frozen=True)
class Violation:
    """One failed premise.

    ``blocking`` entries stop transmission enumeration unless forced;
    non-blocking entries are warnings about guarantees that will not hold.
    """

    code: str
    message: str
    nodes: tuple[str, ...] = ()
    blocking: bool = True


@dataclass(frozen=True)
class ValidationReport:
    scenario: Scenario
    violations: tuple[Violation, ...] = ()

    @property
    def blocking(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.blocking)

    @property
    def warnings(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if not v.blocking)

    @property
    def ok(self) -> bool:
        """True when no blocking violation is present."""
        return not self.blocking

    def __bool__(self) -> bool:  # an empty report is "falsy" like an empty list
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __str__(self) -> str:
        if not self.violations:
            return f"scenario {self.scenario.value}: all premises hold"
        lines = [f"scenario {self.scenario.value}:"]
        for v in self.violations:
            tag = "error" if v.blocking else "warning"
            lines.append(f"  {tag} [{v.code}] {v.message}")
        return "\n".join(lines)


def is_collinear(net: Network) -> bool:
    """True when every node of a geometric network lies on one line."""
    pts = [n.position for n in net.nodes]
    if net.topology != "geometric" or len(pts) < 3:
        return net.topology == "geometric"
    base = pts[0]
    other = next((p for p in pts[1:] if p != base), None)
    if other is None:
        return True
    dx, dy = other[0] - base[0], other[1] - base[1]
    return all(dx * (p[1] - base[1]) - dy * (p[0] - base[0]) == 0 for p in pts)  # type: ignore[index]


def validate_scenario(net: Network, scenario: Scenario | str) -> ValidationReport:
    """Check the premises of an interference scenario.

    Scenario I needs a geometric network.  For line networks it also warns
    when the spacing premise ``r_T < |mu_i - mu_{i+3}|`` fails or when a
    transmitter may address more than two forward nodes, because the
    claw-freeness guarantee for lines depends on both.

    Scenarios II and III need a tree.  Scenario II additionally requires
    that at most one node per level has children.

    Returns
    -------
    ValidationReport
        Empty when every premise holds.
    """
    sc = Scenario.parse(scenario)
    out: list[Violation] = []
    if sc is Scenario.I:
        if net.topology != "geometric":
            out.append(Violation("topology", "the Protocol-model scenario needs a geometric network"))
            return ValidationReport(sc, tuple(out))
        if is_collinear(net) and len(net.nodes) >= 2:
            order = net.order
            r2 = net.r_T * net.r_T
            for k in range(len(order) - 3):
                a, b = order[k], order[k + 3]
                if net.distance2(a, b) <= r2:
                    out.append(
                        Violation(
                            "line-spacing",
                            f"nodes {a} and {b} are three positions apart but within range r_T",
                            (a, b),
                            blocking=False,
                        )
                    )
            if net.reach_limit is None or net.reach_limit > 2:
                wide = [i for i in order if len(forward_neighbors(net, i)) > 2]
                if wide:
                    out.append(
                        Violation(
                            "reach-limit",
                            "transmitters with more than two forward neighbours: " + ", ".join(wide),
                            tuple(wide),
                            blocking=False,
                        )
                    )
        return ValidationReport(sc, tuple(out))

    if net.topology != "tree":
        out.append(Violation("topology", f"scenario {sc.value} needs a tree network"))
        return ValidationReport(sc, tuple(out))
    if sc is Scenario.II:
        by_level: dict[int, list[str]] = {}
        for nid in net.node_ids:
            if net.children(nid):
                by_level.setdefault(net.level(nid), []).append(nid)
        for lvl in sorted(by_level):
            parents = by_level[lvl]
            if len(parents) > 1:
                out.append(
                    Violation(
                        "branching-level",
                        f"level {lvl}: nodes {', '.join(parents)} all have children (at most one may)",
                        tuple(parents),
                    )
                )
    return ValidationReport(sc, tuple(out))


# ---------------------------------------------------------------- file format
_KNOWN_KEYS = {
    "nodes",
    "r_T",
    "delta",
    "topology",
    "orientation",
    "reach_limit",
    "capacities",
    "source",
    "sinks",
    "tolerance",
    "description",
}


def _ident(value: Any, what: str) -> str:
    if value is None or isinstance(value, (dict, list)):
        raise NetworkFormatError(f"{what}: expected a node id, got {value!r}")
    return str(value)


def network_from_dict(doc: Mapping[str, Any]) -> Network:
    """Build a :class:`Network` from an already-decoded document."""
    if not isinstance(doc, Mapping):
        raise NetworkFormatError("network document must be a mapping")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise NetworkFormatError(f"unknown keys in network document: {sorted(unknown)}")
    if "nodes" not in doc or "r_T" not in doc:
        raise NetworkFormatError("network document needs 'nodes' and 'r_T'")
    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list):
        raise NetworkFormatError("'nodes' must be a list")
    nodes = []
    for k, rec in enumerate(raw_nodes):
        if not isinstance(rec, Mapping) or "id" not in rec:
            raise NetworkFormatError(f"node entry {k} must be a mapping with an 'id'")
        extra = set(rec) - {"id", "x", "y", "parent"}
        if extra:
            raise NetworkFormatError(f"node {rec['id']!r}: unknown fields {sorted(extra)}")
        x = as_number(rec["x"], f"node {rec['id']} x") if rec.get("x") is not None else None
        y = as_number(rec["y"], f"node {rec['id']} y") if rec.get("y") is not None else None
        parent = _ident(rec["parent"], "parent") if rec.get("parent") is not None else None
        nodes.append(Node(_ident(rec["id"], "id"), x, y, parent))
    topology = doc.get("topology")
    if topology is None:
        topology = "tree" if any(n.parent is not None for n in nodes) else "geometric"
    caps: dict[tuple[str, str], Fraction] = {}
    for k, rec in enumerate(doc.get("capacities") or []):
        if not isinstance(rec, Mapping) or not {"src", "dst", "capacity"} <= set(rec):
            raise NetworkFormatError(f"capacity entry {k} needs 'src', 'dst' and 'capacity'")
        caps[(_ident(rec["src"], "src"), _ident(rec["dst"], "dst"))] = as_number(rec["capacity"], "capacity")
    orientation = doc.get("orientation")
    if orientation is not None:
        if not isinstance(orientation, list):
            raise NetworkFormatError("'orientation' must be a list of node ids")
        orientation = tuple(_ident(v, "orientation") for v in orientation)
    sinks = doc.get("sinks") or []
    if not isinstance(sinks, list):
        sinks = [sinks]
    reach = doc.get("reach_limit")
    if reach is not None and (isinstance(reach, bool) or not isinstance(reach, int)):
        raise NetworkFormatError("'reach_limit' must be an integer")
    tol = doc.get("tolerance", DEFAULT_TOLERANCE)
    try:
        tol = float(tol)
    except (TypeError, ValueError):
        raise NetworkFormatError("'tolerance' must be a number") from None
    return Network(
        nodes=tuple(nodes),
        r_T=as_number(doc["r_T"], "r_T"),
        delta=as_number(doc.get("delta", DEFAULT_DELTA), "delta"),
        topology=str(topology),
        orientation=orientation,
        capacities=caps,
        reach_limit=reach,
        source=_ident(doc["source"], "source") if doc.get("source") is not None else None,
        sinks=tuple(_ident(s, "sink") for s in sinks),
        tolerance=tol,
    )


def parse_network(document: str) -> Network:
    """Parse a YAML network document.

    Raises
    ------
    NetworkFormatError
        Malformed YAML or structure.
    DuplicateIdError, MissingPositionError, TreeStructureError, InvalidParameterError
        Semantic validation failures.
    """
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise NetworkFormatError(f"invalid YAML: {exc}") from None
    return network_from_dict(doc)


def load_network(path: str) -> Network:
    """Read and parse a network file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise NetworkFormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_network(text)


def _num_out(v: Fraction) -> int | str:
    return v.numerator if v.denominator == 1 else format_number(v)


def network_to_dict(net: Network) -> dict[str, Any]:
    doc: dict[str, Any] = {"topology": net.topology, "r_T": _num_out(net.r_T), "delta": _num_out(net.delta)}
    if net.reach_limit is not None:
        doc["reach_limit"] = net.reach_limit
    if net.orientation is not None:
        doc["orientation"] = list(net.orientation)
    if net.source is not None:
        doc["source"] = net.source
    if net.sinks:
        doc["sinks"] = list(net.sinks)
    if net.tolerance != DEFAULT_TOLERANCE:
        doc["tolerance"] = net.tolerance
    recs = []
    for n in net.nodes:
        rec: dict[str, Any] = {"id": n.id}
        if n.x is not None:
            rec["x"] = _num_out(n.x)
        if n.y is not None:
            rec["y"] = _num_out(n.y)
        if n.parent is not None:
            rec["parent"] = n.parent
        recs.append(rec)
    doc["nodes"] = recs
    if net.capacities:
        doc["capacities"] = [
            {"src": a, "dst": b, "capacity": _num_out(c)} for (a, b), c in sorted(net.capacities.items())
        ]
    return doc


def emit_network(net: Network) -> str:
    """Serialise a network; :func:`parse_network` reads it back unchanged."""
    return yaml.safe_dump(network_to_dict(net), sort_keys=False, default_flow_style=None)


def line_network(
    gaps: Sequence[Any] | Iterable[Any],
    *,
    r_T: Any = 1,
    delta: Any = DEFAULT_DELTA,
    reach_limit: int | None = 2,
    names: Sequence[str] | None = None,
) -> Network:
    """Convenience constructor for a collinear network.

    Parameters
    ----------
    gaps : sequence of numbers
        Successive distances along the x axis; ``len(gaps) + 1`` nodes.
    names : sequence of str, optional
        Node ids; defaults to ``n1, n2, ...``.
    """
    gaps = [as_number(g, "gap") for g in gaps]
    count = len(gaps) + 1
    ids = list(names) if names is not None else [f"n{k + 1}" for k in range(count)]
    if len(ids) != count:
        raise InvalidParameterError("need exactly one name per node")
    xs = [Fraction(0)]
    for g in gaps:
        xs.append(xs[-1] + g)
    nodes = tuple(Node(nid, x, Fraction(0)) for nid, x in zip(ids, xs))
    return Network(
        nodes=nodes,
        r_T=as_number(r_T, "r_T"),
        delta=as_number(delta, "delta"),
        reach_limit=reach_limit,
        source=ids[0],
        sinks=(ids[-1],),
    )


def tree_network(parents: Mapping[str, str | None] | Sequence[tuple[str, str | None]], **kw: Any) -> Network:
    """Convenience constructor for a tree from ``child -> parent`` pairs."""
    items = list(parents.items()) if isinstance(parents, Mapping) else list(parents)
    nodes = tuple(Node(str(c), parent=None if p is None else str(p)) for c, p in items)
    kw.setdefault("r_T", 1)
    return Network(nodes=nodes, topology="tree", **kw)
