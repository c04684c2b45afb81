"""Multicast rate maximisation with network coding and time sharing.

Given the broadcast hypergraph, a conflict graph over its hyperedges, a
source ``s`` and sinks ``T``, :func:`max_rate` solves the linear program

maximise ``R`` subject to

* capacity: for every sink ``t``, node ``i`` and nonempty ``K`` within the
  out-neighbourhood ``N(i)``,
  ``sum_{j in K} x[t,i,j] <= sum_{J : J meets K} z[i,J]``;
* flow conservation: for every sink ``t`` and node ``i``, outflow minus
  inflow of ``x[t]`` equals ``R`` at ``s``, ``-R`` at ``t`` and ``0``
  elsewhere;
* nonnegativity of ``x``;
* scheduling: ``z[v] = c_v * sum_{S containing v} lambda_S`` with
  ``lambda >= 0`` over the maximal independent sets ``S`` of the conflict
  graph and ``sum lambda <= 1``.

``c_v`` is the capacity of activation ``v = (i, J)``, taken as the
smallest link capacity from ``i`` to a member of ``J``: a broadcast is
decoded by every receiver only at the rate of the weakest link.

Exact mode feeds rationals to the simplex of cddlib (``pycddlib``);
float mode uses the HiGHS solver from :func:`scipy.optimize.linprog`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import yaml

from .conflict import ConflictGraph, Transmission, hypergraph, parse_transmission
from .errors import CapExceededError, InputError, InvalidParameterError
from .graphcore import DEFAULT_MIS_CAP, enumerate_maximal_independent_sets, is_independent
from .netmodel import Hypergraph, Network, as_number, format_number

MAX_OUT_DEGREE = 12
Number = Fraction | float


@dataclass(frozen=True)
class RateInstance:
    """One multicast session over a scheduled hypergraph.

    Attributes
    ----------
    hypergraph : Hypergraph
    conflict : ConflictGraph
        Vertices are :class:`Transmission` objects, one per hyperedge.
    source : str
    sinks : tuple of str
    capacities : dict
        Map ``(i, j) -> capacity``; missing links have unit capacity.
    """

    hypergraph: Hypergraph
    conflict: ConflictGraph
    source: str
    sinks: tuple[str, ...]
    capacities: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sinks", tuple(self.sinks))
        nodes = self.hypergraph.nodes
        if self.source not in nodes:
            raise InvalidParameterError(f"source {self.source!r} is not a node")
        if not self.sinks:
            raise InvalidParameterError("at least one sink is required")
        for t in self.sinks:
            if t not in nodes:
                raise InvalidParameterError(f"sink {t!r} is not a node")
            if t == self.source:
                raise InvalidParameterError("the source cannot be a sink")
        edges = {(i, J) for i, J in self.hypergraph.hyperedges}
        verts = set()
        for v in self.conflict.vertices:
            if not isinstance(v, Transmission):
                raise InvalidParameterError("conflict-graph vertices must be transmissions")
            verts.add((v.source, v.receiver_set))
        if verts != edges or len(verts) != len(self.conflict.vertices):
            raise InvalidParameterError("conflict-graph vertices must match the hyperedges one to one")

    @classmethod
    def from_network(
        cls,
        net: Network,
        conflict: ConflictGraph,
        source: str | None = None,
        sinks: Sequence[str] | None = None,
    ) -> "RateInstance":
        """Instance whose hyperedges are the conflict-graph vertices."""
        src = source if source is not None else net.source
        snk = tuple(sinks) if sinks is not None else net.sinks
        if src is None or not snk:
            raise InvalidParameterError("the network document must name a source and at least one sink")
        return cls(hypergraph(net, list(conflict.vertices)), conflict, src, snk, dict(net.capacities))

    # ------------------------------------------------------------ helpers
    def capacity(self, i: str, j: str) -> Fraction:
        return self.capacities.get((i, j), Fraction(1))

    def activation_capacity(self, v: int) -> Fraction:
        t = self.conflict.vertices[v]
        return min(self.capacity(t.source, j) for j in t.receivers)

    @property
    def nodes(self) -> list[str]:
        return sorted(self.hypergraph.nodes)

    def out_neighbors(self, i: str) -> list[str]:
        return sorted(self.hypergraph.out_neighbors(i))

    def links(self) -> list[tuple[str, str]]:
        return [(i, j) for i in self.nodes for j in self.out_neighbors(i)]

    def reachable(self) -> set[str]:
        seen, stack = {self.source}, [self.source]
        while stack:
            i = stack.pop()
            for j in self.hypergraph.out_neighbors(i):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen


@dataclass
class RateSolution:
    """Optimal session rate with its certificate.

    Attributes
    ----------
    R : Fraction or float
        Common multicast rate (bits/sec).
    x : dict
        ``(t, i, j) -> flow`` for each sink and link.
    z : dict
        ``vertex index -> injection rate`` of each activation.
    schedule : list of (frozenset, number)
        Independent sets with their time fractions (positive only).
    arithmetic : str
        ``"exact"`` or ``"float"``.
    unreachable_sinks : tuple of str
        Sinks the source cannot reach; ``R`` is 0 whenever this is nonempty.
    """

    R: Number
    x: dict[tuple[str, str, str], Number]
    z: dict[int, Number]
    schedule: list[tuple[frozenset[int], Number]]
    arithmetic: str = "exact"
    unreachable_sinks: tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        return bool(self.unreachable_sinks)


def _subsets(items: Sequence[str]) -> Iterable[tuple[str, ...]]:
    for size in range(1, len(items) + 1):
        yield from itertools.combinations(items, size)


class _Layout:
    """Canonical LP variable and row layout shared by solver and verifier."""

    def __init__(self, inst: RateInstance, sets: Sequence[frozenset[int]]) -> None:
        self.inst = inst
        self.sets = list(sets)
        self.links = inst.links()
        self.x_index = {}
        col = 1
        for t in inst.sinks:
            for link in self.links:
                self.x_index[(t, *link)] = col
                col += 1
        self.lam0 = col
        self.ncols = col + len(self.sets)
        for i in inst.nodes:
            if len(inst.out_neighbors(i)) > MAX_OUT_DEGREE:
                raise CapExceededError(
                    f"node {i} reaches {len(inst.out_neighbors(i))} nodes; capacity rows are capped at {MAX_OUT_DEGREE}"
                )
        src_of = [t.source for t in inst.conflict.vertices]
        self.caps = [inst.activation_capacity(v) for v in range(inst.conflict.n)]
        self.by_source: dict[str, list[int]] = {}
        for v, i in enumerate(src_of):
            self.by_source.setdefault(i, []).append(v)

    def capacity_rows(self):
        """Yield ``(t, i, K, coeffs)`` with ``coeffs`` a sparse row ``<= 0``."""
        inst = self.inst
        for t in inst.sinks:
            for i in inst.nodes:
                out = inst.out_neighbors(i)
                for K in _subsets(out):
                    Kset = set(K)
                    row: dict[int, Fraction] = {}
                    for j in K:
                        row[self.x_index[(t, i, j)]] = Fraction(1)
                    for s_idx, S in enumerate(self.sets):
                        coef = sum(
                            (self.caps[v] for v in S if v in self.by_source.get(i, ()) and inst.conflict.vertices[v].receiver_set & Kset),
                            Fraction(0),
                        )
                        if coef:
                            row[self.lam0 + s_idx] = -coef
                    yield t, i, K, row

    def flow_rows(self):
        """Yield ``(t, i, coeffs)`` with ``coeffs`` a sparse row ``== 0``."""
        inst = self.inst
        for t in inst.sinks:
            for i in inst.nodes:
                row: dict[int, Fraction] = {}
                for a, b in self.links:
                    if a == i:
                        row[self.x_index[(t, a, b)]] = row.get(self.x_index[(t, a, b)], Fraction(0)) + 1
                    if b == i:
                        row[self.x_index[(t, a, b)]] = row.get(self.x_index[(t, a, b)], Fraction(0)) - 1
                if i == inst.source:
                    row[0] = Fraction(-1)
                elif i == t:
                    row[0] = Fraction(1)
                yield t, i, row


def _dense(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> list[list[Fraction]]:
    out = []
    for r in rows:
        line = [Fraction(0)] * ncols
        for c, v in r.items():
            line[c] = v
        out.append(line)
    return out


def _solve_exact(c, A_ub, b_ub, A_eq, b_eq) -> list[Fraction]:
    """Minimise ``c @ x`` over ``x >= 0`` with cddlib's rational simplex."""
    import cdd

    n = len(c)
    # cddlib rows read ``b - A x >= 0``; equalities are flagged through lin_set.
    rows = [[b] + [-a for a in r] for r, b in zip(A_ub, b_ub)]
    rows += [[Fraction(0)] + [Fraction(int(k == j)) for k in range(n)] for j in range(n)]
    first_eq = len(rows)
    rows += [[b] + [-a for a in r] for r, b in zip(A_eq, b_eq)]
    mat = cdd.Matrix(rows, number_type="fraction")
    mat.lin_set = frozenset(range(first_eq, len(rows)))
    mat.obj_type = cdd.LPObjType.MIN
    mat.obj_func = [Fraction(0)] + list(c)
    lp = cdd.LinProg(mat)
    lp.solve()
    if lp.status != cdd.LPStatusType.OPTIMAL:
        raise InvalidParameterError(f"exact LP solver stopped with status {lp.status}")
    return [Fraction(v) for v in lp.primal_solution]


def _solve_float(c, A_ub, b_ub, A_eq, b_eq) -> list[float]:
    import numpy as np
    from scipy.optimize import linprog

    res = linprog(
        np.array(c, dtype=float),
        A_ub=np.array(A_ub, dtype=float),
        b_ub=np.array(b_ub, dtype=float),
        A_eq=np.array(A_eq, dtype=float) if A_eq else None,
        b_eq=np.array(b_eq, dtype=float) if A_eq else None,
        bounds=(0, None),
        method="highs",
    )
    if not res.success:  # the LP is always feasible (all zeros) and bounded by capacities
        raise InvalidParameterError(f"float LP solver failed: {res.message}")
    return [float(v) for v in res.x]


def max_rate(
    inst: RateInstance,
    *,
    arithmetic: str = "exact",
    mis_cap: int = DEFAULT_MIS_CAP,
) -> RateSolution:
    """Largest common multicast rate and a schedule achieving it.

    Parameters
    ----------
    arithmetic : {"exact", "float"}
        Rational simplex or floating-point HiGHS.
    mis_cap : int
        Vertex cap for maximal independent set enumeration.

    The LP is solved twice: first for the rate, then with the rate fixed
    to minimise the total scheduled time, which removes idle fractions from
    the reported schedule.

    Raises
    ------
    CapExceededError
        The conflict graph or an out-neighbourhood is too large.
    """
    if arithmetic not in ("exact", "float"):
        raise InvalidParameterError("arithmetic must be 'exact' or 'float'")
    sets = enumerate_maximal_independent_sets(inst.conflict, cap=mis_cap)
    lay = _Layout(inst, sets)
    unreachable = tuple(t for t in inst.sinks if t not in inst.reachable())
    zero: Number = Fraction(0) if arithmetic == "exact" else 0.0
    if unreachable:
        return RateSolution(
            zero,
            {key: zero for key in lay.x_index},
            {v: zero for v in range(inst.conflict.n)},
            [],
            arithmetic,
            unreachable,
        )
    ub_rows = [row for *_, row in lay.capacity_rows()]
    b_ub = [Fraction(0)] * len(ub_rows)
    ub_rows.append({lay.lam0 + k: Fraction(1) for k in range(len(sets))})
    b_ub.append(Fraction(1))
    eq_rows = [row for *_, row in lay.flow_rows()]
    A_ub = _dense(ub_rows, lay.ncols)
    A_eq = _dense(eq_rows, lay.ncols)
    b_eq = [Fraction(0)] * len(A_eq)
    solve = _solve_exact if arithmetic == "exact" else _solve_float
    c = [Fraction(0)] * lay.ncols
    c[0] = Fraction(-1)
    first = solve(c, A_ub, b_ub, A_eq, b_eq)
    R = first[0]
    # Second pass: keep R, use as little air time as possible.
    c2 = [Fraction(0)] * lay.ncols
    for k in range(len(sets)):
        c2[lay.lam0 + k] = Fraction(1)
    fix = [Fraction(0)] * lay.ncols
    fix[0] = Fraction(1)
    try:
        sol = solve(c2, A_ub, b_ub, A_eq + [fix], b_eq + [R])
    except InvalidParameterError:
        if arithmetic == "exact":
            raise
        # Rounding in the first float pass can make the pinned rate infeasible; relax it by a hair.
        relax = [Fraction(0)] * lay.ncols
        relax[0] = Fraction(-1)
        sol = solve(c2, A_ub + [relax], b_ub + [Fraction(-(R - 1e-9 * max(1.0, abs(R))))], A_eq, b_eq)
    return _assemble(inst, lay, sol, arithmetic)


def _assemble(inst: RateInstance, lay: _Layout, sol: Sequence[Number], arithmetic: str) -> RateSolution:
    eps = 0 if arithmetic == "exact" else 1e-12
    R = sol[0]
    x = {key: sol[col] for key, col in lay.x_index.items()}
    lam = [sol[lay.lam0 + k] for k in range(len(lay.sets))]
    schedule = [(S, l) for S, l in zip(lay.sets, lam) if l > eps]
    zero: Number = Fraction(0) if arithmetic == "exact" else 0.0
    z = {v: zero for v in range(inst.conflict.n)}
    for S, l in schedule:
        for v in S:
            z[v] = z[v] + l * (lay.caps[v] if arithmetic == "exact" else float(lay.caps[v]))
    return RateSolution(R, x, z, schedule, arithmetic)


# ------------------------------------------------------------------ checks
@dataclass
class VerificationReport:
    """Residuals of every constraint family for one solution.

    Attributes
    ----------
    capacity_slack : dict
        ``(i, K, t) -> rhs - lhs``; negative means violated.
    flow_residual : dict
        ``(i, t) -> lhs - rhs`` of flow conservation.
    negative : list
        ``(kind, key, value)`` for every negative variable.
    reconstruction_error : float
        Largest ``|z_v - c_v * sum_{S containing v} lambda_S|``.
    dependent_sets : list
        Scheduled sets that are not independent.
    lambda_total : number
    z_in_polytope : bool
        Whether some schedule over the maximal independent sets, with total
        time at most 1, covers ``z`` (decided by a separate LP).
    tolerance : float
    """

    capacity_slack: dict
    flow_residual: dict
    negative: list
    reconstruction_error: float
    dependent_sets: list
    lambda_total: Number
    z_in_polytope: bool
    tolerance: float

    @property
    def capacity_violations(self) -> dict:
        return {k: v for k, v in self.capacity_slack.items() if v < -self.tolerance}

    @property
    def flow_violations(self) -> dict:
        return {k: v for k, v in self.flow_residual.items() if abs(v) > self.tolerance}

    @property
    def polytope_ok(self) -> bool:
        return (
            self.reconstruction_error <= self.tolerance
            and not self.dependent_sets
            and self.lambda_total <= 1 + self.tolerance
            and self.z_in_polytope
        )

    @property
    def max_residual(self) -> float:
        vals = [0.0]
        vals += [max(0.0, -float(v)) for v in self.capacity_slack.values()]
        vals += [abs(float(v)) for v in self.flow_residual.values()]
        vals += [abs(float(v)) for *_, v in self.negative]
        vals.append(float(self.reconstruction_error))
        vals.append(max(0.0, float(self.lambda_total) - 1))
        return max(vals)

    @property
    def ok(self) -> bool:
        return (
            not self.capacity_violations
            and not self.flow_violations
            and not [n for n in self.negative if n[2] < -self.tolerance]
            and self.polytope_ok
        )

    def violations(self) -> list[str]:
        out = []
        for (i, K, t), v in sorted(self.capacity_violations.items(), key=str):
            out.append(f"capacity: node {i}, K={{{','.join(K)}}}, sink {t}: exceeded by {format_number(-v)}")
        for (i, t), v in sorted(self.flow_violations.items(), key=str):
            out.append(f"flow: node {i}, sink {t}: residual {format_number(v)}")
        for kind, key, v in self.negative:
            if v < -self.tolerance:
                out.append(f"negative {kind} {key}: {format_number(v)}")
        if self.reconstruction_error > self.tolerance:
            out.append(f"polytope: schedule reproduces z only to {format_number(self.reconstruction_error)}")
        for S in self.dependent_sets:
            out.append(f"polytope: scheduled set {sorted(S)} is not independent")
        if self.lambda_total > 1 + self.tolerance:
            out.append(f"polytope: time fractions sum to {format_number(self.lambda_total)} > 1")
        if not self.z_in_polytope:
            out.append("polytope: z lies outside the independent set polytope")
        return out

    def __str__(self) -> str:
        viol = self.violations()
        head = f"max residual {format_number(self.max_residual)}"
        if not viol:
            return f"verification passed ({head})"
        return "verification FAILED (" + head + ")\n" + "\n".join("  " + v for v in viol)


def z_in_polytope(inst: RateInstance, z: Mapping[int, Number], tol: float = 1e-9, mis_cap: int = DEFAULT_MIS_CAP) -> bool:
    """Whether ``z`` is dominated by a schedule with total time at most 1.

    Solves ``min sum(lambda)`` subject to ``sum_{S containing v} c_v
    lambda_S >= z_v`` over the maximal independent sets.  Because the
    polytope is down-closed, membership holds iff the minimum is at most 1.
    """
    sets = enumerate_maximal_independent_sets(inst.conflict, cap=mis_cap)
    caps = [inst.activation_capacity(v) for v in range(inst.conflict.n)]
    exact = all(isinstance(val, Fraction) for val in z.values())
    for v, val in z.items():
        if val < -tol:
            return False
    if all(val <= (0 if exact else tol) for val in z.values()):
        return True
    rows = []
    rhs = []
    for v in range(inst.conflict.n):
        rows.append([-(caps[v] if v in S else Fraction(0)) for S in sets])
        rhs.append(-Fraction(z.get(v, 0)) if exact else Fraction(-float(z.get(v, 0))))
    c = [Fraction(1)] * len(sets)
    # Always feasible: every vertex lies in some maximal set and c_v > 0.
    if exact:
        return sum(_solve_exact(c, rows, rhs, [], []), Fraction(0)) <= 1
    return sum(_solve_float(c, rows, rhs, [], [])) <= 1 + tol


def verify_solution(inst: RateInstance, sol: RateSolution, tol: float = 1e-9) -> VerificationReport:
    """Check a solution against every LP constraint family.

    Nothing is raised; every finding is recorded in the report.
    """
    sets = enumerate_maximal_independent_sets(inst.conflict)
    lay = _Layout(inst, sets)
    exact = sol.arithmetic == "exact" and all(isinstance(v, Fraction) for v in sol.x.values())

    def num(v: Any) -> Number:
        return Fraction(v) if exact else float(v)

    xval = {key: num(sol.x.get(key, 0)) for key in lay.x_index}
    zval = {v: num(sol.z.get(v, 0)) for v in range(inst.conflict.n)}
    R = num(sol.R)
    cap_slack = {}
    for t in inst.sinks:
        for i in inst.nodes:
            out = inst.out_neighbors(i)
            for K in _subsets(out):
                Kset = set(K)
                lhs = sum((xval[(t, i, j)] for j in K), num(0))
                rhs = sum(
                    (zval[v] for v in lay.by_source.get(i, ()) if inst.conflict.vertices[v].receiver_set & Kset),
                    num(0),
                )
                cap_slack[(i, K, t)] = rhs - lhs
    flow_res = {}
    for t in inst.sinks:
        for i in inst.nodes:
            out_f = sum((xval[(t, a, b)] for a, b in lay.links if a == i), num(0))
            in_f = sum((xval[(t, a, b)] for a, b in lay.links if b == i), num(0))
            want = R if i == inst.source else (-R if i == t else num(0))
            flow_res[(i, t)] = out_f - in_f - want
    negative = [("x", key, v) for key, v in xval.items() if v < 0]
    negative += [("z", inst.conflict.label(v), val) for v, val in zval.items() if val < 0]
    negative += [("lambda", tuple(sorted(S)), l) for S, l in sol.schedule if l < 0]
    if R < 0:
        negative.append(("R", "R", R))
    recon = {v: num(0) for v in range(inst.conflict.n)}
    for S, l in sol.schedule:
        for v in S:
            recon[v] += num(l) * num(lay.caps[v])
    recon_err = max((abs(float(zval[v] - recon[v])) for v in recon), default=0.0)
    dependent = [S for S, _ in sol.schedule if not is_independent(inst.conflict, S)]
    lam_total = sum((num(l) for _, l in sol.schedule), num(0))
    inside = z_in_polytope(inst, zval, tol)
    return VerificationReport(cap_slack, flow_res, negative, recon_err, dependent, lam_total, inside, tol)


# ------------------------------------------------------------------ export
def solution_to_dict(inst: RateInstance, sol: RateSolution) -> dict[str, Any]:
    g = inst.conflict
    return {
        "R": format_number(sol.R),
        "arithmetic": sol.arithmetic,
        "unreachable_sinks": list(sol.unreachable_sinks),
        "schedule": [
            {"fraction": format_number(l), "set": [g.label(v) for v in sorted(S)]} for S, l in sol.schedule
        ],
        "z": [{"transmission": g.label(v), "rate": format_number(val)} for v, val in sorted(sol.z.items())],
        "flows": [
            {"sink": t, "src": i, "dst": j, "rate": format_number(val)} for (t, i, j), val in sol.x.items()
        ],
    }


def emit_solution(inst: RateInstance, sol: RateSolution) -> str:
    """YAML rendering; :func:`parse_solution` reads it back."""
    return yaml.safe_dump(solution_to_dict(inst, sol), sort_keys=False)


def parse_solution(text: str, inst: RateInstance) -> RateSolution:
    """Read a solution document written by :func:`emit_solution`."""
    try:
        doc = yaml.safe_load(text)
        arithmetic = doc.get("arithmetic", "exact")

        def num(v: Any) -> Number:
            return as_number(v) if arithmetic == "exact" else float(as_number(v))

        g = inst.conflict
        schedule = [
            (frozenset(g.index_of(parse_transmission(lab)) for lab in row["set"]), num(row["fraction"]))
            for row in doc.get("schedule") or []
        ]
        z = {g.index_of(parse_transmission(r["transmission"])): num(r["rate"]) for r in doc.get("z") or []}
        x = {(str(r["sink"]), str(r["src"]), str(r["dst"])): num(r["rate"]) for r in doc.get("flows") or []}
        return RateSolution(
            num(doc["R"]), x, z, schedule, arithmetic, tuple(str(s) for s in doc.get("unreachable_sinks") or [])
        )
    except (KeyError, TypeError, AttributeError, ValueError, yaml.YAMLError) as exc:
        raise InputError(f"invalid solution document: {exc}") from None


def schedule_to_dot(inst: RateInstance, sol: RateSolution, name: str = "schedule") -> str:
    """Directed DOT drawing of the network with one edge colour per slot class."""
    palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"]
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for i in inst.nodes:
        lines.append(f'  "{i}";')
    for k, (S, l) in enumerate(sol.schedule):
        colour = palette[k % len(palette)]
        for v in sorted(S):
            t = inst.conflict.vertices[v]
            for j in t.receivers:
                lines.append(
                    f'  "{t.source}" -> "{j}" [color="{colour}" label="slot {k + 1} ({format_number(l)})"];'
                )
    lines.append("}")
    return "\n".join(lines) + "\n"


def max_flow_bound(inst: RateInstance) -> float:
    """Upper bound on ``R``: every hyperedge always active, scheduling ignored.

    Each link ``i -> j`` gets the combined capacity of the activations from
    ``i`` that include ``j`` (a relaxation of the capacity rows), and the
    bound is the smallest max-flow over the sinks.
    """
    import networkx as nx

    g = nx.DiGraph()
    g.add_nodes_from(inst.nodes)
    for v, t in enumerate(inst.conflict.vertices):
        c = float(inst.activation_capacity(v))
        for j in t.receivers:
            prev = g.edges[t.source, j]["capacity"] if g.has_edge(t.source, j) else 0.0
            g.add_edge(t.source, j, capacity=prev + c)
    return min(nx.maximum_flow_value(g, inst.source, t) for t in inst.sinks)
