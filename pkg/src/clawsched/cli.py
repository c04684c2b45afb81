"""Command-line front end.

Every subcommand reads a network document (YAML, see :mod:`clawsched.netmodel`).
``claw-check`` and ``mwis`` also accept a conflict-graph document produced by
``conflict-graph --format machine``.

Exit status is 0 on success, 1 on a domain finding (a claw, an exceeded
enumeration cap, a blocking premise or a failed verification) and 2 on
input errors (unreadable files, malformed documents, bad flags).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence, TextIO

import yaml

from . import __version__
from .conflict import (
    ConflictGraph,
    build_conflict_graph,
    build_orthogonal_graph,
    enumerate_transmissions,
    parse_machine,
    to_dot,
    to_machine,
)
from .errors import ClawschedError, InputError, InvalidParameterError, NetworkFormatError
from .graphcore import find_claw
from .mwis import mwis
from .netmodel import Network, Scenario, as_number, format_number, parse_network, validate_scenario
from .rate import RateInstance, emit_solution, max_rate, parse_solution, schedule_to_dot, verify_solution

SUBCOMMANDS = ("transmissions", "conflict-graph", "claw-check", "mwis", "max-rate", "verify")


@dataclass
class CommandConfig:
    """Parsed invocation; :func:`run` executes it."""

    subcommand: str
    input: str
    scenario: Scenario = Scenario.I
    delta: Any = None
    reach_limit: int | None = None
    bidirectional: bool = False
    force: bool = False
    orthogonal: bool = False
    format: str = "table"
    output: str | None = None
    dot: str | None = None
    weights: str | None = None
    inline_weights: list[str] = field(default_factory=list)
    method: str = "clawfree"
    fallback_exact: bool = False
    arithmetic: str = "exact"
    tolerance: float = 1e-9
    source: str | None = None
    sinks: list[str] = field(default_factory=list)
    schedule_dot: str | None = None
    solution: str | None = None

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidParameterError(f"unknown subcommand {self.subcommand!r}")


# ------------------------------------------------------------------ loading
def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise NetworkFormatError(f"cannot read {path}: {exc.strerror}") from None


def _looks_like_graph_document(text: str) -> bool:
    try:
        doc = json.loads(text)
    except ValueError:
        return False
    return isinstance(doc, dict) and "vertices" in doc and "edges" in doc


def _network(cfg: CommandConfig, text: str | None = None) -> Network:
    net = parse_network(text if text is not None else _read(cfg.input))
    changes: dict[str, Any] = {}
    if cfg.delta is not None:
        changes["delta"] = as_number(cfg.delta, "delta")
    if cfg.reach_limit is not None:
        changes["reach_limit"] = cfg.reach_limit
    return net.replace(**changes) if changes else net


def _warn_premises(net: Network, cfg: CommandConfig, err: TextIO) -> None:
    report = validate_scenario(net, cfg.scenario)
    for v in report.violations:
        if not v.blocking or cfg.force:
            print(f"warning [{v.code}]: {v.message}", file=err)
    if cfg.bidirectional:
        print("warning: bidirectional transmissions void the claw-free guarantees", file=err)


def _conflict_graph(cfg: CommandConfig, err: TextIO) -> tuple[ConflictGraph, Network | None]:
    text = _read(cfg.input)
    if _looks_like_graph_document(text):
        return parse_machine(text), None
    net = _network(cfg, text)
    _warn_premises(net, cfg, err)
    g = build_conflict_graph(net, cfg.scenario, force=cfg.force, bidirectional=cfg.bidirectional)
    if cfg.orthogonal:
        g = build_orthogonal_graph(g.vertices).with_weights(g.weights)
    return g, net


def _weights(cfg: CommandConfig, g: ConflictGraph) -> ConflictGraph:
    if cfg.weights:
        try:
            doc = yaml.safe_load(_read(cfg.weights))
        except yaml.YAMLError as exc:
            raise InputError(f"invalid weights document: {exc}") from None
        if isinstance(doc, dict) and "weights" in doc:
            doc = doc["weights"]
        if isinstance(doc, list):
            if len(doc) != g.n:
                raise InputError(f"weights document lists {len(doc)} weights for {g.n} vertices")
            g = g.with_weights([as_number(w, "weight") if not isinstance(w, float) else w for w in doc])
        elif isinstance(doc, dict):
            g = g.with_weights({str(k): v for k, v in doc.items()})
        else:
            raise InputError("a weights document is a list or a label-to-weight mapping")
    inline = {}
    for item in cfg.inline_weights:
        label, sep, value = item.rpartition("=")
        if not sep or not label:
            raise InputError(f"--weight expects LABEL=VALUE, got {item!r}")
        inline[label] = value
    return g.with_weights(inline) if inline else g


def _emit(text: str, cfg: CommandConfig, out: TextIO) -> None:
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg.output}: {exc.strerror}") from None
    else:
        out.write(text)


def _write_file(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _set_text(g: ConflictGraph, members) -> str:
    return "{" + ", ".join(g.label(v) for v in sorted(members)) + "}"


def _rate_instance(cfg: CommandConfig, err: TextIO) -> tuple[RateInstance, ConflictGraph]:
    net = _network(cfg)
    _warn_premises(net, cfg, err)
    g = build_conflict_graph(net, cfg.scenario, force=cfg.force, bidirectional=cfg.bidirectional)
    if cfg.orthogonal:
        g = build_orthogonal_graph(g.vertices)
    inst = RateInstance.from_network(net, g, source=cfg.source, sinks=cfg.sinks or None)
    return inst, g


# ------------------------------------------------------------------ commands
def _cmd_transmissions(cfg: CommandConfig, out: TextIO, err: TextIO) -> int:
    net = _network(cfg)
    _warn_premises(net, cfg, err)
    txs = enumerate_transmissions(net, cfg.scenario, force=cfg.force, bidirectional=cfg.bidirectional)
    if cfg.format == "machine":
        _emit(json.dumps([t.label for t in txs], indent=2) + "\n", cfg, out)
    elif cfg.format == "table":
        width = len(str(len(txs)))
        _emit("".join(f"{k:>{width}}  {t.label}\n" for k, t in enumerate(txs)), cfg, out)
    else:
        raise InputError("transmissions supports --format table or machine")
    return 0


def _cmd_conflict_graph(cfg: CommandConfig, out: TextIO, err: TextIO) -> int:
    g, _ = _conflict_graph(cfg, err)
    if cfg.format == "machine":
        text = to_machine(g)
    elif cfg.format == "dot":
        text = to_dot(g)
    else:
        lines = [f"vertices: {g.n}", f"edges: {g.edge_count}"]
        lines += [f"  {g.label(a)} -- {g.label(b)}" for a, b in g.edges()]
        text = "\n".join(lines) + "\n"
    _emit(text, cfg, out)
    if cfg.dot:
        _write_file(cfg.dot, to_dot(g))
    return 0


def _cmd_claw_check(cfg: CommandConfig, out: TextIO, err: TextIO) -> int:
    g, _ = _conflict_graph(cfg, err)
    witness = find_claw(g)
    if witness is None:
        out.write("claw-free: yes\n")
        return 0
    out.write(f"claw-free: no\nwitness: {witness.describe(g)}\n")
    if cfg.dot:
        _write_file(cfg.dot, to_dot(g, highlight=(witness.center, *witness.leaves)))
    return 1


def _cmd_mwis(cfg: CommandConfig, out: TextIO, err: TextIO) -> int:
    g, _ = _conflict_graph(cfg, err)
    g = _weights(cfg, g)
    res = mwis(g, method=cfg.method, fallback_exact=cfg.fallback_exact)
    if cfg.format == "machine":
        doc = {
            "set": [g.label(v) for v in sorted(res.members)],
            "weight": format_number(res.weight),
            "method": res.method,
        }
        text = json.dumps(doc, indent=2) + "\n"
    elif cfg.format == "dot":
        text = to_dot(g, highlight=res.members)
    else:
        text = f"set: {_set_text(g, res.members)}\nweight: {format_number(res.weight)}\nmethod: {res.method}\n"
    _emit(text, cfg, out)
    # Timing goes to stderr so that stdout stays byte-identical across runs.
    print(f"time: {res.seconds:.6f} s", file=err)
    if cfg.dot:
        _write_file(cfg.dot, to_dot(g, highlight=res.members))
    return 0


def _cmd_max_rate(cfg: CommandConfig, out: TextIO, err: TextIO) -> int:
    inst, g = _rate_instance(cfg, err)
    sol = max_rate(inst, arithmetic=cfg.arithmetic)
    if cfg.format == "machine":
        text = emit_solution(inst, sol)
    elif cfg.format == "table":
        lines = [f"R = {format_number(sol.R)}"]
        if sol.unreachable_sinks:
            lines.append("unreachable sinks: " + ", ".join(sol.unreachable_sinks))
        lines.append(f"schedule ({len(sol.schedule)} slots):")
        width = max((len(format_number(l)) for _, l in sol.schedule), default=0)
        lines += [f"  {format_number(l):>{width}}  {_set_text(g, S)}" for S, l in sol.schedule]
        text = "\n".join(lines) + "\n"
    else:
        raise InputError("max-rate supports --format table or machine")
    _emit(text, cfg, out)
    if cfg.schedule_dot:
        _write_file(cfg.schedule_dot, schedule_to_dot(inst, sol))
    return 0


def _cmd_verify(cfg: CommandConfig, out: TextIO, err: TextIO) -> int:
    if not cfg.solution:
        raise InputError("verify needs --solution FILE")
    inst, _ = _rate_instance(cfg, err)
    sol = parse_solution(_read(cfg.solution), inst)
    report = verify_solution(inst, sol, tol=cfg.tolerance)
    out.write(str(report) + "\n")
    return 0 if report.ok else 1


_DISPATCH = {
    "transmissions": _cmd_transmissions,
    "conflict-graph": _cmd_conflict_graph,
    "claw-check": _cmd_claw_check,
    "mwis": _cmd_mwis,
    "max-rate": _cmd_max_rate,
    "verify": _cmd_verify,
}


def run(cfg: CommandConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    """Execute ``cfg`` and return the exit status."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        return _DISPATCH[cfg.subcommand](cfg, out, err)
    except ClawschedError as exc:
        print(f"error: {exc}", file=err)
        return exc.exit_code


# ------------------------------------------------------------------ parsing
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clawsched",
        description="Conflict graphs, claw-free checks, MWIS and multicast rates for wireless networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    def common(p: argparse.ArgumentParser, formats: Sequence[str]) -> None:
        p.add_argument("input", help="network document (YAML)")
        p.add_argument("--scenario", default="I", choices=["I", "II", "III"], help="interference scenario")
        p.add_argument("--delta", help="override the guard-zone margin (e.g. 1/100)")
        p.add_argument("--reach-limit", type=int, help="override how many forward neighbours a node addresses")
        p.add_argument("--bidirectional", action="store_true", help="also transmit backwards (voids guarantees)")
        p.add_argument("--force", action="store_true", help="proceed although a blocking premise fails")
        p.add_argument("--format", default="table", choices=list(formats))
        p.add_argument("--output", "-o", help="write the main output here instead of stdout")

    p = sub.add_parser("transmissions", help="list valid transmissions")
    common(p, ["table", "machine"])

    p = sub.add_parser("conflict-graph", help="build the conflict graph")
    common(p, ["table", "machine", "dot"])
    p.add_argument("--orthogonal", action="store_true", help="use the complete conflict graph")
    p.add_argument("--dot", help="also write a DOT file")

    p = sub.add_parser("claw-check", help="test the conflict graph for an induced claw")
    common(p, ["table"])
    p.add_argument("--orthogonal", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--dot", help="write a DOT file with the witness highlighted")

    p = sub.add_parser("mwis", help="maximum weighted independent set of the conflict graph")
    common(p, ["table", "machine", "dot"])
    p.add_argument("--orthogonal", action="store_true", help="use the complete conflict graph")
    p.add_argument("--weights", help="YAML list or label-to-weight mapping")
    p.add_argument("--weight", action="append", default=[], metavar="LABEL=W", help="inline weight, repeatable")
    p.add_argument("--method", default="clawfree", choices=["clawfree", "exact"])
    p.add_argument("--fallback-exact", action="store_true", help="use the exact solver when a claw is found")
    p.add_argument("--dot", help="also write a DOT file with the set highlighted")

    for name, helptext in (("max-rate", "maximise the multicast rate"), ("verify", "check a saved solution")):
        p = sub.add_parser(name, help=helptext)
        common(p, ["table", "machine"])
        p.add_argument("--orthogonal", action="store_true", help="use the complete conflict graph")
        p.add_argument("--arithmetic", default="exact", choices=["exact", "float"])
        p.add_argument("--source", help="override the session source")
        p.add_argument("--sink", action="append", default=[], help="override the sinks, repeatable")
        if name == "max-rate":
            p.add_argument("--schedule-dot", help="write the schedule as a DOT drawing")
        else:
            p.add_argument("--solution", required=True, help="solution document from max-rate --format machine")
            p.add_argument("--tolerance", type=float, default=1e-9)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> CommandConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    return CommandConfig(
        subcommand=ns.subcommand,
        input=ns.input,
        scenario=Scenario.parse(ns.scenario),
        delta=d.get("delta"),
        reach_limit=d.get("reach_limit"),
        bidirectional=ns.bidirectional,
        force=ns.force,
        orthogonal=d.get("orthogonal", False),
        format=ns.format,
        output=ns.output,
        dot=d.get("dot"),
        weights=d.get("weights"),
        inline_weights=d.get("weight", []),
        method=d.get("method", "clawfree"),
        fallback_exact=d.get("fallback_exact", False),
        arithmetic=d.get("arithmetic", "exact"),
        tolerance=d.get("tolerance", 1e-9),
        source=d.get("source"),
        sinks=d.get("sink", []),
        schedule_dot=d.get("schedule_dot"),
        solution=d.get("solution"),
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point; returns the exit status."""
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
