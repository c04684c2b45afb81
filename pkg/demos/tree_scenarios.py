"""Tree networks under half and full duplex.

Run with ``python3 demos/tree_scenarios.py``.  The same tree is checked
against both tree scenarios: half duplex rejects two branching nodes on
one level, and full duplex always yields disjoint cliques.
"""

from pathlib import Path

from clawsched import build_conflict_graph, find_claw, load_network, max_rate, RateInstance, validate_scenario
from clawsched.graphcore import connected_components

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    half = load_network(str(FIXTURES / "fig8_tree.net"))
    g = build_conflict_graph(half, "II")
    print(f"fig8 tree, half duplex: {g.n} transmissions, {g.edge_count} conflicts, claw-free {find_claw(g) is None}")
    print("    R =", max_rate(RateInstance.from_network(half, g)).R)

    full = load_network(str(FIXTURES / "fig10_tree.net"))
    report = validate_scenario(full, "II")
    print("fig10 tree, half duplex premises hold:", report.ok)
    for v in report.violations:
        print("    violation:", v)
    g = build_conflict_graph(full, "III")
    sizes = [len(c) for c in connected_components(g)]
    print(f"fig10 tree, full duplex: cliques of sizes {sizes}")
    print("    R =", max_rate(RateInstance.from_network(full, g)).R)


if __name__ == "__main__":
    main()
