"""How the multicast rate on a line depends on its length.

Run with ``python3 demos/line_throughput.py``.  The gaps grow by 1/20
per hop starting at 3/5, so each node reaches only its successor and
each hop blocks just its neighbours.  Spatial reuse keeps the rate at 1/2 for
every length, while one transmission per slot decays as 1/(n-1).
"""

from fractions import Fraction

from clawsched import RateInstance, build_conflict_graph, build_orthogonal_graph, max_rate
from clawsched.netmodel import line_network


def main() -> None:
    print(" n  conflict-aware  one-per-slot")
    for n in range(3, 11):
        gaps = [Fraction(3, 5) + Fraction(k, 20) for k in range(n - 1)]
        net = line_network(gaps, r_T=1, reach_limit=2)
        g = build_conflict_graph(net, "I")
        shared = max_rate(RateInstance.from_network(net, g)).R
        single = max_rate(RateInstance.from_network(net, build_orthogonal_graph(g.vertices))).R
        print(f"{n:2d}  {str(shared):>14}  {str(single):>12}")


if __name__ == "__main__":
    main()
