"""Random spaced lines and the claws they can still contain.

Run with ``python3 demos/spaced_line_claw.py``.  Every sampled line keeps
three consecutive gaps above r_T and at most two forward neighbours per
node.  The script counts how many conflict graphs still contain a claw,
prints the first one, and shows that the exact solver covers those cases.
"""

import random
from fractions import Fraction

from clawsched import build_conflict_graph, find_claw, mwis_exact
from clawsched.netmodel import line_network


def spaced_gaps(rng: random.Random, n: int) -> list[Fraction]:
    while True:
        gaps = [Fraction(rng.randint(1, 1000), 1000) for _ in range(n - 1)]
        if all(sum(gaps[k : k + 3]) > 1 for k in range(n - 3)):
            return gaps


def main(trials: int = 200, seed: int = 1) -> None:
    rng = random.Random(seed)
    first = None
    claws = 0
    for _ in range(trials):
        gaps = spaced_gaps(rng, rng.randint(5, 12))
        g = build_conflict_graph(line_network(gaps, r_T=1, reach_limit=2), "I")
        witness = find_claw(g)
        if witness is not None:
            claws += 1
            first = first or (gaps, g, witness)
    print(f"{claws} of {trials} spaced lines have a claw")
    if first is not None:
        gaps, g, witness = first
        print("gaps:", ", ".join(str(x) for x in gaps))
        print("claw:", witness.describe(g))
        res = mwis_exact(g)
        print("exact MWIS:", ", ".join(g.label(v) for v in sorted(res.members)), f"(weight {res.weight})")


if __name__ == "__main__":
    main()
