"""Compare the even-walk detector with the brute-force oracle on every small multigraph.

    python scripts/exhaustive_walk_check.py --vertices 5 --edges 6
"""

import argparse
import json
import sys
import time
from collections import Counter

from addrep.smallgraphs import all_multigraphs
from addrep.walkgraph import brute_force_even_walk, detect_even_closed_walk


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vertices", type=int, default=5)
    ap.add_argument("--edges", type=int, default=6)
    ap.add_argument("--no-loops", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    tally = Counter()
    mismatches = []
    for G in all_multigraphs(args.vertices, args.edges, loops=not args.no_loops):
        found = detect_even_closed_walk(G).found
        oracle = brute_force_even_walk(G) is not None
        tally["even_walk" if found else "none"] += 1
        if found != oracle:
            mismatches.append(G.to_dict())
    print(
        json.dumps(
            {
                "config": vars(args),
                "classes": sum(tally.values()),
                "verdicts": dict(tally),
                "mismatches": mismatches,
                "seconds": round(time.perf_counter() - t0, 2),
            },
            indent=2,
        )
    )
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
