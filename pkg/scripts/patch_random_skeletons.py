"""Patch random Lemma-1 skeletons and verify the full pipeline on each result.

    python scripts/patch_random_skeletons.py --trials 50 --x 100000 --seed 0 --out results.json
"""

import argparse
import json
import random
import sys
from collections import Counter

from addrep.errors import MathematicalFailure, PatchFailure
from addrep.extract import patch_for_hypothesis, run_extraction, verify_trace
from addrep.numset import NaturalSet


def sparse_set(rng, horizon):
    """Consecutive-element ratio in (1, 2], so every (t, 2t] is hit."""
    out = [rng.randint(1, 8)]
    while True:
        nxt = out[-1] + rng.randint(1, out[-1])
        if nxt > horizon:
            break
        out.append(nxt)
    return NaturalSet(out, horizon)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--x", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-rounds", type=int, default=10)
    ap.add_argument("--out")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    outcomes = Counter()
    rows = []
    for trial in range(args.trials):
        A = sparse_set(rng, 2 * args.x)
        row = {"trial": trial, "size": len(A)}
        try:
            row["m_before"] = run_extraction(A, args.x).m
            res = patch_for_hypothesis(A, args.x, args.max_rounds)
        except PatchFailure as exc:
            row["outcome"] = "patch_failure"
            row["reason"] = str(exc)
        except MathematicalFailure as exc:
            row["outcome"] = "no_trace"
            row["reason"] = f"{type(exc).__name__}: {exc}"
        else:
            report = verify_trace(res.set, res.trace)
            row.update(
                outcome="verified" if report["passed"] else "verify_failed",
                rounds=res.rounds,
                insertions=len(res.insertions),
                m=res.trace.m,
            )
        outcomes[row["outcome"]] += 1
        rows.append(row)
    summary = {"config": vars(args), "outcomes": dict(outcomes), "trials": rows}
    text = json.dumps(summary, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(json.dumps(summary["outcomes"]))
    return 1 if outcomes["verify_failed"] else 0


if __name__ == "__main__":
    sys.exit(main())
