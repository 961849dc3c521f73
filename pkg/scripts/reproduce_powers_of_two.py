"""Run the whole pipeline on A = {1, 2, 4, ...}: extraction, rejection, patching.

    python scripts/reproduce_powers_of_two.py [--x 10000] [--horizon 16384]
"""

import argparse
import json

from addrep.bounds import bound_report
from addrep.errors import PatchFailure
from addrep.extract import build_rep_table, patch_for_hypothesis, regime_report, run_extraction, verify_trace
from addrep.numset import generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--x", type=int, default=10**4)
    ap.add_argument("--horizon", type=int, default=2**14)
    ap.add_argument("--max-rounds", type=int, default=10)
    args = ap.parse_args()

    A = generate("powers(2)", args.horizon)
    trace = run_extraction(A, args.x, a0=1)
    table = build_rep_table(A, trace)
    raw = verify_trace(A, trace, table)
    out = {
        "config": vars(args),
        "regime": regime_report(A, args.x),
        "trace": {"a": trace.a, "b": trace.b, "m": trace.m, "threshold": trace.threshold},
        "violations": [n for _, n in table.violations],
        "failed_step_counts": [
            {k: c[k] for k in ("name", "interval", "count", "needed")}
            for c in raw["step_counts"]["checks"]
            if c["passed"] is False
        ],
        "bounds": bound_report(A, args.x, scan_from=4).to_dict(),
    }
    try:
        res = patch_for_hypothesis(A, args.x, args.max_rounds)
    except PatchFailure as exc:
        out["patch"] = {"converged": False, "error": str(exc)}
    else:
        out["patch"] = {
            "converged": True,
            "rounds": res.rounds,
            "insertions": res.insertions,
            "verified": verify_trace(res.set, res.trace)["passed"],
        }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
