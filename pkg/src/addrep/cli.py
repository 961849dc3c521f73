"""Command-line entry point: ``addrep <command> [options]``.

Exit codes: 0 success, 2 input or contract error, 3 expected mathematical
negative (hypothesis violated, no gap found, ...), 4 internal invariant breach.
Every JSON document echoes the effective configuration under ``config``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from . import bounds, extract, numset, walkgraph
from .errors import AddrepError, InvariantBreach, PatchFailure, SpecError

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_INTERNAL = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    trace: Optional[str] = None
    spec: Optional[str] = None
    out: Optional[str] = None
    horizon: Optional[int] = None
    x: Optional[int] = None
    n0: int = 1
    a0: Optional[int] = None
    n_lo: Optional[int] = None
    n_hi: Optional[int] = None
    seed: Optional[int] = None
    nrs_c: float = 1.0
    format: str = "json"
    oracle: bool = False
    block_cap: Optional[int] = None
    max_rounds: int = 10

    def validate(self) -> None:
        needs = {
            "gen": ("spec", "horizon"),
            "scan": ("input", "n_lo", "n_hi"),
            "extract": ("input", "x"),
            "verify": ("input", "trace"),
            "walk": ("input",),
            "bounds": ("input", "x"),
            "patch": ("input", "x", "out"),
        }[self.command]
        missing = [n for n in needs if getattr(self, n) is None]
        if missing:
            raise SpecError(f"{self.command}: missing " + ", ".join("--" + m.replace("_", "-") for m in missing))
        if self.format not in ("json", "text"):
            raise SpecError(f"unknown format {self.format!r}")
        if self.nrs_c <= 0:
            raise SpecError("--nrs-c must be positive")
        if self.max_rounds < 0:
            raise SpecError("--max-rounds must be >= 0")


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _render_text(doc, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for key, val in doc.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_text(val, indent + 1))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                lines.append(_render_text(item, indent + 1) + "\n")
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(lines)


def _emit(doc: dict, cfg: RunConfig, stream) -> None:
    if cfg.format == "json":
        stream.write(json.dumps(doc, indent=2) + "\n")
    else:
        stream.write(_render_text(doc) + "\n")


def cmd_gen(cfg: RunConfig) -> tuple[dict, int]:
    A = numset.generate(cfg.spec, cfg.horizon, cfg.seed)
    if cfg.out:
        tmp = Path(cfg.out).with_suffix(".tmp")
        numset.write_set_file(A, tmp)
        os.replace(tmp, cfg.out)
    doc = {"size": len(A), "horizon": A.horizon, "out": cfg.out}
    if not cfg.out:
        doc["elements"] = list(A.elements)
    return doc, EXIT_OK


def cmd_scan(cfg: RunConfig) -> tuple[dict, int]:
    A = numset.read_set_file(cfg.input)
    return numset.scan_hypothesis(A, cfg.n_lo, cfg.n_hi).to_dict(), EXIT_OK


def cmd_extract(cfg: RunConfig) -> tuple[dict, int]:
    A = numset.read_set_file(cfg.input)
    regime = extract.regime_report(A, cfg.x)
    trace = extract.run_extraction(A, cfg.x, a0=cfg.a0, n0=cfg.n0, block_cap=cfg.block_cap)
    table = extract.build_rep_table(A, trace)
    doc = trace.to_dict()
    doc["regime"] = regime
    doc["pairs"] = table.to_list()
    replay = extract.replay_trace(A, trace)
    doc["checks"] = {"replay": replay.to_dict(), "violations": len(table.violations)}
    if not replay.passed:
        raise InvariantBreach("freshly built trace fails its own replay")
    return doc, EXIT_MATH if table.violations else EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    A = numset.read_set_file(cfg.input)
    try:
        tdoc = json.loads(Path(cfg.trace).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise SpecError(f"cannot read trace {cfg.trace}: {exc}") from exc
    trace = extract.ExtractionTrace.from_dict(tdoc)
    table = extract.RepPairTable.from_list(trace.m, tdoc["pairs"]) if "pairs" in tdoc else None
    report = extract.verify_trace(A, trace, table)
    return report, EXIT_OK if report["passed"] else EXIT_MATH


def cmd_walk(cfg: RunConfig) -> tuple[dict, int]:
    G = walkgraph.read_graph_file(cfg.input)
    verdict = walkgraph.detect_even_closed_walk(G)
    doc = verdict.to_dict()
    doc["lemma3"] = walkgraph.lemma3_check(G).to_dict()
    if cfg.oracle:
        witness = walkgraph.brute_force_even_walk(G)
        doc["oracle"] = {
            "verdict": "even_walk" if witness else "none",
            "walk": witness.to_list() if witness else None,
            "agrees": (witness is not None) == verdict.found,
        }
        if not doc["oracle"]["agrees"]:
            raise InvariantBreach("detector and brute-force oracle disagree")
    return doc, EXIT_OK


def cmd_bounds(cfg: RunConfig) -> tuple[dict, int]:
    A = numset.read_set_file(cfg.input)
    scan_from = cfg.n0 if cfg.n_lo is None else cfg.n_lo
    rep = bounds.bound_report(A, cfg.x, cfg.nrs_c, scan_from=scan_from)
    return rep.to_dict(), EXIT_OK


def cmd_patch(cfg: RunConfig) -> tuple[dict, int]:
    A = numset.read_set_file(cfg.input)
    try:
        res = extract.patch_for_hypothesis(A, cfg.x, cfg.max_rounds, a0=cfg.a0, n0=cfg.n0)
    except PatchFailure as exc:
        return {"converged": False, "error": str(exc), "diagnostics": exc.diagnostics}, EXIT_MATH
    numset.write_set_file(res.set, cfg.out)
    return {
        "converged": True,
        "rounds": res.rounds,
        "insertions": res.insertions,
        "size": len(res.set),
        "trace": res.trace.to_dict(),
    }, EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "scan": cmd_scan,
    "extract": cmd_extract,
    "verify": cmd_verify,
    "walk": cmd_walk,
    "bounds": cmd_bounds,
    "patch": cmd_patch,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="addrep", description="Additive representation functions toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", default="json", choices=["json", "text"])
        sp.add_argument("--out", help="output file (written atomically)")

    g = sub.add_parser("gen", help="generate a set file")
    g.add_argument("spec", help="family, e.g. 'powers(2)', 'ap(3,5)', 'random(0.5)', 'evens'")
    g.add_argument("--horizon", type=int)
    g.add_argument("--seed", type=int)
    common(g)

    s = sub.add_parser("scan", help="find n with r(A, n) = 1 in a window")
    s.add_argument("--input")
    s.add_argument("--n-lo", type=int)
    s.add_argument("--n-hi", type=int)
    common(s)

    e = sub.add_parser("extract", help="build the b_k/a_k trace and representation pairs")
    e.add_argument("--input")
    e.add_argument("--x", type=int)
    e.add_argument("--n0", type=int, default=1)
    e.add_argument("--a0", type=int)
    e.add_argument("--block-cap", type=int)
    common(e)

    v = sub.add_parser("verify", help="re-check a trace against a set")
    v.add_argument("--trace", help="trace JSON written by extract")
    v.add_argument("--input")
    common(v)

    w = sub.add_parser("walk", help="decide if a multigraph has a nontrivial even closed walk")
    w.add_argument("--input")
    w.add_argument("--oracle", action="store_true", help="cross-check with brute force")
    common(w)

    b = sub.add_parser("bounds", help="compare |A(x)| with the bound formulas")
    b.add_argument("--input")
    b.add_argument("--x", type=int)
    b.add_argument("--nrs-c", type=float, default=1.0)
    b.add_argument("--n0", type=int, default=1)
    common(b)

    pt = sub.add_parser("patch", help="insert pairs until extracted pair-sums have r != 1")
    pt.add_argument("--input")
    pt.add_argument("--x", type=int)
    pt.add_argument("--n0", type=int, default=1)
    pt.add_argument("--a0", type=int)
    pt.add_argument("--max-rounds", type=int, default=10)
    common(pt)
    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args = vars(ns)
    cfg = RunConfig(**{k: v for k, v in args.items() if k in RunConfig.__dataclass_fields__})
    try:
        cfg.validate()
        doc, code = COMMANDS[cfg.command](cfg)
    except AddrepError as exc:
        doc, code = {"error": type(exc).__name__, "message": str(exc)}, exc.exit_code
    except AssertionError as exc:
        doc, code = {"error": "InvariantBreach", "message": str(exc)}, EXIT_INTERNAL
    doc["config"] = asdict(cfg)
    doc["exit_code"] = code
    if cfg.out and cfg.command not in ("gen", "patch"):
        text = json.dumps(doc, indent=2) + "\n" if cfg.format == "json" else _render_text(doc) + "\n"
        _atomic_write(cfg.out, text)
    else:
        _emit(doc, cfg, stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
