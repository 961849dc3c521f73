"""Exit criteria, one test per criterion; a PASS/FAIL line per criterion is
printed in the terminal summary."""

import io
import json
import math
import random
import time
from fractions import Fraction

import numpy as np

from addrep.bounds import bound_report, bp_bound, thm1_bound
from addrep.cli import main
from addrep.errors import DoublingFailure, NoGapFound, PatchFailure
from addrep.extract import (
    build_partition_sets,
    build_rep_table,
    lemma2_step,
    patch_for_hypothesis,
    replay_trace,
    run_extraction,
    verify_containments,
    verify_growth,
    verify_step_counts,
)
from addrep.numset import NaturalSet, generate, scan_hypothesis, write_set_file
from addrep.smallgraphs import all_multigraphs, random_multigraph
from addrep.walkgraph import (
    MultiGraph,
    brute_force_even_walk,
    build_gk,
    detect_even_closed_walk,
    is_nontrivial_even_closed_walk,
    lemma3_check,
)

from conftest import brute_rep_table, record, sparse_set


def test_c1_detector_matches_oracle_exhaustively():
    t0 = time.perf_counter()
    graphs = mismatches = 0
    for G in all_multigraphs(5, 6):
        graphs += 1
        if detect_even_closed_walk(G).found != (brute_force_even_walk(G) is not None):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed <= 300
    record("C1 walk-detector oracle equivalence", ok, f"{graphs} classes, {mismatches} mismatches, {elapsed:.1f}s")
    assert ok


def test_c2_lemma3_on_random_multigraphs():
    rng = random.Random(20240601)
    t0 = time.perf_counter()
    bad = bad_witness = no_walk = 0
    for _ in range(10_000):
        G = random_multigraph(rng, 12, 18)
        v = detect_even_closed_walk(G)
        if v.found:
            bad_witness += not is_nontrivial_even_closed_walk(G, v.walk)
        else:
            no_walk += 1
            bad += len(G.edges) > len(G.vertices)
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and bad_witness == 0 and elapsed <= 60
    record(
        "C2 Lemma 3 property",
        ok,
        f"10000 graphs, {no_walk} without even walk, {bad} with |E|>|V|, {bad_witness} bad witnesses, {elapsed:.1f}s",
    )
    assert ok


def test_c3_paper_fixtures():
    bowtie = MultiGraph(range(5), [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    triangle = MultiGraph(range(3), [(0, 1), (1, 2), (2, 0)])
    loop = MultiGraph([0], [(0, 0)])
    v = detect_even_closed_walk(bowtie)
    ok = (
        v.found
        and len(v.walk) == 6
        and is_nontrivial_even_closed_walk(bowtie, v.walk)
        and not detect_even_closed_walk(triangle).found
        and not detect_even_closed_walk(loop).found
    )
    record("C3 paper fixtures", ok, f"bowtie walk length {len(v.walk) if v.found else None}")
    assert ok


def test_c4_extraction_reproduction():
    A = generate("powers(2)", 2**14)
    t0 = time.perf_counter()
    t = run_extraction(A, 10**4, a0=1)
    elapsed = time.perf_counter() - t0
    ok = (
        t.m == 4
        and t.a == (4, 16, 64, 256)
        and t.b == (1, 5, 21, 85)
        and t.a == tuple(4**k for k in range(1, 5))
        and t.b == tuple((4**k - 1) // 3 for k in range(1, 5))
        and replay_trace(A, t).passed
        and elapsed <= 1.0
    )
    record("C4 extraction reproduction", ok, f"a={t.a} b={t.b} {elapsed * 1000:.1f}ms")
    assert ok


def test_c5_correct_rejection(tmp_path):
    A = generate("powers(2)", 2**14)
    t = run_extraction(A, 10**4, a0=1)
    table = build_rep_table(A, t)
    steps = verify_step_counts(A, t)
    k4 = steps["step_count[4]"]
    set_file, trace_file = tmp_path / "p2.txt", tmp_path / "trace.json"
    write_set_file(A, set_file)
    code_extract = main(["extract", "--input", str(set_file), "--x", "10000", "--out", str(trace_file)])
    out = io.StringIO()
    code_verify = main(["verify", "--input", str(set_file), "--trace", str(trace_file)], stdout=out)
    rep = json.loads(out.getvalue())
    cli_k4 = [c for c in rep["step_counts"]["checks"] if c["name"] == "step_count[4]"][0]
    ok = (
        len(table.violations) == 6
        and k4.passed is False
        and k4.detail["count"] == 2
        and k4.detail["interval"] == [85, 341]
        and code_extract == 3
        and code_verify == 3
        and cli_k4["passed"] is False
        and cli_k4["count"] == 2
    )
    record(
        "C5 correct rejection",
        ok,
        f"{len(table.violations)} violations, |A∩(85,341]|={k4.detail['count']}<4, exit codes {code_extract}/{code_verify}",
    )
    assert ok


def test_c6_scan_matches_brute_force():
    rng = np.random.default_rng(6)
    mismatches = 0
    for trial in range(100):
        expo = float(rng.uniform(0.3, 0.9))
        A = generate(f"random({expo})", 10**4, seed=trial)
        r = brute_rep_table(A.elements, A.horizon)
        w = scan_hypothesis(A, 0, A.horizon)
        expect = tuple(n for n in range(A.horizon + 1) if r[n] == 1)
        zeros = sum(1 for n in range(A.horizon + 1) if r[n] == 0)
        mismatches += (w.exceptional != expect) + (w.zero_count != zeros)
    ok = mismatches == 0
    record("C6 hypothesis scan exactness", ok, f"100 sets, {mismatches} mismatches")
    assert ok


def test_c7_lemma2_guarantee():
    rng = random.Random(7)
    successes = failures = trials = 0
    while trials < 1000:
        trials += 1
        A = sparse_set(rng, 20_000)
        els = set(A.elements)
        b = rng.choice(A.elements[: max(1, len(A) // 2)])
        try:
            a, _ = lemma2_step(A, b, 10_000)
        except (NoGapFound, DoublingFailure):
            continue
        successes += 1
        cnt = sum(1 for e in A.elements if b < e <= a + b)
        ok_step = (
            a > 3 * b
            and not any(n in els for n in range(a - b, a))
            and Fraction(cnt) >= Fraction(a + b, 2 * b) - 1
        )
        failures += not ok_step
    ok = failures == 0 and successes >= 500
    record("C7 per-step Lemma 2 guarantee", ok, f"{trials} trials, {successes} successes, {failures} failures")
    assert ok


def test_c8_bound_formulas():
    v = thm1_bound(10**6)
    grid = np.logspace(math.log10(16), 12, 1000)
    worst = max(abs(thm1_bound(x) - 1452 * bp_bound(x)) / math.ulp(thm1_bound(x)) for x in grid)
    verdicts = set()
    for spec in ("evens", "powers(2)", "powers(10)", "ap(1,1000)", "random(0.9)"):
        A = generate(spec, 10**5, seed=1)
        for x in (16, 100, 10**3, 10**4, 10**5):
            verdicts.add(bound_report(A, x).verdict)
    ok = 13.83 <= v <= 13.85 and worst <= 1.0 and "refuted" not in verdicts
    record("C8 bound formulas", ok, f"thm1(1e6)={v:.6f}, worst ratio error {worst:.2f} ulp, verdicts {sorted(verdicts)}")
    assert ok


def test_c9_patched_pipeline():
    A = generate("powers(2)", 2**14)
    try:
        res = patch_for_hypothesis(A, 10**4, 10)
    except PatchFailure as exc:
        ok = bool(exc.diagnostics)
        record("C9 pipeline integration", ok, f"no convergence; diagnostics: {exc}")
        assert ok
        return
    P, t = res.set, res.trace
    table = build_rep_table(P, t)
    per_k = []
    for k in range(1, t.m + 1):
        sets = build_partition_sets(t, table, k)
        cont = verify_containments(P, t, sets, table)
        l3 = lemma3_check(build_gk(sets, table, k))
        per_k.append(cont.passed and not l3.verdict.found)
    ok = (
        not table.violations
        and all(per_k)
        and verify_step_counts(P, t).passed
        and verify_growth(t).passed
    )
    record(
        "C9 pipeline integration",
        ok,
        f"converged in {res.rounds} round(s), {len(res.insertions)} insertions, per-k {per_k}",
    )
    assert ok
