"""Representation functions r(A, n), gap extraction and the even-closed-walk criterion."""

from .numset import NaturalSet, counting, generate, interval_count, rep_count, scan_hypothesis
from .extract import run_extraction, build_rep_table, verify_trace
from .walkgraph import MultiGraph, detect_even_closed_walk, brute_force_even_walk, lemma3_check
from .bounds import bound_report, thm1_bound

__version__ = "0.1.0"
