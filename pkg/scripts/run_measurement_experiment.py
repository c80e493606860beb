#!/usr/bin/env python3
"""Desk-scale validity experiment for the measurement pipeline.

Runs two bot cohorts that differ only in whether they remember revealed
items (the experience-knowledge mechanism), prints the pooled repeated-item
accuracy deltas, and then the full hypothesis report for a mixed cohort.

Usage:
    python3 scripts/run_measurement_experiment.py --seed 15 --n 30
"""

import argparse

from phishgame.assessment import format_report_text, test_hypotheses
from phishgame.corpus import GenerationSpec, default_brands, generate_corpus
from phishgame.simulation import make_cohort, run_cohort
from phishgame.stats import wilcoxon_signed_rank


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=15)
    ap.add_argument("--n", type=int, default=30, help="bots per cohort")
    ap.add_argument("--corpus-size", type=int, default=120)
    args = ap.parse_args()

    brands = default_brands()
    corpus = generate_corpus(brands, GenerationSpec(seed=args.seed, count=args.corpus_size))

    for memory in (True, False):
        cohort = make_cohort(args.n, seed=args.seed, memory=memory,
                             learning_rate=0.0, accuracy_range=(0.3, 0.55),
                             prefix="m")
        records = run_cohort(cohort, corpus, 66)
        deltas = [r.metrics.heuristic_delta for r in records
                  if r.metrics.heuristic_delta is not None]
        _stat, p = wilcoxon_signed_rank(deltas)
        label = "memory-on " if memory else "memory-off"
        print(f"{label}: mean repeated-item delta {sum(deltas) / len(deltas):+.3f} "
              f"(signed-rank p={p:.4f}, n={len(deltas)})")

    print()
    mixed = make_cohort(args.n, seed=args.seed + 1)
    records = run_cohort(mixed, corpus, 777)
    print(format_report_text(test_hypotheses(records), records))


if __name__ == "__main__":
    main()
