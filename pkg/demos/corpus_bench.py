"""Write the default corpus, run the experiment and summarize the CSV.

    python3 demos/corpus_bench.py [outdir]
"""

from __future__ import annotations

import csv
import os
import sys
import tempfile
from collections import defaultdict

from genus_dfvs.harness import ExperimentConfig, default_corpus, read_corpus, run_experiment, write_corpus


def main(outdir: str) -> None:
    corpus_dir = os.path.join(outdir, "corpus")
    write_corpus(default_corpus(), corpus_dir)
    report = os.path.join(outdir, "report.csv")
    with open(report, "w") as fh:
        run_experiment(read_corpus(corpus_dir), ExperimentConfig(), fh)
    with open(report) as fh:
        rows = list(csv.DictReader(fh))
    by_genus = defaultdict(list)
    for r in rows:
        by_genus[r["genus"]].append(r)
    print(f"{len(rows)} instances -> {report}")
    print(f"{'genus':>5} {'count':>5} {'valid':>5} {'max cost/lp':>11} {'max cost/opt':>12} {'max opt/pack':>12}")
    for gen in sorted(by_genus, key=int):
        rs = by_genus[gen]

        def mx(col):
            vals = [float(r[col]) for r in rs if r[col]]
            return f"{max(vals):.3f}" if vals else "-"

        valid = sum(r["valid"] == "true" for r in rs)
        print(f"{gen:>5} {len(rs):>5} {valid:>5} {mx('cost_over_lp'):>11} {mx('cost_over_opt'):>12} {mx('opt_over_packing'):>12}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="dfvs-bench-"))
