"""
Ten-seed benchmark
==================

Runs ``benchmark.cfg`` (plain SVM, Wishart, SVM_SPL and SVM_SPLNC on ten
synthetic scenes) and prints the per-method mean overall accuracy and the
per-seed comparison of SVM_SPLNC against the plain SVM. All artefacts go to
``notebooks/benchmark_out/``.
"""

import os
from collections import defaultdict

import numpy as np

from splnc.experiment import run_experiment

here = os.path.dirname(os.path.abspath(__file__))
report = run_experiment(os.path.join(here, "benchmark.cfg"))

oa = defaultdict(dict)
for r in report.runs:
    oa[r.method][r.seed] = r.oa
for method, by_seed in oa.items():
    print(f"{method:>10}: mean OA {np.mean(list(by_seed.values())):.4f}")

seeds = sorted(oa["svm"])
wins = sum(oa["svm_splnc"][s] > oa["svm"][s] for s in seeds)
ties = sum(oa["svm_splnc"][s] == oa["svm"][s] for s in seeds)
print(f"svm_splnc beats svm on {wins}/{len(seeds)} seeds, ties on {ties}")
print(f"summary: {report.summary_path}")
