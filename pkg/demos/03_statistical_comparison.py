"""Friedman test and Nemenyi groups over several streams.

Run with ``python demos/03_statistical_comparison.py``. Takes about a minute.
"""
import numpy as np

from driftlab.classifiers import CART, HDDT, GaussianNB
from driftlab.ensembles import AWE, HDWE
from driftlab.evaluation import mean_scores, test_then_train
from driftlab.stats import rank_summary
from driftlab.streams import StreamConfig, generate_stream


def methods():
    return {
        "HDWE-GNB": HDWE(GaussianNB()),
        "HDWE-CART": HDWE(CART(max_depth=6)),
        "HDWE-HDDT": HDWE(HDDT(max_depth=6)),
        "AWE-HDDT": AWE(HDDT(max_depth=6)),
    }


rows = []
for i, (ratio, kind) in enumerate((r, k) for r in (0.03, 0.05, 0.10, 0.20) for k in ("sudden", "incremental")):
    cfg = StreamConfig(n_chunks=40, chunk_size=300, minority_ratio=ratio, drift_kind=kind, seed=100 + i)
    tensor = test_then_train(generate_stream(cfg), methods(), ["gmean"])
    rows.append(mean_scores(tensor)[:, 0])
    print(f"{kind:>11} {ratio:.2f}  " + "  ".join(f"{v:.3f}" for v in rows[-1]))

names = list(methods())
summary = rank_summary(np.array(rows), names)
print("\naverage ranks (higher is better):")
for name, r in sorted(zip(names, summary.avg_ranks), key=lambda t: -t[1]):
    print(f"  {name:>10}  {r:.3f}")
f = summary.friedman
print(f"friedman chi2 = {f.statistic:.3f}, p = {f.p_value:.4f}, reject = {f.reject}")
print(f"nemenyi cd = {summary.cd:.3f}")
print("groups not significantly different:", summary.groups)
