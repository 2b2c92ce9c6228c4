"""HDWE against AWE on a stream with sudden drift and a dynamic class prior.

Run with ``python demos/02_hdwe_on_drifting_stream.py``. Takes about 20 s.
"""
import numpy as np

from driftlab.classifiers import HDDT, GaussianNB
from driftlab.ensembles import AWE, HDWE, SEA
from driftlab.evaluation import mean_scores, test_then_train
from driftlab.streams import StreamConfig, generate_stream

cfg = StreamConfig(n_chunks=100, chunk_size=500, minority_ratio=0.05,
                   imbalance_mode="dynamic", drift_kind="sudden", seed=3)
stream = generate_stream(cfg)
print("drifts at chunks", cfg.drift_positions())
print("minority fraction, every 10th chunk:",
      np.round([stream[t].minority_fraction for t in range(0, cfg.n_chunks, 10)], 3))

methods = {
    "HDWE-GNB": HDWE(GaussianNB()),
    "HDWE-HDDT": HDWE(HDDT(max_depth=6)),
    "AWE-HDDT": AWE(HDDT(max_depth=6)),
    "SEA-HDDT": SEA(HDDT(max_depth=6)),
}
tensor = test_then_train(stream, methods, ["bac", "gmean", "recall", "specificity"])

means = mean_scores(tensor)
print(f"\n{'':>10}" + "".join(f"{m:>13}" for m in tensor.metrics))
for name, row in zip(tensor.methods, means):
    print(f"{name:>10}" + "".join(f"{v:>13.4f}" for v in row))

# recovery after each drift: chunk t of the stream is tensor index t - 1
bac = tensor.series("HDWE-HDDT", "bac")
for d in cfg.drift_positions():
    print(f"drift {d:>3}: bac before {bac[d - 4:d - 1].mean():.3f}, "
          f"at {bac[d - 1:d + 2].mean():.3f}, after {bac[d + 4:d + 10].mean():.3f}")

ens = methods["HDWE-HDDT"]
print("\nfinal pool (born, weight):", [(m.born, round(m.weight, 3)) for m in ens.pool])
print("pruned members:", len(ens.prune_history))
