"""Per-chunk metrics and the Hellinger weight on a skewed toy problem.

Run with ``python demos/01_metrics_and_hellinger.py``.
"""
import numpy as np

from driftlab.metrics import confusion_matrix, hellinger_distance, metric_report

rng = np.random.default_rng(0)

# 1000 rows, 5% positives; a classifier that finds 70% of positives and
# raises a false alarm on 10% of negatives
y_true = (rng.random(1000) < 0.05).astype(int)
hit = rng.random(1000)
y_pred = np.where(y_true == 1, hit < 0.7, hit < 0.1).astype(int)

cm = confusion_matrix(y_true, y_pred)
print(cm)
for name, value in metric_report(cm).as_dict().items():
    print(f"{name:>12}  {value:.4f}")

# Accuracy rewards predicting the majority class. The Hellinger distance
# between (TPR, 1-TPR) and (FPR, 1-FPR) does not.
always_neg = confusion_matrix(y_true, np.zeros_like(y_true))
print("\nalways-negative accuracy:", round(metric_report(always_neg).accuracy, 4))
print("always-negative hellinger:", hellinger_distance(always_neg.tpr, always_neg.fpr))

# the same TPR/FPR give the same distance at any class ratio
for n_neg in (100, 1000, 10000):
    y = np.r_[np.ones(100, int), np.zeros(n_neg, int)]
    p = np.r_[np.ones(70, int), np.zeros(30, int), (np.arange(n_neg) < n_neg // 10).astype(int)]
    c = confusion_matrix(y, p)
    print(f"1:{n_neg // 100:<4} hellinger = {hellinger_distance(c.tpr, c.fpr):.6f}")
