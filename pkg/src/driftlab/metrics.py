"""Confusion-matrix based scores for binary, imbalanced problems.

Label 1 is always the positive (minority) class. Any ratio whose denominator
is zero evaluates to 0 so that scoring stays total on degenerate chunks.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidInputError

METRIC_NAMES = (
    "accuracy",
    "recall",
    "specificity",
    "precision",
    "f1",
    "bac",
    "gmean",
    "fpr",
    "fnr",
)
#: Optional extra score: Hellinger distance between (TPR, FPR), range [0, sqrt(2)].
HD_METRIC = "hd"
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def tpr(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def fpr(self) -> float:
        return _ratio(self.fp, self.fp + self.tn)


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    recall: float
    specificity: float
    precision: float
    f1: float
    bac: float
    gmean: float
    fpr: float
    fnr: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _ratio(num, den) -> float:
    return float(num) / float(den) if den else 0.0


def confusion_matrix(y_true, y_pred) -> ConfusionMatrix:
    """Count TP/FP/FN/TN with label 1 as the positive class.

    Raises
    ------
    InvalidInputError
        On empty or mismatched inputs, or labels outside {0, 1}.
    """
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    if y_true.shape != y_pred.shape:
        raise InvalidInputError(
            f"length mismatch: {y_true.size} true labels vs {y_pred.size} predictions"
        )
    if y_true.size == 0:
        raise InvalidInputError("cannot build a confusion matrix from empty input")
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if not np.isin(arr, (0, 1)).all():
            raise InvalidInputError(f"{name} contains labels outside {{0, 1}}")
    t = y_true == 1
    p = y_pred == 1
    return ConfusionMatrix(
        tp=int(np.count_nonzero(t & p)),
        fp=int(np.count_nonzero(~t & p)),
        fn=int(np.count_nonzero(t & ~p)),
        tn=int(np.count_nonzero(~t & ~p)),
    )


def metric_report(cm: ConfusionMatrix) -> MetricReport:
    """Compute the nine threshold metrics from a confusion matrix."""
    if min(cm.tp, cm.fp, cm.fn, cm.tn) < 0:
        raise InvalidInputError("confusion matrix counts must be non-negative")
    if cm.total == 0:
        raise InvalidInputError("confusion matrix is empty")
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    return MetricReport(
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        recall=recall,
        specificity=specificity,
        precision=precision,
        f1=_ratio(2.0 * precision * recall, precision + recall),
        bac=(recall + specificity) / 2.0,
        gmean=math.sqrt(recall * specificity),
        fpr=_ratio(cm.fp, cm.fp + cm.tn),
        fnr=_ratio(cm.fn, cm.fn + cm.tp),
    )


def hellinger_distance(tpr: float, fpr: float) -> float:
    """Hellinger distance between the (TPR, 1-TPR) and (FPR, 1-FPR) distributions.

    Depends only on per-class rates, so it is insensitive to class priors.
    Ranges from 0 (no discrimination) to sqrt(2) (perfect separation).
    """
    for name, v in (("tpr", tpr), ("fpr", fpr)):
        if not 0.0 <= v <= 1.0:
            raise InvalidInputError(f"{name}={v!r} outside [0, 1]")
    a = math.sqrt(tpr) - math.sqrt(fpr)
    b = math.sqrt(1.0 - tpr) - math.sqrt(1.0 - fpr)
    return math.sqrt(a * a + b * b)


def score(y_true, y_pred, metrics=METRIC_NAMES) -> dict[str, float]:
    """Evaluate the named metrics (``"hd"`` allowed) for one prediction vector."""
    cm = confusion_matrix(y_true, y_pred)
    report = metric_report(cm).as_dict()
    out = {}
    for name in metrics:
        if name == HD_METRIC:
            out[name] = hellinger_distance(cm.tpr, cm.fpr)
        elif name in report:
            out[name] = report[name]
        else:
            raise InvalidInputError(f"unknown metric {name!r}")
    return out
