"""Rank-based comparison of several methods over many streams.

Ranks are oriented so that the best method on a stream gets rank ``k`` (the
largest), ties share mid-ranks. The Friedman statistic is the classical
chi-square form; the Nemenyi critical difference uses the two-tailed
studentized-range-derived constants ``q_alpha`` for k = 2..10.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import InvalidInputError, UnsupportedConfigurationError

#: q_alpha for the Nemenyi test, indexed by number of methods k = 2..10.
NEMENYI_Q = {
    0.05: (1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164),
    0.10: (1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920),
}


def rank_methods(scores):
    """Rank methods per stream (rows) by score; best = k, ties get mid-ranks.

    Returns ``(ranks, average_ranks)``.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] < 1 or scores.shape[1] < 2:
        raise InvalidInputError("need a (streams, methods) matrix with >= 1 stream and >= 2 methods")
    if not np.isfinite(scores).all():
        raise InvalidInputError("scores must be finite")
    ranks = sps.rankdata(scores, axis=1)
    return ranks, ranks.mean(axis=0)


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    critical_value: float
    p_value: float
    reject: bool


def friedman_test(avg_ranks, n_streams, alpha=0.05) -> FriedmanResult:
    """Friedman chi-square statistic from average ranks, with k - 1 degrees of freedom."""
    r = np.asarray(avg_ranks, dtype=float)
    k = r.size
    if k < 2 or n_streams < 2:
        raise InvalidInputError("Friedman test needs k >= 2 methods and N >= 2 streams")
    stat = 12.0 * n_streams / (k * (k + 1)) * (float(np.sum(r ** 2)) - k * (k + 1) ** 2 / 4.0)
    stat = max(stat, 0.0)
    crit = float(sps.chi2.ppf(1.0 - alpha, k - 1))
    return FriedmanResult(stat, crit, float(sps.chi2.sf(stat, k - 1)), stat > crit)


def nemenyi_q(k, alpha=0.05) -> float:
    if alpha not in NEMENYI_Q:
        raise UnsupportedConfigurationError(f"alpha must be one of {sorted(NEMENYI_Q)}, got {alpha}")
    if not 2 <= k <= 10:
        raise UnsupportedConfigurationError(f"Nemenyi table covers 2..10 methods, got {k}")
    return NEMENYI_Q[alpha][k - 2]


def nemenyi_cd(k, n_streams, alpha=0.05) -> float:
    """Critical difference ``q_alpha * sqrt(k (k + 1) / (6 N))``."""
    if n_streams < 2:
        raise InvalidInputError("need N >= 2 streams")
    return nemenyi_q(k, alpha) * math.sqrt(k * (k + 1) / (6.0 * n_streams))


def cd_groups(avg_ranks, cd) -> list[tuple[int, ...]]:
    """Maximal runs of methods (in rank order) whose rank spread is within ``cd``.

    Returns tuples of method indices, each sorted by rank; every method
    appears in at least one group.
    """
    r = np.asarray(avg_ranks, dtype=float)
    order = np.argsort(r, kind="stable")
    sr = r[order]
    groups = []
    last_end = -1
    for i in range(len(sr)):
        j = i
        while j + 1 < len(sr) and sr[j + 1] - sr[i] <= cd:
            j += 1
        if j > last_end:
            groups.append(tuple(int(x) for x in order[i:j + 1]))
            last_end = j
    return groups


@dataclass
class RankSummary:
    methods: list[str]
    n_streams: int
    avg_ranks: list[float]
    friedman: FriedmanResult
    alpha: float
    cd: float
    groups: list[list[str]] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.methods)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k"] = self.k
        return d


def rank_summary(scores, methods, alpha=0.05) -> RankSummary:
    """Full pipeline: ranks, Friedman test, Nemenyi CD and groups."""
    scores = np.asarray(scores, dtype=float)
    if scores.shape[1] != len(methods):
        raise InvalidInputError("one column per method expected")
    _, avg = rank_methods(scores)
    n = scores.shape[0]
    fr = friedman_test(avg, n, alpha)
    cd = nemenyi_cd(len(methods), n, alpha)
    groups = [[methods[i] for i in g] for g in cd_groups(avg, cd)]
    return RankSummary(list(methods), n, [float(v) for v in avg], fr, alpha, cd, groups)


def cd_diagram_geometry(summary: RankSummary) -> dict:
    """Layout data for a critical-difference diagram.

    Only groups with two or more members get a connector bar.
    """
    rank_of = dict(zip(summary.methods, summary.avg_ranks))
    bars = []
    for g in summary.groups:
        if len(g) > 1:
            lo = min(rank_of[m] for m in g)
            hi = max(rank_of[m] for m in g)
            bars.append({"methods": list(g), "from": lo, "to": hi})
    return {
        "axis": {"min": 1, "max": summary.k},
        "cd": summary.cd,
        "alpha": summary.alpha,
        "methods": [{"name": m, "rank": r} for m, r in
                    sorted(rank_of.items(), key=lambda kv: (kv[1], kv[0]))],
        "bars": bars,
    }
