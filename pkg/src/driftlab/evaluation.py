"""Test-then-train evaluation of chunk-based learners."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidInputError, NotFittedError
from .metrics import HD_METRIC, METRIC_NAMES, score

log = logging.getLogger(__name__)


@dataclass
class ScoreTensor:
    """Per-chunk scores with axes (method, chunk, metric).

    Chunk ``i`` of the tensor is stream chunk ``i + 1``; the first stream
    chunk is used for training only. ``seconds`` holds the wall-clock time
    each method spent per chunk (test and train), for diagnostics only.
    """

    scores: np.ndarray
    methods: list[str]
    metrics: list[str]
    seconds: np.ndarray = field(repr=False, default=None)

    @property
    def n_chunks(self) -> int:
        return self.scores.shape[1]

    def series(self, method, metric) -> np.ndarray:
        return self.scores[self.methods.index(method), :, self.metrics.index(metric)]


def _as_xy(chunk):
    if hasattr(chunk, "X"):
        return chunk.X, chunk.y
    X, y = chunk
    return X, y


def _named(methods):
    if isinstance(methods, Mapping):
        return list(methods.items())
    out, seen = [], {}
    for m in methods:
        name = getattr(m, "name", type(m).__name__)
        seen[name] = seen.get(name, 0) + 1
        out.append((name if seen[name] == 1 else f"{name}-{seen[name]}", m))
    return out


def test_then_train(stream, methods, metrics: Sequence[str] = METRIC_NAMES) -> ScoreTensor:
    """Score every method on each chunk before letting it learn from that chunk.

    Parameters
    ----------
    stream : sequence of chunks
        Each item is a ``Chunk`` or an ``(X, y)`` pair; at least two.
    methods : mapping of name to learner, or list of learners
        Learners expose ``predict(X)`` and ``process_chunk(X, y)`` and must
        start untrained. Every method sees the identical chunk sequence.
    metrics : sequence of str
        Metric names from :data:`driftlab.metrics.METRIC_NAMES`, optionally
        ``"hd"``.

    A method that is not yet able to predict gets 0 on every metric for that
    chunk and the run continues.
    """
    chunks = list(stream)
    if len(chunks) < 2:
        raise InvalidInputError("test-then-train needs at least two chunks")
    metrics = list(metrics)
    for m in metrics:
        if m not in METRIC_NAMES and m != HD_METRIC:
            raise InvalidInputError(f"unknown metric {m!r}")
    named = _named(methods)
    if not named:
        raise InvalidInputError("no methods to evaluate")
    scores = np.zeros((len(named), len(chunks) - 1, len(metrics)))
    seconds = np.zeros((len(named), len(chunks)))
    for mi, (name, method) in enumerate(named):
        for t, chunk in enumerate(chunks):
            X, y = _as_xy(chunk)
            start = time.perf_counter()
            if t > 0:
                try:
                    pred = method.predict(X)
                except NotFittedError:
                    log.warning("%s could not predict chunk %d; scoring it as 0", name, t)
                else:
                    vals = score(y, pred, metrics)
                    scores[mi, t - 1] = [vals[m] for m in metrics]
            method.process_chunk(X, y)
            seconds[mi, t] = time.perf_counter() - start
    return ScoreTensor(scores, [n for n, _ in named], metrics, seconds)


test_then_train.__test__ = False  # keep pytest from collecting it


def mean_scores(tensor: ScoreTensor) -> np.ndarray:
    """Average over the chunk axis: a (method, metric) matrix."""
    if tensor.scores.size == 0:
        raise InvalidInputError("empty score tensor")
    return tensor.scores.mean(axis=1)
