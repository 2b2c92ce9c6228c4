"""Seeded synthetic binary streams with concept drift and class imbalance.

A concept is a pair of class-conditional Gaussian cluster mixtures over the
informative dimensions, with cluster centres on vertices of a scaled
hypercube. Redundant features are fixed random linear combinations of the
informative ones. Drifts switch (sudden) or blend (incremental) between
consecutive concepts; the minority prior is either constant or follows a
cosine schedule that swaps the classes at mid-stream.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidInputError

MINORITY_RATIOS = (0.01, 0.03, 0.05, 0.10, 0.15, 0.20, 0.25)


@dataclass(frozen=True, eq=False)
class Chunk:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise InvalidInputError(
                f"chunk needs a 2-D feature matrix with one label per row, "
                f"got X{self.X.shape} and y{self.y.shape}"
            )

    def __len__(self):
        return self.X.shape[0]

    def __iter__(self):
        # allows ``X, y = chunk``
        return iter((self.X, self.y))

    @property
    def minority_fraction(self) -> float:
        return float(np.mean(self.y == 1)) if len(self) else 0.0


@dataclass(frozen=True)
class StreamConfig:
    """Recipe for one reproducible synthetic stream.

    ``n_samples`` is derived as ``n_chunks * chunk_size``. ``label_sampling``
    is ``"iid"`` (labels drawn independently from the prior) or ``"quota"``
    (exactly ``round(prior * chunk_size)`` positives per chunk).
    """

    n_chunks: int = 200
    chunk_size: int = 500
    n_informative: int = 15
    n_redundant: int = 5
    n_drifts: int = 5
    drift_kind: Literal["sudden", "incremental"] = "sudden"
    imbalance_mode: Literal["static", "dynamic"] = "static"
    minority_ratio: float = 0.10
    seed: int = 0
    n_clusters_per_class: int = 2
    class_sep: float = 1.0
    label_sampling: Literal["iid", "quota"] = "iid"
    transition_width: float | None = None

    def __post_init__(self):
        if self.n_chunks < 1 or self.chunk_size < 1:
            raise InvalidInputError("n_chunks and chunk_size must be positive")
        if self.n_informative < 1 or self.n_redundant < 0:
            raise InvalidInputError("need >= 1 informative and >= 0 redundant features")
        if not 0.0 < self.minority_ratio < 0.5:
            raise InvalidInputError(f"minority_ratio must lie in (0, 0.5), got {self.minority_ratio}")
        if self.drift_kind not in ("sudden", "incremental"):
            raise InvalidInputError(f"unknown drift_kind {self.drift_kind!r}")
        if self.imbalance_mode not in ("static", "dynamic"):
            raise InvalidInputError(f"unknown imbalance_mode {self.imbalance_mode!r}")
        if self.label_sampling not in ("iid", "quota"):
            raise InvalidInputError(f"unknown label_sampling {self.label_sampling!r}")
        if self.n_drifts < 0 or (self.n_drifts and self.n_drifts >= self.n_chunks):
            raise InvalidInputError("n_drifts must be >= 0 and smaller than n_chunks")
        if self.n_clusters_per_class < 1:
            raise InvalidInputError("n_clusters_per_class must be >= 1")
        if 2 * self.n_clusters_per_class > 2 ** self.n_informative:
            raise InvalidInputError("not enough hypercube vertices for the requested clusters")

    @property
    def n_features(self) -> int:
        return self.n_informative + self.n_redundant

    @property
    def n_samples(self) -> int:
        return self.n_chunks * self.chunk_size

    @property
    def width(self) -> float:
        return self.transition_width if self.transition_width else self.n_chunks / 10.0

    def drift_positions(self) -> list[int]:
        return drift_positions(self.n_chunks, self.n_drifts)

    def to_dict(self) -> dict:
        return asdict(self)


def drift_positions(n_chunks, n_drifts) -> list[int]:
    """Evenly spaced drift chunks ``round(j * n_chunks / (n_drifts + 1))``, half rounded up."""
    return [int(math.floor(j * n_chunks / (n_drifts + 1) + 0.5)) for j in range(1, n_drifts + 1)]


def minority_prior(chunk_index, config: StreamConfig) -> float:
    """Probability of the positive class in chunk ``chunk_index``.

    Static streams keep ``minority_ratio``. Dynamic streams follow
    ``0.5 - (0.5 - r) * cos(2 pi t / (n_chunks - 1))``: the ratio at both
    ends, even classes at a quarter and three quarters, swapped at mid-stream.
    """
    if not 0 <= chunk_index < config.n_chunks:
        raise InvalidInputError(f"chunk index {chunk_index} outside [0, {config.n_chunks})")
    r = config.minority_ratio
    if config.imbalance_mode == "static" or config.n_chunks == 1:
        return r
    return 0.5 - (0.5 - r) * math.cos(2.0 * math.pi * chunk_index / (config.n_chunks - 1))


def _sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def concept_mixture_weight(chunk_index, drift_positions, drift_kind="sudden", width=20.0) -> float:
    """Weight of the incoming concept around the drift nearest to ``chunk_index``.

    ``drift_positions`` may be a single position or a sorted sequence; ties in
    distance go to the later drift. Sudden drifts are a step (1 from the drift
    chunk on), incremental ones a logistic ramp ``sigmoid(4 (t - t_d) / width)``.
    """
    return _nearest_drift(chunk_index, drift_positions, drift_kind, width)[1]


def _nearest_drift(t, positions, kind, width):
    positions = [positions] if np.isscalar(positions) else list(positions)
    if not positions:
        return 0, 0.0
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise InvalidInputError("drift positions must be strictly increasing")
    j = min(range(len(positions)), key=lambda i: (abs(t - positions[i]), -i))
    td = positions[j]
    if kind == "sudden":
        w = 1.0 if t >= td else 0.0
    elif kind == "incremental":
        w = _sigmoid(4.0 * (t - td) / width)
    else:
        raise InvalidInputError(f"unknown drift kind {kind!r}")
    return j, w


@dataclass
class Concept:
    centers: np.ndarray  # (2, n_clusters, n_informative)


@dataclass
class SyntheticStream:
    """Generated chunks together with the recipe and the hidden structure."""

    config: StreamConfig
    chunks: list[Chunk]
    concepts: list[Concept] = field(repr=False)
    redundant_weights: np.ndarray = field(repr=False)

    def __iter__(self):
        return iter(self.chunks)

    def __len__(self):
        return len(self.chunks)

    def __getitem__(self, i):
        return self.chunks[i]


def _draw_concept(rng, config):
    n_centers = 2 * config.n_clusters_per_class
    d = config.n_informative
    # distinct hypercube vertices; rejection is cheap since 2**d >> n_centers
    vertices = set()
    rows = []
    while len(rows) < n_centers:
        v = tuple(rng.integers(0, 2, size=d).tolist())
        if v not in vertices:
            vertices.add(v)
            rows.append(v)
    centers = (2.0 * np.array(rows, dtype=float) - 1.0) * config.class_sep
    return Concept(centers.reshape(2, config.n_clusters_per_class, d))


def generate_stream(config: StreamConfig) -> SyntheticStream:
    """Generate every chunk of the stream described by ``config``.

    All randomness flows from ``config.seed``; equal configs give
    bit-identical output.
    """
    rng = np.random.default_rng(config.seed)
    concepts = [_draw_concept(rng, config) for _ in range(config.n_drifts + 1)]
    redundant = rng.uniform(-1.0, 1.0, size=(config.n_informative, config.n_redundant))
    positions = config.drift_positions()
    chunks = []
    for t in range(config.n_chunks):
        n = config.chunk_size
        p = minority_prior(t, config)
        if config.label_sampling == "quota":
            y = np.zeros(n, dtype=np.int64)
            y[: int(math.floor(p * n + 0.5))] = 1
            y = rng.permutation(y)
        else:
            y = (rng.random(n) < p).astype(np.int64)
        j, w = _nearest_drift(t, positions, config.drift_kind, config.width)
        concept_idx = np.where(rng.random(n) < w, j + 1, j)
        cluster = rng.integers(0, config.n_clusters_per_class, size=n)
        centers = np.stack([c.centers for c in concepts])
        informative = centers[concept_idx, y, cluster] + rng.standard_normal((n, config.n_informative))
        X = np.hstack([informative, informative @ redundant])
        chunks.append(Chunk(X, y))
    return SyntheticStream(config, chunks, concepts, redundant)
