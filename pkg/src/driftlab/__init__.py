"""Chunk-based ensembles for imbalanced, drifting binary data streams."""

__version__ = "0.1.0"

from .classifiers import make_classifier  # noqa: E402
from .ensembles import AWE, HDWE, SEA, make_ensemble  # noqa: E402
from .evaluation import ScoreTensor, mean_scores, test_then_train  # noqa: E402
from .metrics import confusion_matrix, hellinger_distance, metric_report  # noqa: E402
from .streams import Chunk, StreamConfig, generate_stream  # noqa: E402

__all__ = [
    "AWE",
    "Chunk",
    "HDWE",
    "SEA",
    "ScoreTensor",
    "StreamConfig",
    "confusion_matrix",
    "generate_stream",
    "hellinger_distance",
    "make_classifier",
    "make_ensemble",
    "mean_scores",
    "metric_report",
    "test_then_train",
]
