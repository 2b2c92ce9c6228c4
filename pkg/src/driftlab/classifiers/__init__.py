"""Batch base learners used as ensemble members."""
from ..errors import InvalidInputError
from .base import BinaryClassifier, support_to_labels
from .bayes import GaussianNB
from .neighbors import KNeighbors
from .tree import (
    CART,
    HDDT,
    DecisionTree,
    TreeNode,
    best_split,
    fit_tree,
    gini_gain,
    hddt_split_score,
)

BASE_CLASSIFIERS = ("GNB", "CART", "HDDT", "KNN")


def make_classifier(name, **params) -> BinaryClassifier:
    """Build a base learner by short name (GNB, CART, HDDT, KNN)."""
    key = name.upper()
    if key == "GNB":
        return GaussianNB(**params)
    if key == "CART":
        return CART(**params)
    if key == "HDDT":
        return HDDT(**params)
    if key == "KNN":
        return KNeighbors(**params)
    raise InvalidInputError(f"unknown base classifier {name!r}; expected one of {BASE_CLASSIFIERS}")


__all__ = [
    "BASE_CLASSIFIERS",
    "BinaryClassifier",
    "CART",
    "DecisionTree",
    "GaussianNB",
    "HDDT",
    "KNeighbors",
    "TreeNode",
    "best_split",
    "fit_tree",
    "gini_gain",
    "hddt_split_score",
    "make_classifier",
    "support_to_labels",
]
