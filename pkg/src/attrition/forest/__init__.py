"""Bagged forest of CART-style decision trees.

Probability of leaving is the mean leaf probability across trees. Training
is deterministic: every random draw comes from a splitmix64 stream seeded
per tree from (master seed, tree index), so the same params and data give
the same forest bit for bit, serial or parallel, numba or numpy backend.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from ..errors import DataError, ModelError
from . import kernels_numpy
from .backend import DISABLE_ENV, backend_name, get_backend, reset_backend
from .rng import MASK64, derive_stream_seed, sm64_next

__all__ = [
    "TrainParams", "DecisionTree", "Forest",
    "gini", "best_split", "grow_tree", "train_forest",
    "predict_proba", "classify",
    "backend_name", "reset_backend", "DISABLE_ENV",
]

POSITIVE_LABEL = "Yes"
NEGATIVE_LABEL = "No"


@dataclass(frozen=True)
class TrainParams:
    n_trees: int = 200
    max_depth: int | None = None
    min_samples_leaf: int = 2
    features_per_split: int | str = "sqrt"
    bootstrap: bool = True
    seed: int = 42
    class_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ModelError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ModelError(f"max_depth must be >= 0 or None, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ModelError(
                f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        fps = self.features_per_split
        if isinstance(fps, str):
            if fps not in ("sqrt", "all"):
                raise ModelError(
                    f"features_per_split must be 'sqrt', 'all' or a count, got {fps!r}")
        elif fps < 1:
            raise ModelError(f"features_per_split must be >= 1, got {fps}")
        if not 0.0 < self.class_threshold < 1.0:
            raise ModelError(
                f"class_threshold must lie in (0, 1), got {self.class_threshold}")

    def resolve_k(self, n_features: int) -> int:
        """Feature subset size for a design matrix of n_features columns."""
        fps = self.features_per_split
        if fps == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if fps == "all":
            return n_features
        if fps > n_features:
            raise ModelError(
                f"features_per_split={fps} exceeds the {n_features} available features")
        return int(fps)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "features_per_split": self.features_per_split,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "class_threshold": self.class_threshold,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrainParams":
        return cls(
            n_trees=int(doc["n_trees"]),
            max_depth=None if doc["max_depth"] is None else int(doc["max_depth"]),
            min_samples_leaf=int(doc["min_samples_leaf"]),
            features_per_split=(doc["features_per_split"]
                                if isinstance(doc["features_per_split"], str)
                                else int(doc["features_per_split"])),
            bootstrap=bool(doc["bootstrap"]),
            seed=int(doc["seed"]),
            class_threshold=float(doc["class_threshold"]),
        )


@dataclass(frozen=True)
class DecisionTree:
    """Flat-array tree. feature[i] == -1 marks node i as a leaf.

    prob holds the Yes-fraction at every node, internal ones included,
    because driver attribution reads probabilities along the whole path.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    prob: np.ndarray
    count: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        out = 0
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
            elif depths[node] > out:
                out = int(depths[node])
        return out

    def leaf_probability(self, x: np.ndarray) -> float:
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return float(self.prob[node])

    def validate(self) -> None:
        n = self.n_nodes
        for arr in (self.threshold, self.left, self.right, self.prob, self.count):
            if arr.shape[0] != n:
                raise ModelError("tree arrays disagree on node count")
        for node in range(n):
            if self.feature[node] >= 0:
                lid, rid = int(self.left[node]), int(self.right[node])
                if not (0 < lid < n and 0 < rid < n):
                    raise ModelError(f"internal node {node} has a missing child")
                if self.count[lid] + self.count[rid] != self.count[node]:
                    raise ModelError(
                        f"child sample counts do not sum at node {node}")
            elif self.left[node] != -1 or self.right[node] != -1:
                raise ModelError(f"leaf node {node} has children")
            if not 0.0 <= self.prob[node] <= 1.0:
                raise ModelError(f"node {node} probability outside [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "prob": self.prob.tolist(),
            "count": self.count.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "DecisionTree":
        return cls(
            feature=np.asarray(doc["feature"], dtype=np.int32),
            threshold=np.asarray(doc["threshold"], dtype=np.float64),
            left=np.asarray(doc["left"], dtype=np.int32),
            right=np.asarray(doc["right"], dtype=np.int32),
            prob=np.asarray(doc["prob"], dtype=np.float64),
            count=np.asarray(doc["count"], dtype=np.int64),
        )


@dataclass
class Forest:
    trees: list[DecisionTree]
    feature_names: tuple[str, ...]
    params: TrainParams
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def validate(self) -> None:
        if len(self.trees) != self.params.n_trees:
            raise ModelError(
                f"forest holds {len(self.trees)} trees, params say {self.params.n_trees}")
        for tree in self.trees:
            tree.validate()

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "feature_names": list(self.feature_names),
            "metrics": dict(self.metrics),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Forest":
        return cls(
            trees=[DecisionTree.from_dict(t) for t in doc["trees"]],
            feature_names=tuple(doc["feature_names"]),
            params=TrainParams.from_dict(doc["params"]),
            metrics=dict(doc["metrics"]),
        )


def gini(class_counts: Mapping[str, int]) -> float:
    """Gini impurity of a node, 1 - sum of squared class fractions."""
    total = 0
    for label, c in class_counts.items():
        if c < 0:
            raise DataError(f"negative count for class {label!r}")
        total += c
    if total == 0:
        raise DataError("gini of an empty node is undefined")
    out = 1.0
    for c in class_counts.values():
        frac = c / total
        out -= frac * frac
    return out


def _as_matrix(X: Any) -> np.ndarray:
    arr = np.ascontiguousarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise DataError(f"expected a 2-d sample matrix, got ndim={arr.ndim}")
    return arr


def _as_labels(y: Any, n: int) -> np.ndarray:
    arr = np.asarray(y)
    if arr.dtype.kind in ("U", "S", "O"):
        arr = np.asarray([1 if v == POSITIVE_LABEL else 0 for v in arr.tolist()])
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    if arr.shape != (n,):
        raise DataError(f"labels shape {arr.shape} does not match {n} samples")
    if not np.isin(arr, (0, 1)).all():
        raise DataError("labels must be 0/1 or No/Yes")
    return arr


def best_split(X: Any, y: Any, candidate_features: Iterable[int] | None = None,
               min_samples_leaf: int = 1) -> tuple[int, float, float] | None:
    """Best (feature, midpoint threshold, impurity decrease) over the
    candidates, or None when no split has a positive decrease or a child
    would fall under min_samples_leaf. Ties break toward the lower feature
    index, then the lower threshold.
    """
    X = _as_matrix(X)
    y = _as_labels(y, X.shape[0])
    n = X.shape[0]
    if n < 2:
        return None
    n_yes = int(y.sum())
    if n_yes == 0 or n_yes == n:
        return None
    p = n_yes / n
    q = (n - n_yes) / n
    parent = 1.0 - p * p - q * q

    if candidate_features is None:
        cand: Sequence[int] = range(X.shape[1])
    else:
        cand = sorted(set(int(f) for f in candidate_features))
    best = None
    best_dec = 0.0
    for f in cand:
        dec, thr = kernels_numpy.scan_feature(
            X[:, f], y, n_yes, parent, min_samples_leaf)
        if dec > best_dec:
            best_dec = dec
            best = (int(f), float(thr), float(dec))
    return best


def _grow_with_state(X: np.ndarray, y: np.ndarray, params: TrainParams,
                     sample_idx: np.ndarray, state: int) -> DecisionTree:
    kern = get_backend()
    max_depth = -1 if params.max_depth is None else params.max_depth
    k = params.resolve_k(X.shape[1])
    out = kern.grow(X, y, sample_idx, max_depth, params.min_samples_leaf,
                    k, np.uint64(state & MASK64))
    feature, threshold, left, right, prob, count, _ = out
    return DecisionTree(feature=feature, threshold=threshold, left=left,
                        right=right, prob=prob, count=count)


def grow_tree(X: Any, y: Any, params: TrainParams, tree_seed: int,
              sample_idx: np.ndarray | None = None) -> DecisionTree:
    """Grow one tree on the given samples.

    Resampling is the forest's job; this trains on the rows as passed
    (or on sample_idx when given). tree_seed seeds the stream that draws
    the per-node feature subsets.
    """
    X = _as_matrix(X)
    y = _as_labels(y, X.shape[0])
    if X.shape[0] == 0:
        raise DataError("cannot grow a tree from zero samples")
    if sample_idx is None:
        sample_idx = np.arange(X.shape[0], dtype=np.int64)
    else:
        sample_idx = np.ascontiguousarray(sample_idx, dtype=np.int64)
    return _grow_with_state(X, y, params, sample_idx, tree_seed)


def _build_forest_tree(X: np.ndarray, y: np.ndarray, params: TrainParams,
                       index: int) -> DecisionTree:
    n = X.shape[0]
    state = derive_stream_seed(params.seed, index)
    if params.bootstrap:
        idx = np.empty(n, dtype=np.int64)
        for j in range(n):
            state, z = sm64_next(state)
            idx[j] = z % n
    else:
        idx = np.arange(n, dtype=np.int64)
    return _grow_with_state(X, y, params, idx, state)


def train_forest(X: Any, y: Any, params: TrainParams,
                 feature_names: Sequence[str] | None = None,
                 n_jobs: int = 1) -> Forest:
    """Train params.n_trees bagged trees.

    Tree i draws its bootstrap rows and feature subsets from a stream
    seeded by (params.seed, i), so build order cannot change the result;
    n_jobs > 1 only spreads tree builds across threads.
    """
    X = _as_matrix(X)
    y = _as_labels(y, X.shape[0])
    if X.shape[0] == 0:
        raise DataError("cannot train on an empty dataset")
    if int(y.sum()) in (0, X.shape[0]):
        raise DataError("training data holds a single class, need both Yes and No")
    params.resolve_k(X.shape[1])
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(X.shape[1]))
    elif len(feature_names) != X.shape[1]:
        raise DataError(
            f"{len(feature_names)} feature names for {X.shape[1]} columns")

    if n_jobs <= 1:
        trees = [_build_forest_tree(X, y, params, i)
                 for i in range(params.n_trees)]
    else:
        trees: list[DecisionTree | None] = [None] * params.n_trees
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            futures = {pool.submit(_build_forest_tree, X, y, params, i): i
                       for i in range(params.n_trees)}
            for fut, i in futures.items():
                trees[i] = fut.result()
    return Forest(trees=list(trees), feature_names=tuple(feature_names),
                  params=params)


def _vector_to_row(x: Any, n_features: int) -> np.ndarray:
    values = getattr(x, "values", x)
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim == 1:
        if arr.shape[0] != n_features:
            raise ModelError(
                f"feature vector has {arr.shape[0]} values, forest expects {n_features}")
        return arr.reshape(1, n_features)
    if arr.ndim == 2:
        if arr.shape[1] != n_features:
            raise ModelError(
                f"matrix has {arr.shape[1]} columns, forest expects {n_features}")
        return arr
    raise ModelError(f"cannot score an array of ndim={arr.ndim}")


def predict_proba(forest: Forest, x: Any) -> float | np.ndarray:
    """Mean leaf probability across trees; scalar for a single vector,
    array for a matrix of rows.
    """
    if not forest.trees:
        raise ModelError("forest has no trees")
    rows = _vector_to_row(x, forest.n_features)
    kern = get_backend()
    acc = np.zeros(rows.shape[0], dtype=np.float64)
    for tree in forest.trees:
        acc += kern.predict(tree.feature, tree.threshold, tree.left,
                            tree.right, tree.prob, rows)
    acc /= len(forest.trees)
    values = getattr(x, "values", x)
    if np.asarray(values).ndim == 1:
        return float(acc[0])
    return acc


def classify(p: float, threshold: float) -> str:
    """Yes iff p >= threshold; the boundary counts as Yes."""
    if not 0.0 < threshold < 1.0:
        raise ModelError(f"threshold must lie in (0, 1), got {threshold}")
    if not 0.0 <= p <= 1.0:
        raise ModelError(f"probability outside [0, 1]: {p}")
    return POSITIVE_LABEL if p >= threshold else NEGATIVE_LABEL
