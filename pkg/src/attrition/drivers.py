"""Per-employee key drivers.

Every prediction decomposes into a baseline plus one signed contribution
per feature: walking an employee down each tree, the probability change
across a split is credited to the feature tested there. Averaged over the
forest this gives bias + sum(deltas) = predicted probability, the identity
the report format is built on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DataError, ModelError
from .features import FALLBACK_DIMENSION, FeatureCodec
from .forest import DecisionTree, Forest, predict_proba
from .forest.backend import get_backend
from .linreg import RegressionModel, predict_ttl


@dataclass(frozen=True)
class Contribution:
    feature: str
    dimension: str
    delta: float

    def to_dict(self) -> dict[str, Any]:
        return {"feature": self.feature, "dimension": self.dimension,
                "delta": self.delta}


@dataclass
class DriverReport:
    bias: float
    contributions: list[Contribution]
    prediction: float
    top_reasons: list[str] = field(default_factory=list)

    def delta_total(self) -> float:
        return sum(c.delta for c in self.contributions)

    def to_dict(self) -> dict[str, Any]:
        return {
            "bias": self.bias,
            "contributions": [c.to_dict() for c in self.contributions],
            "prediction": self.prediction,
            "top_reasons": list(self.top_reasons),
        }


def _as_vector(x: Any, n_features: int) -> np.ndarray:
    values = np.ascontiguousarray(getattr(x, "values", x), dtype=np.float64)
    if values.shape != (n_features,):
        raise ModelError(
            f"feature vector shape {values.shape} does not match {n_features} features")
    return values


def tree_path_contributions(tree: DecisionTree,
                            x: Any) -> tuple[float, dict[int, float]]:
    """(root probability, feature index -> summed probability change)
    along x's decision path. Features off the path never enter the map.
    """
    values = np.ascontiguousarray(getattr(x, "values", x), dtype=np.float64)
    bias = float(tree.prob[0])
    deltas: dict[int, float] = {}
    node = 0
    while tree.feature[node] >= 0:
        f = int(tree.feature[node])
        if values[f] <= tree.threshold[node]:
            nxt = int(tree.left[node])
        else:
            nxt = int(tree.right[node])
        deltas[f] = deltas.get(f, 0.0) + float(tree.prob[nxt] - tree.prob[node])
        node = nxt
    return bias, deltas


def _resolve_dimensions(feature_names: Sequence[str],
                        dimensions: Any) -> list[str]:
    if dimensions is None:
        return [FALLBACK_DIMENSION] * len(feature_names)
    if isinstance(dimensions, Mapping):
        return [dimensions.get(n, FALLBACK_DIMENSION) for n in feature_names]
    if len(dimensions) != len(feature_names):
        raise ModelError(
            f"{len(dimensions)} dimensions for {len(feature_names)} features")
    return list(dimensions)


def forest_contributions(forest: Forest, x: Any,
                         dimensions: Any = None) -> DriverReport:
    """Driver report for one employee: per-tree path contributions
    averaged across the forest. dimensions may be a sequence aligned with
    the forest's feature names, a name -> dimension mapping, or None.
    """
    values = _as_vector(x, forest.n_features)
    kern = get_backend()
    n_trees = len(forest.trees)
    if n_trees == 0:
        raise ModelError("forest has no trees")
    acc_bias = 0.0
    acc_delta = np.zeros(forest.n_features, dtype=np.float64)
    for tree in forest.trees:
        b, d = kern.path_deltas(tree.feature, tree.threshold, tree.left,
                                tree.right, tree.prob, values)
        acc_bias += float(b)
        acc_delta += d
    bias = acc_bias / n_trees
    acc_delta /= n_trees

    dims = _resolve_dimensions(forest.feature_names, dimensions)
    contributions = [
        Contribution(feature=forest.feature_names[j], dimension=dims[j],
                     delta=float(acc_delta[j]))
        for j in range(forest.n_features) if acc_delta[j] != 0.0
    ]
    return DriverReport(bias=bias, contributions=contributions,
                        prediction=float(predict_proba(forest, values)))


def merge_onehot_siblings(report: DriverReport,
                          codec: FeatureCodec) -> list[Contribution]:
    """Sum the deltas of one-hot columns born from the same source column.

    The merged list keeps the completeness identity: per-group sums
    rearrange the same addends.
    """
    source_of = dict(zip(codec.feature_names, codec.source_columns))
    onehot_sources = {r.column for r in codec.rules if r.kind == "onehot"}
    merged: dict[str, Contribution] = {}
    order: list[str] = []
    for c in report.contributions:
        source = source_of.get(c.feature, c.feature)
        key = source if source in onehot_sources else c.feature
        if key in merged:
            prev = merged[key]
            merged[key] = Contribution(feature=key, dimension=prev.dimension,
                                       delta=prev.delta + c.delta)
        else:
            merged[key] = Contribution(feature=key, dimension=c.dimension,
                                       delta=c.delta)
            order.append(key)
    return [merged[k] for k in order]


def top_reasons(report: DriverReport, k: int, codec: FeatureCodec,
                templates: Mapping[str, str],
                values: Mapping[str, Any] | None = None) -> list[str]:
    """k human-readable reasons, largest |delta| first, ties alphabetical.

    One-hot siblings are merged before ranking. Wording carries the flag:
    positive deltas render as pushing toward attrition ("increases"),
    negative ones as protective. Each reason is annotated with its
    dimension in square brackets.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    merged = merge_onehot_siblings(report, codec)
    ranked = sorted(merged, key=lambda c: (-abs(c.delta), c.feature))[:k]

    out = []
    for c in ranked:
        value = None if values is None else values.get(c.feature)
        direction = "increases" if c.delta >= 0 else "decreases"
        points = f"{abs(c.delta) * 100:.1f}"
        template = templates.get(c.feature)
        text = None
        if template is not None:
            try:
                text = template.format(value=value, direction=direction,
                                       delta_points=points)
            except (KeyError, IndexError):
                text = None
        if text is None:
            shown = f"{c.feature} = {value}" if value is not None else c.feature
            text = f"{shown} {direction} attrition risk by {points} points"
        out.append(f"{text} [{c.dimension}]")
    return out


def tenure_contributions(model: RegressionModel, x: Any,
                         dimensions: Any = None) -> DriverReport:
    """Additive view of the tenure prediction.

    Each feature contributes coefficient * (value - training mean); the
    bias is the model's prediction for the training-mean employee, so
    bias + sum(terms) equals predict_ttl up to rounding.
    """
    values = _as_vector(x, len(model.feature_names))
    terms = model.coefficients * (values - model.feature_means)
    bias = model.intercept + float(model.coefficients @ model.feature_means)
    dims = _resolve_dimensions(model.feature_names, dimensions)
    contributions = [
        Contribution(feature=model.feature_names[j], dimension=dims[j],
                     delta=float(terms[j]))
        for j in range(len(model.feature_names)) if terms[j] != 0.0
    ]
    return DriverReport(bias=bias, contributions=contributions,
                        prediction=predict_ttl(model, values))
