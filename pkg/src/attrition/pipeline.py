"""End-to-end workflow around one trained model artifact.

train_all splits the labeled roster, fits the codec, forest, and tenure
regression on the training side only, measures on the untouched holdout,
and packs everything into a ModelBundle. Scoring, what-if, and candidate
screening all read from that immutable bundle.
"""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping, Sequence

import numpy as np

from . import drivers as drivers_mod
from . import ingest
from .errors import AttritionError, DataError, SchemaError
from .features import (DemandTable, EncodeDiagnostics, FeatureCodec,
                       default_demand_table, default_taxonomy, derive_kpis,
                       encode, encode_matrix, fit_codec, load_demand_table,
                       load_taxonomy)
from .forest import TrainParams, classify, predict_proba, train_forest
from .ingest import EmployeeRecord, load_dataset, split_train_validation
from .linreg import (DEFAULT_RIDGE_EPS, TenurePrediction, fit_ols, lead_time,
                     predict_ttl)
from .model_store import ModelBundle, creation_stamp
from .schema import default_schema, load_schema

log = logging.getLogger(__name__)

# Columns that mechanically contain the regression target (current tenure
# is a component of every one of them), so fitting on them would predict
# tenure from tenure.
DEFAULT_TENURE_EXCLUDE = (
    "YearsAtCompany",
    "TotalWorkingYears",
    "YearsInCurrentRole",
    "YearsSinceLastPromotion",
    "YearsWithCurrManager",
)


@dataclass(frozen=True)
class TrainConfig:
    schema_path: str | None = None
    demand_path: str | None = None
    taxonomy_path: str | None = None
    split_ratio: float = 0.8
    stratify: bool = True
    params: TrainParams = field(default_factory=TrainParams)
    ridge_eps: float = DEFAULT_RIDGE_EPS
    top_k: int = 5
    tenure_exclude: tuple[str, ...] = DEFAULT_TENURE_EXCLUDE

    def __post_init__(self) -> None:
        if not 0.0 < self.split_ratio < 1.0:
            raise DataError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")
        if self.top_k < 1:
            raise DataError(f"top_k must be >= 1, got {self.top_k}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_path": self.schema_path,
            "demand_path": self.demand_path,
            "taxonomy_path": self.taxonomy_path,
            "split_ratio": self.split_ratio,
            "stratify": self.stratify,
            "params": self.params.to_dict(),
            "ridge_eps": self.ridge_eps,
            "top_k": self.top_k,
            "tenure_exclude": list(self.tenure_exclude),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrainConfig":
        return cls(
            schema_path=doc.get("schema_path"),
            demand_path=doc.get("demand_path"),
            taxonomy_path=doc.get("taxonomy_path"),
            split_ratio=float(doc.get("split_ratio", 0.8)),
            stratify=bool(doc.get("stratify", True)),
            params=TrainParams.from_dict(doc["params"]) if "params" in doc
            else TrainParams(),
            ridge_eps=float(doc.get("ridge_eps", DEFAULT_RIDGE_EPS)),
            top_k=int(doc.get("top_k", 5)),
            tenure_exclude=tuple(doc.get("tenure_exclude",
                                         DEFAULT_TENURE_EXCLUDE)),
        )


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    recall: float
    specificity: float
    precision: float
    tp: int
    fp: int
    tn: int
    fn: int
    regression_rmse: float | None
    regression_r_squared: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "recall": self.recall,
            "specificity": self.specificity,
            "precision": self.precision,
            "confusion": {"tp": self.tp, "fp": self.fp,
                          "tn": self.tn, "fn": self.fn},
            "regression_rmse": self.regression_rmse,
            "regression_r_squared": self.regression_r_squared,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "EvalMetrics":
        conf = doc["confusion"]
        return cls(
            accuracy=float(doc["accuracy"]),
            recall=float(doc["recall"]),
            specificity=float(doc["specificity"]),
            precision=float(doc["precision"]),
            tp=int(conf["tp"]), fp=int(conf["fp"]),
            tn=int(conf["tn"]), fn=int(conf["fn"]),
            regression_rmse=(None if doc.get("regression_rmse") is None
                             else float(doc["regression_rmse"])),
            regression_r_squared=(None if doc.get("regression_r_squared") is None
                                  else float(doc["regression_r_squared"])),
        )


@dataclass(frozen=True)
class ScoredEmployee:
    id: str
    attrition_probability: float
    label: str
    tenure: TenurePrediction
    drivers: drivers_mod.DriverReport
    scored_at: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "attrition_probability": self.attrition_probability,
            "label": self.label,
            "tenure": self.tenure.to_dict(),
            "drivers": self.drivers.to_dict(),
            "scored_at": self.scored_at,
        }


@dataclass(frozen=True)
class ScreeningResult:
    candidate_id: str
    fitment_score: float
    attrition_probability: float
    predicted_total_tenure: float
    drivers: drivers_mod.DriverReport

    def sort_key(self) -> tuple[float, float]:
        # Higher is better on both axes; callers sort descending.
        return (self.fitment_score, self.predicted_total_tenure)

    def to_dict(self) -> dict[str, Any]:
        return {
            "candidate_id": self.candidate_id,
            "fitment_score": self.fitment_score,
            "attrition_probability": self.attrition_probability,
            "predicted_total_tenure": self.predicted_total_tenure,
            "drivers": self.drivers.to_dict(),
        }


@contextmanager
def _stage(name: str):
    """Prefix errors from a pipeline stage so failures name their origin."""
    try:
        yield
    except AttritionError as exc:
        exc.args = (f"{name}: {exc}",)
        raise


_templates_cache: dict[str, str] | None = None


def default_reason_templates() -> dict[str, str]:
    global _templates_cache
    if _templates_cache is None:
        text = resources.files("attrition.config").joinpath(
            "reason_templates.json").read_text("utf-8")
        _templates_cache = json.loads(text)
    return _templates_cache


def _labels_of(records: Sequence[EmployeeRecord]) -> np.ndarray:
    missing = [r.id for r in records if r.attrition is None]
    if missing:
        shown = ", ".join(missing[:5])
        raise DataError(
            f"{len(missing)} records lack the attrition label (ids {shown})")
    return np.asarray([1 if r.attrition else 0 for r in records], dtype=np.int64)


def _encode_records(records: Sequence[EmployeeRecord], codec: FeatureCodec,
                    demand: DemandTable, job_role: str | None,
                    diagnostics: EncodeDiagnostics | None = None) -> np.ndarray:
    kpis = [derive_kpis(r, demand, job_role) for r in records]
    return encode_matrix(list(records), kpis, codec, diagnostics)


def _regression_feature_indices(codec: FeatureCodec,
                                exclude: Sequence[str]) -> list[int]:
    banned = set(exclude)
    return [i for i, src in enumerate(codec.source_columns)
            if src not in banned]


def train_all(dataset: str | Sequence[EmployeeRecord], config: TrainConfig,
              n_jobs: int = 1) -> tuple[ModelBundle, EvalMetrics]:
    """Full training run; returns the bundle plus holdout metrics."""
    with _stage("schema"):
        schema = (load_schema(config.schema_path) if config.schema_path
                  else default_schema())
    with _stage("ingest"):
        if isinstance(dataset, str):
            records = load_dataset(dataset, schema).records
        else:
            records = list(dataset)
        if not records:
            raise DataError("dataset is empty")
    with _stage("split"):
        train, valid = split_train_validation(
            records, config.split_ratio, config.params.seed,
            stratify=config.stratify)
    with _stage("config"):
        demand = (load_demand_table(config.demand_path) if config.demand_path
                  else default_demand_table())
        taxonomy = (load_taxonomy(config.taxonomy_path) if config.taxonomy_path
                    else default_taxonomy())
    with _stage("features"):
        codec = fit_codec(train, schema, taxonomy)
        X_train = _encode_records(train, codec, demand, schema.job_role)
        y_train = _labels_of(train)
    with _stage("forest"):
        forest = train_forest(X_train, y_train, config.params,
                              feature_names=codec.feature_names, n_jobs=n_jobs)
    with _stage("regression"):
        leaver_rows = [i for i, r in enumerate(train) if r.attrition]
        if len(leaver_rows) < 2:
            raise DataError(
                f"need >= 2 leavers in training to fit the tenure regression, "
                f"got {len(leaver_rows)}")
        reg_idx = _regression_feature_indices(codec, config.tenure_exclude)
        if not reg_idx:
            raise DataError("tenure_exclude removed every feature")
        X_reg = X_train[np.ix_(leaver_rows, reg_idx)]
        y_reg = np.asarray([train[i].years_at_company for i in leaver_rows])
        reg_names = [codec.feature_names[i] for i in reg_idx]
        regression = fit_ols(X_reg, y_reg, config.ridge_eps, reg_names)

    bundle = ModelBundle(
        schema=schema, codec=codec, taxonomy=taxonomy, demand=demand,
        forest=forest, regression=regression,
        train_config=config.to_dict(), metrics={},
        seed=config.params.seed, created_at=creation_stamp())
    with _stage("evaluate"):
        metrics = evaluate(bundle, valid)
    bundle.metrics = metrics.to_dict()
    forest.metrics = {
        "accuracy": metrics.accuracy, "recall": metrics.recall,
        "specificity": metrics.specificity, "precision": metrics.precision,
    }
    log.info("trained on %d rows, validated on %d: accuracy %.4f recall %.4f",
             len(train), len(valid), metrics.accuracy, metrics.recall)
    return bundle, metrics


def evaluate(bundle: ModelBundle, records: Sequence[EmployeeRecord]) -> EvalMetrics:
    """Classification and tenure metrics at the bundle's threshold."""
    if not records:
        raise DataError("cannot evaluate on zero records")
    y_true = _labels_of(records)
    X = _encode_records(records, bundle.codec, bundle.demand,
                        bundle.schema.job_role)
    probs = predict_proba(bundle.forest, X)
    threshold = bundle.forest.params.class_threshold
    y_pred = (probs >= threshold).astype(np.int64)

    tp = int(((y_true == 1) & (y_pred == 1)).sum())
    fn = int(((y_true == 1) & (y_pred == 0)).sum())
    tn = int(((y_true == 0) & (y_pred == 0)).sum())
    fp = int(((y_true == 0) & (y_pred == 1)).sum())
    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    specificity = tn / (tn + fp) if (tn + fp) > 0 else 0.0
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0

    reg_rmse = None
    reg_r2 = None
    leaver_rows = [i for i, r in enumerate(records) if r.attrition]
    if leaver_rows:
        reg_idx = _regression_feature_indices(
            bundle.codec, bundle.train_config.get("tenure_exclude",
                                                  DEFAULT_TENURE_EXCLUDE))
        X_reg = X[np.ix_(leaver_rows, reg_idx)]
        y_reg = np.asarray([records[i].years_at_company for i in leaver_rows])
        fitted = bundle.regression.intercept + X_reg @ bundle.regression.coefficients
        resid = fitted - y_reg
        reg_rmse = float(np.sqrt(np.mean(resid * resid)))
        ss_tot = float(np.sum((y_reg - y_reg.mean()) ** 2))
        reg_r2 = (0.0 if ss_tot == 0.0
                  else 1.0 - float(np.sum(resid * resid)) / ss_tot)
    return EvalMetrics(accuracy=accuracy, recall=recall,
                       specificity=specificity, precision=precision,
                       tp=tp, fp=fp, tn=tn, fn=fn,
                       regression_rmse=reg_rmse, regression_r_squared=reg_r2)


def _display_value(value: Any) -> Any:
    if isinstance(value, float):
        if value == int(value):
            return int(value)
        return round(value, 2)
    return value


def _reason_values(record: EmployeeRecord, bundle: ModelBundle) -> dict[str, Any]:
    out = {k: _display_value(v) for k, v in record.raw.items()}
    kpis = derive_kpis(record, bundle.demand, bundle.schema.job_role)
    for name, value in zip(
            ("SkillMarketDemand", "AvgPriorTenure", "MinPriorTenure",
             "MaxPriorTenure", "HasPriorExperience"),
            kpis.as_feature_values()):
        out[name] = _display_value(float(value))
    return out


def score_employee(bundle: ModelBundle, record: EmployeeRecord,
                   top_k: int | None = None) -> ScoredEmployee:
    """Probability, label, tenure outlook, and ranked drivers for one row."""
    if top_k is None:
        top_k = int(bundle.train_config.get("top_k", 5))
    kpis = derive_kpis(record, bundle.demand, bundle.schema.job_role)
    x = encode(record, kpis, bundle.codec)
    p = float(predict_proba(bundle.forest, x))
    label = classify(p, bundle.forest.params.class_threshold)

    report = drivers_mod.forest_contributions(
        bundle.forest, x, bundle.codec.dimensions)
    report.top_reasons = drivers_mod.top_reasons(
        report, top_k, bundle.codec, default_reason_templates(),
        _reason_values(record, bundle))

    reg_idx = _regression_feature_indices(
        bundle.codec, bundle.train_config.get("tenure_exclude",
                                              DEFAULT_TENURE_EXCLUDE))
    ttl = predict_ttl(bundle.regression, x.values[reg_idx])
    tenure = lead_time(ttl, record.years_at_company)
    return ScoredEmployee(id=record.id, attrition_probability=p, label=label,
                          tenure=tenure, drivers=report,
                          scored_at=creation_stamp())


def score_all(bundle: ModelBundle, records: Sequence[EmployeeRecord],
              top_k: int | None = None) -> list[ScoredEmployee]:
    return [score_employee(bundle, r, top_k) for r in records]


def whatif(bundle: ModelBundle, record: EmployeeRecord,
           overrides: Mapping[str, Any]
           ) -> tuple[ScoredEmployee, ScoredEmployee, dict[str, Any]]:
    """Score a record as-is and with columns overridden; report deltas."""
    schema = bundle.schema
    for column in overrides:
        if not schema.has_column(column):
            raise SchemaError(f"unknown override column {column!r}")
        if column == schema.target:
            raise SchemaError("cannot override the attrition label")
        if column == schema.id_column:
            raise SchemaError("cannot override the employee id")

    patched_raw = dict(record.raw)
    patched_raw.update({k: v for k, v in overrides.items()})
    patched, issues = ingest.record_from_mapping(patched_raw, schema)
    if patched is None:
        detail = "; ".join(str(i) for i in issues)
        raise DataError(f"override produced an invalid record: {detail}")

    before = score_employee(bundle, record)
    after = score_employee(bundle, patched)
    delta = {
        "probability": after.attrition_probability - before.attrition_probability,
        "ttl": after.tenure.ttl - before.tenure.ttl,
        "lead_time": after.tenure.lead_time - before.tenure.lead_time,
        "lead_time_raw": after.tenure.lead_time_raw - before.tenure.lead_time_raw,
        "label_changed": after.label != before.label,
    }
    return before, after, delta


def screen_candidate(bundle: ModelBundle,
                     candidate: Mapping[str, Any] | EmployeeRecord,
                     candidate_id: str | None = None) -> ScreeningResult:
    """Score an applicant: no attrition label, current tenure forced to 0."""
    schema = bundle.schema
    if isinstance(candidate, EmployeeRecord):
        raw: dict[str, Any] = dict(candidate.raw)
        if candidate_id is None:
            candidate_id = candidate.id
    else:
        raw = dict(candidate)
    raw.pop(schema.target, None)
    raw[schema.tenure] = 0.0

    record, issues = ingest.record_from_mapping(raw, schema)
    if record is None:
        detail = "; ".join(str(i) for i in issues)
        raise DataError(f"candidate record is invalid: {detail}")
    scored = score_employee(bundle, record)
    return ScreeningResult(
        candidate_id=candidate_id if candidate_id is not None else record.id,
        fitment_score=1.0 - scored.attrition_probability,
        attrition_probability=scored.attrition_probability,
        predicted_total_tenure=scored.tenure.ttl,
        drivers=scored.drivers,
    )


def rank_candidates(results: Sequence[ScreeningResult]) -> list[ScreeningResult]:
    """Best first: fitment score, then predicted tenure."""
    return sorted(results, key=lambda r: r.sort_key(), reverse=True)
