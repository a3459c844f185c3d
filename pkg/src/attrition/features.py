"""Feature engineering: derived KPIs, numeric encoding, dimension taxonomy.

Every fitted feature carries one of the six variable dimensions
(Environment, Financial, External, Work, Legal, Individual) so driver
reports can group reasons the way managers think about them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DataError, SchemaError
from .ingest import EmployeeRecord
from .schema import DatasetSchema

log = logging.getLogger(__name__)

DIMENSIONS = ("Environment", "Financial", "External", "Work", "Legal", "Individual")
FALLBACK_DIMENSION = "Individual"

KPI_DEMAND = "SkillMarketDemand"
KPI_AVG_PRIOR = "AvgPriorTenure"
KPI_MIN_PRIOR = "MinPriorTenure"
KPI_MAX_PRIOR = "MaxPriorTenure"
KPI_HAS_PRIOR = "HasPriorExperience"
KPI_NAMES = (KPI_DEMAND, KPI_AVG_PRIOR, KPI_MIN_PRIOR, KPI_MAX_PRIOR, KPI_HAS_PRIOR)


@dataclass(frozen=True)
class DerivedKpis:
    """Engineered per-employee KPIs.

    The prior-tenure numbers are estimates reconstructed from total
    experience minus current tenure; true per-employer tenures are not in
    the data. With a single prior employer min = avg = max; with several,
    the min is floored at 0 and the max at the whole prior span.
    """

    skill_demand: int
    avg_prior_tenure: float
    est_min_prior_tenure: float
    est_max_prior_tenure: float
    prior_experience_flag: bool

    def as_feature_values(self) -> tuple[float, ...]:
        return (
            float(self.skill_demand),
            self.avg_prior_tenure,
            self.est_min_prior_tenure,
            self.est_max_prior_tenure,
            1.0 if self.prior_experience_flag else 0.0,
        )


@dataclass(frozen=True)
class DemandTable:
    """Job role -> market-demand rating on the 1..5 scale."""

    entries: dict[str, int]
    default: int = 3

    def __post_init__(self) -> None:
        for role, rating in {**self.entries, "default": self.default}.items():
            if not 1 <= int(rating) <= 5:
                raise SchemaError(f"demand rating for {role!r} must be in 1..5, got {rating}")

    def rating_for(self, job_role: str | None) -> int:
        if job_role is None:
            return self.default
        return int(self.entries.get(job_role, self.default))

    def to_dict(self) -> dict:
        return {"entries": dict(self.entries), "default": self.default}

    @classmethod
    def from_dict(cls, doc: dict) -> "DemandTable":
        return cls(entries={k: int(v) for k, v in doc.get("entries", {}).items()},
                   default=int(doc.get("default", 3)))


@dataclass(frozen=True)
class DimensionTaxonomy:
    """Column or feature name -> one of the six dimensions."""

    mapping: dict[str, str]

    def __post_init__(self) -> None:
        for name, dim in self.mapping.items():
            if dim not in DIMENSIONS:
                raise SchemaError(f"taxonomy entry {name!r}: unknown dimension {dim!r}")

    def resolve(self, feature_name: str, source_column: str) -> str | None:
        if feature_name in self.mapping:
            return self.mapping[feature_name]
        return self.mapping.get(source_column)

    def to_dict(self) -> dict:
        return dict(self.mapping)

    @classmethod
    def from_dict(cls, doc: dict) -> "DimensionTaxonomy":
        return cls(mapping=dict(doc))


def load_demand_table(path: str) -> DemandTable:
    with open(path, encoding="utf-8") as fh:
        return DemandTable.from_dict(json.load(fh))


def load_taxonomy(path: str) -> DimensionTaxonomy:
    with open(path, encoding="utf-8") as fh:
        return DimensionTaxonomy.from_dict(json.load(fh))


def default_demand_table() -> DemandTable:
    text = resources.files("attrition.config").joinpath("demand.json").read_text("utf-8")
    return DemandTable.from_dict(json.loads(text))


def default_taxonomy() -> DimensionTaxonomy:
    text = resources.files("attrition.config").joinpath("taxonomy.json").read_text("utf-8")
    return DimensionTaxonomy.from_dict(json.loads(text))


def derive_kpis(
    record: EmployeeRecord,
    demand: DemandTable,
    job_role_column: str | None = None,
) -> DerivedKpis:
    """Compute the engineered KPIs for one record."""
    role = None
    if job_role_column is not None:
        role = record.raw.get(job_role_column)
    rating = demand.rating_for(role if isinstance(role, str) else None)

    companies = record.num_companies_worked
    prior_years = max(0.0, record.total_working_years - record.years_at_company)
    if companies > 0:
        avg_prior = prior_years / companies
    else:
        avg_prior = 0.0
    if companies > 1:
        est_min = 0.0
        est_max = prior_years
    else:
        # Zero or one prior employer: the average is the whole story.
        est_min = avg_prior
        est_max = avg_prior
    return DerivedKpis(
        skill_demand=rating,
        avg_prior_tenure=avg_prior,
        est_min_prior_tenure=est_min,
        est_max_prior_tenure=est_max,
        prior_experience_flag=companies > 0,
    )


@dataclass(frozen=True)
class EncodingRule:
    column: str
    kind: str  # "numeric" or "onehot"
    levels: tuple[str, ...] | None = None


@dataclass(frozen=True)
class FeatureCodec:
    """Fitted record -> vector encoding. Immutable once fitted."""

    rules: tuple[EncodingRule, ...]
    feature_names: tuple[str, ...]
    source_columns: tuple[str, ...]
    dimensions: tuple[str, ...]

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def to_dict(self) -> dict:
        return {
            "rules": [
                {"column": r.column, "kind": r.kind,
                 **({"levels": list(r.levels)} if r.levels is not None else {})}
                for r in self.rules
            ],
            "feature_names": list(self.feature_names),
            "source_columns": list(self.source_columns),
            "dimensions": list(self.dimensions),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureCodec":
        return cls(
            rules=tuple(
                EncodingRule(column=r["column"], kind=r["kind"],
                             levels=tuple(r["levels"]) if "levels" in r else None)
                for r in doc["rules"]
            ),
            feature_names=tuple(doc["feature_names"]),
            source_columns=tuple(doc["source_columns"]),
            dimensions=tuple(doc["dimensions"]),
        )


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.names):
            raise DataError(
                f"feature vector has {len(self.values)} values for {len(self.names)} names")


@dataclass
class EncodeDiagnostics:
    """Mutable counters shared across a batch of encode calls."""

    unseen_levels: int = 0
    unseen_examples: list[str] | None = None

    def record_unseen(self, column: str, value: str) -> None:
        self.unseen_levels += 1
        if self.unseen_examples is None:
            self.unseen_examples = []
        if len(self.unseen_examples) < 10:
            self.unseen_examples.append(f"{column}={value}")


def fit_codec(
    train: list[EmployeeRecord],
    schema: DatasetSchema,
    taxonomy: DimensionTaxonomy,
) -> FeatureCodec:
    """Fit encoding rules on training rows only.

    Categorical columns one-hot over the levels observed in train, in
    alphabetical order; numeric columns pass through; the five derived
    KPIs are appended as numeric features.
    """
    if not train:
        raise DataError("cannot fit a codec on an empty training set")
    labels = {r.attrition for r in train if r.attrition is not None}
    if len(labels) < 2:
        raise DataError("single-class training set")

    rules: list[EncodingRule] = []
    names: list[str] = []
    sources: list[str] = []
    for col in schema.columns:
        if col.name in (schema.target, schema.id_column):
            continue
        if col.kind == "numeric":
            rules.append(EncodingRule(column=col.name, kind="numeric"))
            names.append(col.name)
            sources.append(col.name)
        else:
            observed = sorted({
                str(r.raw[col.name]) for r in train if col.name in r.raw})
            if not observed:
                continue
            rules.append(EncodingRule(column=col.name, kind="onehot",
                                      levels=tuple(observed)))
            for level in observed:
                names.append(f"{col.name}={level}")
                sources.append(col.name)
    for kpi in KPI_NAMES:
        rules.append(EncodingRule(column=kpi, kind="numeric"))
        names.append(kpi)
        sources.append(kpi)

    dims: list[str] = []
    for name, source in zip(names, sources):
        dim = taxonomy.resolve(name, source)
        if dim is None:
            log.warning("feature %s has no taxonomy entry, assigning %s",
                        name, FALLBACK_DIMENSION)
            dim = FALLBACK_DIMENSION
        dims.append(dim)

    return FeatureCodec(
        rules=tuple(rules),
        feature_names=tuple(names),
        source_columns=tuple(sources),
        dimensions=tuple(dims),
    )


def encode(
    record: EmployeeRecord,
    kpis: DerivedKpis,
    codec: FeatureCodec,
    diagnostics: EncodeDiagnostics | None = None,
) -> FeatureVector:
    """Encode one record under a fitted codec. Deterministic.

    An unseen categorical level leaves its one-hot block all zero and is
    counted in ``diagnostics`` when one is passed.
    """
    values = np.zeros(codec.n_features, dtype=np.float64)
    pos = 0
    kpi_values = dict(zip(KPI_NAMES, kpis.as_feature_values()))
    for rule in codec.rules:
        if rule.kind == "numeric":
            if rule.column in kpi_values:
                values[pos] = kpi_values[rule.column]
            else:
                values[pos] = float(record.raw.get(rule.column, 0.0))
            pos += 1
        else:
            levels = rule.levels or ()
            value = record.raw.get(rule.column)
            if value is not None:
                text = str(value)
                if text in levels:
                    values[pos + levels.index(text)] = 1.0
                elif diagnostics is not None:
                    diagnostics.record_unseen(rule.column, text)
            pos += len(levels)
    return FeatureVector(values=values, names=codec.feature_names)


def encode_matrix(
    records: list[EmployeeRecord],
    kpis_list: list[DerivedKpis],
    codec: FeatureCodec,
    diagnostics: EncodeDiagnostics | None = None,
) -> np.ndarray:
    """Stack encodings into an (n_records, n_features) float64 matrix."""
    out = np.empty((len(records), codec.n_features), dtype=np.float64)
    for i, (rec, kpis) in enumerate(zip(records, kpis_list)):
        out[i] = encode(rec, kpis, codec, diagnostics).values
    return out
