"""CSV ingestion: typed records, validation report, train/validation split.

Rows that fail validation are never silently discarded. By default any bad
row aborts the load with a report of every offending cell; passing
``drop_bad_rows=True`` keeps the good rows and returns the bad ones in the
result's ``dropped`` list.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, SchemaError
from .schema import NEGATIVE_LABEL, POSITIVE_LABEL, DatasetSchema

INCONSISTENT_TENURE_FLAG = "inconsistent_tenure"


@dataclass(frozen=True)
class EmployeeRecord:
    """One validated dataset row.

    ``raw`` maps column name to the parsed value: float for numeric
    columns, str for categorical ones, and the original Yes/No string for
    boolean columns. ``attrition`` is None when the target column is absent
    (candidate screening) or empty.
    """

    id: str
    raw: dict[str, object]
    years_at_company: float
    total_working_years: float
    num_companies_worked: float
    attrition: bool | None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class RowIssue:
    row_index: int
    column: str
    message: str

    def __str__(self) -> str:
        return f"row {self.row_index}, column {self.column}: {self.message}"


@dataclass(frozen=True)
class DatasetSummary:
    n_rows: int
    class_counts: dict[str, int]
    attrition_ratio: float | None
    mean_monthly_income: float | None


@dataclass
class LoadResult:
    records: list[EmployeeRecord]
    summary: DatasetSummary
    dropped: list[RowIssue] = field(default_factory=list)


def record_from_mapping(
    mapping: dict[str, str],
    schema: DatasetSchema,
    row_index: int = 0,
    require_target: bool = False,
) -> tuple[EmployeeRecord | None, list[RowIssue]]:
    """Validate one raw row against the schema.

    Returns (record, issues). The record is None when any issue is fatal;
    non-fatal issues (an undeclared categorical level) are recorded as
    record flags instead.
    """
    issues: list[RowIssue] = []
    flags: list[str] = []
    raw: dict[str, object] = {}

    for col in schema.columns:
        present = col.name in mapping and str(mapping[col.name]).strip() != ""
        if not present:
            if col.name == schema.target:
                if require_target:
                    issues.append(RowIssue(row_index, col.name, "label missing"))
                continue
            if col.required:
                issues.append(RowIssue(row_index, col.name, "required value missing"))
            continue
        value = str(mapping[col.name]).strip()
        if col.kind == "numeric":
            try:
                parsed = float(value)
            except ValueError:
                issues.append(RowIssue(row_index, col.name, f"not a number: {value!r}"))
                continue
            if not math.isfinite(parsed):
                issues.append(RowIssue(row_index, col.name, f"not finite: {value!r}"))
                continue
            raw[col.name] = parsed
        elif col.kind == "boolean":
            if value not in (POSITIVE_LABEL, NEGATIVE_LABEL):
                issues.append(RowIssue(
                    row_index, col.name,
                    f"expected {POSITIVE_LABEL} or {NEGATIVE_LABEL}, got {value!r}"))
                continue
            raw[col.name] = value
        else:
            if col.levels is not None and value not in col.levels:
                flags.append(f"unknown_level:{col.name}={value}")
            raw[col.name] = value

    if issues:
        return None, issues

    years_at = float(raw.get(schema.tenure, 0.0))
    total_years = float(raw.get(schema.total_working_years, 0.0))
    companies = float(raw.get(schema.companies_worked, 0.0))
    if years_at > total_years:
        flags.append(INCONSISTENT_TENURE_FLAG)

    target_value = raw.get(schema.target)
    attrition = None if target_value is None else target_value == POSITIVE_LABEL

    if schema.id_column is not None and schema.id_column in raw:
        rec_id = str(raw[schema.id_column])
        if rec_id.endswith(".0"):
            rec_id = rec_id[:-2]
    else:
        rec_id = str(row_index + 1)

    record = EmployeeRecord(
        id=rec_id,
        raw=raw,
        years_at_company=years_at,
        total_working_years=total_years,
        num_companies_worked=companies,
        attrition=attrition,
        flags=tuple(flags),
    )
    return record, []


def load_dataset(
    path: str,
    schema: DatasetSchema,
    drop_bad_rows: bool = False,
) -> LoadResult:
    """Load and validate a CSV file. Row order is preserved."""
    if not os.path.exists(path):
        raise DataError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file, expected a header row")
        header = set(reader.fieldnames)
        missing = [c.name for c in schema.columns
                   if c.required and c.name not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s): {', '.join(missing)}")

        records: list[EmployeeRecord] = []
        dropped: list[RowIssue] = []
        for index, row in enumerate(reader):
            record, issues = record_from_mapping(row, schema, row_index=index)
            if record is not None:
                records.append(record)
            else:
                dropped.extend(issues)

    if dropped and not drop_bad_rows:
        preview = "; ".join(str(i) for i in dropped[:5])
        more = f" (+{len(dropped) - 5} more)" if len(dropped) > 5 else ""
        raise DataError(f"{path}: {len(dropped)} bad cell(s): {preview}{more}")

    return LoadResult(records=records, summary=summarize(records, schema), dropped=dropped)


def summarize(records: list[EmployeeRecord], schema: DatasetSchema) -> DatasetSummary:
    """Headline numbers for the overview dashboard."""
    n = len(records)
    labels = [r.attrition for r in records if r.attrition is not None]
    class_counts: dict[str, int] = {}
    if labels:
        class_counts = {
            POSITIVE_LABEL: sum(1 for v in labels if v),
            NEGATIVE_LABEL: sum(1 for v in labels if not v),
        }
    ratio = class_counts[POSITIVE_LABEL] / n if labels and n else None

    mean_income = None
    if schema.compensation is not None:
        incomes = [r.raw[schema.compensation] for r in records
                   if schema.compensation in r.raw]
        if incomes:
            mean_income = float(np.mean(incomes))
    return DatasetSummary(
        n_rows=n,
        class_counts=class_counts,
        attrition_ratio=ratio,
        mean_monthly_income=mean_income,
    )


def _train_size(n: int, ratio: float) -> int:
    return int(math.floor(ratio * n + 0.5))


def split_train_validation(
    records: list[EmployeeRecord],
    ratio: float,
    seed: int,
    stratify: bool = True,
) -> tuple[list[EmployeeRecord], list[EmployeeRecord]]:
    """Disjoint, exhaustive split with |train| = round(ratio * N).

    Stratified mode keeps each class within one record of its proportional
    share on both sides. Deterministic in (records, ratio, seed).
    """
    if not records:
        raise DataError("cannot split an empty record list")
    if not 0.0 < ratio < 1.0:
        raise DataError(f"split ratio must be in (0, 1), got {ratio}")

    n = len(records)
    n_train = _train_size(n, ratio)
    rng = np.random.default_rng(seed)

    if not stratify:
        perm = rng.permutation(n)
        train_idx = sorted(perm[:n_train].tolist())
    else:
        groups: dict[str, list[int]] = {}
        for i, rec in enumerate(records):
            if rec.attrition is None:
                raise DataError(f"record {rec.id} has no label, cannot stratify")
            key = POSITIVE_LABEL if rec.attrition else NEGATIVE_LABEL
            groups.setdefault(key, []).append(i)
        for key, members in groups.items():
            if len(members) < 2:
                raise DataError(
                    f"class {key} has only {len(members)} record(s), too few to stratify")

        # Floor each class share, then hand out the remainder by largest
        # fractional part (ties broken by class name) so the total is exact.
        keys = sorted(groups)
        ideal = {k: ratio * len(groups[k]) for k in keys}
        take = {k: int(math.floor(ideal[k])) for k in keys}
        remainder = n_train - sum(take.values())
        by_fraction = sorted(keys, key=lambda k: (-(ideal[k] - take[k]), k))
        for k in by_fraction[:remainder]:
            take[k] += 1

        train_idx = []
        for k in keys:
            members = np.array(groups[k])
            perm = rng.permutation(len(members))
            train_idx.extend(members[perm[:take[k]]].tolist())
        train_idx = sorted(train_idx)

    train_set = set(train_idx)
    train = [records[i] for i in train_idx]
    validation = [records[i] for i in range(n) if i not in train_set]
    return train, validation


def write_records(records: list[EmployeeRecord], schema: DatasetSchema, path: str) -> None:
    """Write validated records back to CSV (round-trips through load_dataset)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(schema.column_names)
        for rec in records:
            row = []
            for name in schema.column_names:
                value = rec.raw.get(name, "")
                if isinstance(value, float):
                    row.append(str(int(value)) if value.is_integer() else repr(value))
                else:
                    row.append(value)
            writer.writerow(row)
