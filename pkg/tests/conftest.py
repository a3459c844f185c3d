"""Shared fixtures: a small synthetic dataset and session-scoped models.

The expensive fixtures (full roster training) are session scoped so the
suite pays for them once. Everything here is deterministic.
"""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from attrition.forest import TrainParams
from attrition.ingest import EmployeeRecord, load_dataset, record_from_mapping
from attrition.pipeline import TrainConfig, train_all
from attrition.schema import ColumnSpec, DatasetSchema, default_schema

ROSTER = Path(__file__).resolve().parents[1] / "data" / "hr_roster.csv"

MINI_COLUMNS = (
    ColumnSpec("EmployeeNumber", "numeric"),
    ColumnSpec("Attrition", "boolean", levels=("Yes", "No")),
    ColumnSpec("Age", "numeric"),
    ColumnSpec("OverTime", "boolean", levels=("Yes", "No")),
    ColumnSpec("Department", "categorical", levels=("Ops", "R&D", "Sales")),
    ColumnSpec("JobRole", "categorical", levels=("Analyst", "Engineer", "Manager")),
    ColumnSpec("MonthlyIncome", "numeric"),
    ColumnSpec("YearsAtCompany", "numeric"),
    ColumnSpec("TotalWorkingYears", "numeric"),
    ColumnSpec("NumCompaniesWorked", "numeric"),
)


def build_mini_schema() -> DatasetSchema:
    return DatasetSchema(
        columns=MINI_COLUMNS,
        target="Attrition",
        id_column="EmployeeNumber",
        tenure="YearsAtCompany",
        total_working_years="TotalWorkingYears",
        companies_worked="NumCompaniesWorked",
        compensation="MonthlyIncome",
        job_role="JobRole",
    )


def build_mini_rows(n: int = 48, seed: int = 7) -> list[dict[str, str]]:
    """Raw CSV-style rows with a planted overtime/low-pay attrition signal."""
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        overtime = rng.random() < 0.4
        income = rng.randint(2000, 15000)
        years_at = rng.randint(0, 15)
        risk = 0.10 + (0.55 if overtime else 0.0) + (0.25 if income < 5000 else 0.0)
        risk -= 0.01 * years_at
        rows.append({
            "EmployeeNumber": str(i + 1),
            "Attrition": "Yes" if rng.random() < risk else "No",
            "Age": str(rng.randint(22, 58)),
            "OverTime": "Yes" if overtime else "No",
            "Department": rng.choice(("Ops", "R&D", "Sales")),
            "JobRole": rng.choice(("Analyst", "Engineer", "Manager")),
            "MonthlyIncome": str(income),
            "YearsAtCompany": str(years_at),
            "TotalWorkingYears": str(years_at + rng.randint(0, 12)),
            "NumCompaniesWorked": str(rng.randint(0, 6)),
        })
    return rows


def to_records(rows: list[dict[str, str]], schema: DatasetSchema) -> list[EmployeeRecord]:
    out = []
    for i, row in enumerate(rows):
        record, issues = record_from_mapping(row, schema, row_index=i)
        assert record is not None, issues
        out.append(record)
    return out


@pytest.fixture(scope="session")
def mini_schema() -> DatasetSchema:
    return build_mini_schema()


@pytest.fixture(scope="session")
def mini_rows() -> list[dict[str, str]]:
    return build_mini_rows()


@pytest.fixture(scope="session")
def mini_records(mini_rows, mini_schema) -> list[EmployeeRecord]:
    return to_records(mini_rows, mini_schema)


@pytest.fixture(scope="session")
def mini_config(tmp_path_factory, mini_schema) -> TrainConfig:
    # The mini schema is not the packaged default, so it rides along as a file.
    import json

    path = tmp_path_factory.mktemp("config") / "mini_schema.json"
    path.write_text(json.dumps(mini_schema.to_dict()))
    return TrainConfig(
        schema_path=str(path),
        params=TrainParams(n_trees=12, seed=11),
        top_k=3,
    )


@pytest.fixture(scope="session")
def mini_trained(mini_records, mini_config):
    return train_all(mini_records, mini_config)


@pytest.fixture(scope="session")
def mini_bundle(mini_trained):
    return mini_trained[0]


@pytest.fixture(scope="session")
def roster_schema() -> DatasetSchema:
    return default_schema()


@pytest.fixture(scope="session")
def roster_result(roster_schema):
    return load_dataset(str(ROSTER), roster_schema)


@pytest.fixture(scope="session")
def roster_records(roster_result):
    return roster_result.records


@pytest.fixture(scope="session")
def trained():
    """Full training run on the bundled roster with default settings."""
    return train_all(str(ROSTER), TrainConfig())


@pytest.fixture(scope="session")
def bundle(trained):
    return trained[0]


@pytest.fixture(scope="session")
def metrics(trained):
    return trained[1]
