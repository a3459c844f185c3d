"""Dataset schema: column kinds, special-role column names, config loading.

The schema is an external JSON document (see ``config/schema.json`` for the
default 35-column HR layout) so a deployment can rename columns or add its
own without code changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import SchemaError

KINDS = ("numeric", "categorical", "boolean")

POSITIVE_LABEL = "Yes"
NEGATIVE_LABEL = "No"


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    required: bool = True
    levels: tuple[str, ...] | None = None


@dataclass(frozen=True)
class DatasetSchema:
    """Column specs plus the names of the special-role columns."""

    columns: tuple[ColumnSpec, ...]
    target: str
    id_column: str | None
    tenure: str
    total_working_years: str
    companies_worked: str
    compensation: str | None = None
    job_role: str | None = None

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate column names: {', '.join(dupes)}")
        for col in self.columns:
            if col.kind not in KINDS:
                raise SchemaError(f"column {col.name}: unknown kind {col.kind!r}")
        by_name = {c.name: c for c in self.columns}
        target = by_name.get(self.target)
        if target is None:
            raise SchemaError(f"target column {self.target!r} not in schema")
        if target.kind != "boolean" or set(target.levels or ()) != {NEGATIVE_LABEL, POSITIVE_LABEL}:
            raise SchemaError(
                f"target column {self.target!r} must be boolean with levels "
                f"{{{POSITIVE_LABEL}, {NEGATIVE_LABEL}}}"
            )
        for role, name in (("tenure", self.tenure),
                           ("total_working_years", self.total_working_years),
                           ("companies_worked", self.companies_worked)):
            if name not in by_name:
                raise SchemaError(f"{role} column {name!r} not in schema")
            if by_name[name].kind != "numeric":
                raise SchemaError(f"{role} column {name!r} must be numeric")
        for role, name in (("id", self.id_column), ("compensation", self.compensation),
                           ("job_role", self.job_role)):
            if name is not None and name not in by_name:
                raise SchemaError(f"{role} column {name!r} not in schema")

    def column(self, name: str) -> ColumnSpec:
        for col in self.columns:
            if col.name == name:
                return col
        raise SchemaError(f"unknown column {name!r}")

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def to_dict(self) -> dict:
        doc = {
            "columns": [
                {"name": c.name, "kind": c.kind, "required": c.required,
                 **({"levels": list(c.levels)} if c.levels is not None else {})}
                for c in self.columns
            ],
            "target": self.target,
            "tenure": self.tenure,
            "total_working_years": self.total_working_years,
            "companies_worked": self.companies_worked,
        }
        if self.id_column is not None:
            doc["id"] = self.id_column
        if self.compensation is not None:
            doc["compensation"] = self.compensation
        if self.job_role is not None:
            doc["job_role"] = self.job_role
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetSchema":
        try:
            columns = tuple(
                ColumnSpec(
                    name=c["name"],
                    kind=c["kind"],
                    required=bool(c.get("required", True)),
                    levels=tuple(c["levels"]) if "levels" in c else None,
                )
                for c in doc["columns"]
            )
            return cls(
                columns=columns,
                target=doc["target"],
                id_column=doc.get("id"),
                tenure=doc["tenure"],
                total_working_years=doc["total_working_years"],
                companies_worked=doc["companies_worked"],
                compensation=doc.get("compensation"),
                job_role=doc.get("job_role"),
            )
        except KeyError as exc:
            raise SchemaError(f"schema config missing key {exc.args[0]!r}") from exc


def load_schema(path: str) -> DatasetSchema:
    """Read a schema config JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return DatasetSchema.from_dict(doc)


def default_schema() -> DatasetSchema:
    """The packaged 35-column HR schema."""
    text = resources.files("attrition.config").joinpath("schema.json").read_text("utf-8")
    return DatasetSchema.from_dict(json.loads(text))
