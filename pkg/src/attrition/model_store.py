"""Model artifact persistence with integrity checks.

One canonical JSON document per trained model. The checksum covers the
payload section only; created_at sits outside it so retraining on the
same inputs yields the same checksum regardless of the clock. Honors
SOURCE_DATE_EPOCH for fully byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Mapping

from .errors import ModelError
from .features import DemandTable, DimensionTaxonomy, FeatureCodec
from .forest import Forest
from .linreg import RegressionModel
from .schema import DatasetSchema

FORMAT_VERSION = 1
ARTIFACT_SUFFIX = ".attrition-model.json"
_CHECKSUM_PREFIX = "sha256:"


def canonical_bytes(doc: Any) -> bytes:
    """Canonical JSON encoding: sorted keys, no whitespace, full float
    round-trip precision, finite numbers only.
    """
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      allow_nan=False).encode("utf-8")


def payload_checksum(payload: Mapping[str, Any]) -> str:
    return _CHECKSUM_PREFIX + hashlib.sha256(canonical_bytes(payload)).hexdigest()


def creation_stamp() -> str:
    """UTC second-resolution timestamp; SOURCE_DATE_EPOCH wins when set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    ts = int(epoch) if epoch else int(time.time())
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%SZ")


@dataclass
class ModelBundle:
    schema: DatasetSchema
    codec: FeatureCodec
    taxonomy: DimensionTaxonomy
    demand: DemandTable
    forest: Forest
    regression: RegressionModel
    train_config: dict[str, Any]
    metrics: dict[str, Any]
    seed: int
    created_at: str
    format_version: int = FORMAT_VERSION

    def payload(self) -> dict[str, Any]:
        return {
            "schema": self.schema.to_dict(),
            "codec": self.codec.to_dict(),
            "taxonomy": self.taxonomy.to_dict(),
            "demand": self.demand.to_dict(),
            "forest": self.forest.to_dict(),
            "regression": self.regression.to_dict(),
            "train_config": dict(self.train_config),
            "metrics": dict(self.metrics),
            "seed": self.seed,
        }

    def checksum(self) -> str:
        return payload_checksum(self.payload())


def save_bundle(bundle: ModelBundle, path: str) -> str:
    """Write the artifact atomically; returns the payload checksum."""
    payload = bundle.payload()
    checksum = payload_checksum(payload)
    doc = {
        "format_version": bundle.format_version,
        "created_at": bundle.created_at,
        "checksum": checksum,
        "payload": payload,
    }
    data = canonical_bytes(doc) + b"\n"
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise ModelError(f"cannot write model artifact {path}: {exc}") from exc
    return checksum


def load_bundle(path: str) -> ModelBundle:
    """Read and validate an artifact; never best-effort parses."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read model artifact {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ModelError(
            f"malformed model artifact {path}: {exc.msg} at byte {exc.pos}"
        ) from exc
    if not isinstance(doc, dict) or "payload" not in doc:
        raise ModelError(f"model artifact {path} has no payload section")

    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(
            f"unsupported format_version {version!r} in {path}; "
            f"this build reads version {FORMAT_VERSION}")

    payload = doc["payload"]
    stated = doc.get("checksum")
    actual = payload_checksum(payload)
    if stated != actual:
        raise ModelError(
            f"checksum mismatch in {path}: stated {stated}, payload hashes "
            f"to {actual}; the artifact is corrupted or was edited")

    try:
        bundle = ModelBundle(
            schema=DatasetSchema.from_dict(payload["schema"]),
            codec=FeatureCodec.from_dict(payload["codec"]),
            taxonomy=DimensionTaxonomy.from_dict(payload["taxonomy"]),
            demand=DemandTable.from_dict(payload["demand"]),
            forest=Forest.from_dict(payload["forest"]),
            regression=RegressionModel.from_dict(payload["regression"]),
            train_config=dict(payload["train_config"]),
            metrics=dict(payload["metrics"]),
            seed=int(payload["seed"]),
            created_at=str(doc.get("created_at", "")),
            format_version=int(version),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"model artifact {path} is incomplete: {exc}") from exc
    bundle.forest.validate()
    return bundle
