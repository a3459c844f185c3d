"""Release gate: end-to-end behavior checks at fixed tolerances.

Each test is one gate: model quality within a time budget, bit-level
reproducibility, the numeric contracts of the regression and the
association statistics, attribution completeness, persistence, and the
holdout split. Run with -v for a one-line verdict per gate.
"""

from __future__ import annotations

import json
import random
import time

import numpy as np
import pytest

from attrition.errors import ModelError
from attrition.forest import TrainParams, best_split, predict_proba, train_forest
from attrition.ingest import split_train_validation
from attrition.linreg import fit_ols
from attrition.model_store import load_bundle, save_bundle
from attrition.pipeline import (TrainConfig, _encode_records, _labels_of,
                                score_all, train_all)
from attrition.stats import chi_square, chi_square_survival
from attrition.features import default_demand_table, default_taxonomy, fit_codec
from tests.conftest import ROSTER


@pytest.fixture(scope="module")
def roster_scored(bundle, roster_records):
    return score_all(bundle, roster_records)


def test_roster_model_quality_within_time_budget():
    start = time.monotonic()
    trained_bundle, metrics = train_all(str(ROSTER), TrainConfig())
    elapsed = time.monotonic() - start
    assert elapsed < 60.0, f"training took {elapsed:.1f}s"
    assert trained_bundle.seed == 42
    assert metrics.accuracy >= 0.85
    assert metrics.recall > 0.0
    assert {"accuracy", "recall", "specificity",
            "precision"} <= set(metrics.to_dict())


def test_retraining_reproduces_byte_identical_artifacts(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    config = TrainConfig()
    blobs = []
    for name, jobs in (("serial_a", 1), ("serial_b", 1), ("parallel", 4)):
        trained_bundle, _ = train_all(str(ROSTER), config, n_jobs=jobs)
        path = tmp_path / f"{name}.json"
        save_bundle(trained_bundle, str(path))
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]
    assert blobs[0] == blobs[2]
    checksums = {json.loads(blob)["checksum"] for blob in blobs}
    assert len(checksums) == 1


def test_tenure_regression_solves_normal_equations():
    rng = np.random.default_rng(20240817)
    for _ in range(1000):
        n_features = int(rng.integers(1, 11))
        n_rows = int(rng.integers(2, 51))
        scale = float(rng.uniform(0.1, 10.0))
        X = rng.normal(size=(n_rows, n_features)) * scale
        y = rng.normal(size=n_rows) * scale
        model = fit_ols(X, y)
        design = np.hstack([X, np.ones((n_rows, 1))])
        beta = np.append(model.coefficients, model.intercept)
        # the ridge penalty leaves the intercept alone
        penalty = model.ridge_eps * np.append(model.coefficients, 0.0)
        grad = design.T @ (design @ beta - y) + penalty
        bound = 1e-8 * (1.0 + float(np.linalg.norm(design.T @ y)))
        assert float(np.linalg.norm(grad)) <= bound

    # hand-solved least-squares line through (0,0), (1,1), (2,4)
    model = fit_ols([[0.0], [1.0], [2.0]], [0.0, 1.0, 4.0], ridge_eps=0.0)
    assert model.coefficients[0] == pytest.approx(2.0, abs=1e-9)
    assert model.intercept == pytest.approx(-1.0 / 3.0, abs=1e-9)


def test_driver_attribution_accounts_for_every_probability(roster_scored):
    assert len(roster_scored) == 1470
    for scored in roster_scored:
        total = scored.drivers.bias + scored.drivers.delta_total()
        assert abs(total - scored.attrition_probability) <= 1e-9


def test_lead_time_identity_holds_for_every_employee(roster_scored,
                                                     roster_records):
    for scored, record in zip(roster_scored, roster_records):
        outlook = scored.tenure
        assert outlook.current_tenure == record.years_at_company
        assert outlook.lead_time_raw == outlook.ttl - outlook.current_tenure
        assert outlook.lead_time == max(0.0, outlook.lead_time_raw)
        assert outlook.overdue == (outlook.lead_time_raw < 0.0)


def test_association_statistic_matches_closed_form():
    rng = random.Random(20240818)
    for _ in range(100):
        a, b, c, d = (rng.randint(1, 500) for _ in range(4))
        result = chi_square(np.array([[a, b], [c, d]]))
        n = a + b + c + d
        shortcut = (n * (a * d - b * c) ** 2
                    / ((a + b) * (c + d) * (a + c) * (b + d)))
        assert result.statistic == pytest.approx(shortcut, abs=1e-9)
        assert result.degrees_of_freedom == 1
    assert chi_square_survival(3.841, 1) == pytest.approx(0.05, abs=1e-3)


def test_single_tree_memorizes_training_split(roster_records, roster_schema):
    train, _ = split_train_validation(roster_records, 0.8, 42)
    codec = fit_codec(train, roster_schema, default_taxonomy())
    X = _encode_records(train, codec, default_demand_table(),
                        roster_schema.job_role)
    y = _labels_of(train)
    params = TrainParams(n_trees=1, min_samples_leaf=1,
                         features_per_split="all", bootstrap=False, seed=42)
    forest = train_forest(X, y, params)
    probabilities = predict_proba(forest, X)
    accuracy = float(np.mean((probabilities >= 0.5) == (y >= 0.5)))
    assert accuracy >= 0.95

    # four separable points: exhaustive search over midpoints agrees
    Xs = np.array([[1.0], [2.0], [3.0], [4.0]])
    ys = np.array([0.0, 0.0, 1.0, 1.0])

    def impurity(labels: np.ndarray) -> float:
        if labels.size == 0:
            return 0.0
        p = float(labels.mean())
        return 1.0 - p * p - (1.0 - p) * (1.0 - p)

    exhaustive = max(
        (impurity(ys)
         - (ys[Xs[:, 0] <= mid].size / 4.0) * impurity(ys[Xs[:, 0] <= mid])
         - (ys[Xs[:, 0] > mid].size / 4.0) * impurity(ys[Xs[:, 0] > mid]),
         mid)
        for mid in (1.5, 2.5, 3.5))
    found = best_split(Xs, ys)
    assert found is not None
    feature, threshold, decrease = found
    assert (feature, threshold) == (0, 2.5)
    assert decrease == pytest.approx(0.5, abs=1e-15)
    assert (threshold, decrease) == (exhaustive[1],
                                     pytest.approx(exhaustive[0], abs=1e-15))


def test_artifact_round_trip_and_tamper_rejection(tmp_path, bundle,
                                                  roster_records):
    rows = roster_records[:100]
    before = score_all(bundle, rows)
    path = tmp_path / "round_trip.json"
    save_bundle(bundle, str(path))
    loaded = load_bundle(str(path))
    after = score_all(loaded, rows)
    for pre, post in zip(before, after):
        assert post.attrition_probability == pre.attrition_probability
        assert post.label == pre.label
        assert post.tenure.ttl == pre.tenure.ttl

    blob = path.read_bytes()
    marker = b'"n_trees":200'
    assert marker in blob
    tampered = tmp_path / "tampered.json"
    tampered.write_bytes(blob.replace(marker, b'"n_trees":201', 1))
    with pytest.raises(ModelError):
        load_bundle(str(tampered))


def test_holdout_partition_is_exact_and_stratified(roster_records):
    train, valid = split_train_validation(roster_records, 0.8, 42)
    assert (len(train), len(valid)) == (1176, 294)
    for label in (True, False):
        in_class = sum(1 for r in roster_records if r.attrition is label)
        in_train = sum(1 for r in train if r.attrition is label)
        assert abs(in_train - 0.8 * in_class) <= 1.0
