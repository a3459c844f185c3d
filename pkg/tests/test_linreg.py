"""Least-squares tenure model: fit quality, stability, prediction."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrition.errors import DataError, ModelError
from attrition.linreg import (DEFAULT_RIDGE_EPS, RegressionModel, fit_ols,
                              lead_time, predict_ttl)


def gradient_norm(X, y, model):
    """Norm of the stabilized normal-equation residual at the solution.

    The penalty term excludes the intercept, matching the fitted objective.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    design = np.hstack([X, np.ones((len(X), 1))])
    beta = np.append(model.coefficients, model.intercept)
    penalty = model.ridge_eps * np.append(model.coefficients, 0.0)
    grad = design.T @ (design @ beta - y) + penalty
    return float(np.linalg.norm(grad)), float(np.linalg.norm(design.T @ y))


class TestFitOls:
    def test_two_points_exact_line(self):
        model = fit_ols([[0.0], [1.0]], [1.0, 3.0], ridge_eps=0.0)
        assert model.coefficients[0] == pytest.approx(2.0, abs=1e-9)
        assert model.intercept == pytest.approx(1.0, abs=1e-9)
        assert model.rmse == pytest.approx(0.0, abs=1e-9)
        assert model.r_squared == pytest.approx(1.0, abs=1e-9)

    def test_three_point_overdetermined(self):
        # least-squares line through (0,0), (1,1), (2,4)
        model = fit_ols([[0.0], [1.0], [2.0]], [0.0, 1.0, 4.0], ridge_eps=0.0)
        assert model.coefficients[0] == pytest.approx(2.0, abs=1e-9)
        assert model.intercept == pytest.approx(-1.0 / 3.0, abs=1e-9)

    def test_constant_target(self):
        model = fit_ols([[0.0], [1.0], [2.0]], [5.0, 5.0, 5.0])
        assert model.coefficients[0] == pytest.approx(0.0, abs=1e-6)
        assert model.intercept == pytest.approx(5.0, abs=1e-6)
        # zero total variance reports as zero explained, not a crash
        assert model.r_squared == 0.0

    def test_rmse_and_r_squared_definitions(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(40, 3))
        y = X @ np.array([1.0, -2.0, 0.5]) + 0.3 * rng.normal(size=40) + 4.0
        model = fit_ols(X, y)
        fitted = model.intercept + X @ model.coefficients
        resid = y - fitted
        assert model.rmse == pytest.approx(
            float(np.sqrt(np.mean(resid ** 2))), rel=1e-12)
        ss_res = float(np.sum(resid ** 2))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        assert model.r_squared == pytest.approx(1.0 - ss_res / ss_tot, rel=1e-12)

    def test_matches_plain_lstsq_when_well_conditioned(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(60, 4))
        y = rng.normal(size=60)
        model = fit_ols(X, y)
        design = np.hstack([X, np.ones((60, 1))])
        ref, *_ = np.linalg.lstsq(design, y, rcond=None)
        assert model.coefficients == pytest.approx(ref[:-1], abs=1e-6)
        assert model.intercept == pytest.approx(ref[-1], abs=1e-6)

    def test_duplicate_column_stays_stable(self):
        # rank-deficient design: the penalty picks the symmetric solution
        rng = np.random.default_rng(2)
        base = rng.normal(size=(50, 1))
        X = np.hstack([base, base])
        y = 3.0 * base[:, 0] + 0.1 * rng.normal(size=50)
        model = fit_ols(X, y)
        assert np.all(np.isfinite(model.coefficients))
        assert model.coefficients[0] == pytest.approx(model.coefficients[1],
                                                      abs=1e-6)
        norm, scale = gradient_norm(X, y, model)
        assert norm <= 1e-8 * (1.0 + scale)

    def test_gradient_bound_on_random_systems(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            n = int(rng.integers(5, 60))
            m = int(rng.integers(1, min(n, 8)))
            X = rng.normal(size=(n, m)) * rng.uniform(0.1, 10)
            y = rng.normal(size=n) * rng.uniform(0.1, 10)
            model = fit_ols(X, y)
            norm, scale = gradient_norm(X, y, model)
            assert norm <= 1e-8 * (1.0 + scale)

    def test_feature_metadata(self):
        X = [[1.0, 2.0], [3.0, 4.0], [5.0, 7.0]]
        model = fit_ols(X, [1.0, 2.0, 3.0], feature_names=["a", "b"])
        assert model.feature_names == ("a", "b")
        assert model.feature_means == pytest.approx(np.mean(X, axis=0))
        assert model.ridge_eps == DEFAULT_RIDGE_EPS

    def test_input_validation(self):
        with pytest.raises(DataError, match="at least 2"):
            fit_ols([[1.0]], [1.0])
        with pytest.raises(DataError, match="finite"):
            fit_ols([[1.0], [np.nan]], [1.0, 2.0])
        with pytest.raises(DataError, match="finite"):
            fit_ols([[1.0], [2.0]], [1.0, np.inf])
        with pytest.raises(DataError):
            fit_ols([[1.0], [2.0]], [1.0, 2.0, 3.0])
        with pytest.raises(ModelError, match="ridge_eps"):
            fit_ols([[1.0], [2.0]], [1.0, 2.0], ridge_eps=-1.0)

    def test_round_trip(self):
        model = fit_ols([[0.0], [1.0], [2.0]], [0.0, 1.0, 4.0],
                        feature_names=["x"])
        again = RegressionModel.from_dict(model.to_dict())
        assert again.coefficients == pytest.approx(model.coefficients)
        assert again.intercept == model.intercept
        assert again.feature_names == model.feature_names

    @given(st.integers(0, 2 ** 32))
    @settings(max_examples=40, deadline=None)
    def test_gradient_bound_property(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 40))
        m = int(rng.integers(1, 6))
        X = rng.normal(size=(n, m))
        y = rng.normal(size=n)
        model = fit_ols(X, y)
        norm, scale = gradient_norm(X, y, model)
        assert norm <= 1e-8 * (1.0 + scale)


class TestPredict:
    @pytest.fixture
    def model(self):
        return fit_ols([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]], [1.0, 2.0, 5.0])

    def test_linear_form(self, model):
        x = np.array([1.5, 0.5])
        expected = model.intercept + float(model.coefficients @ x)
        assert predict_ttl(model, x) == expected

    def test_shape_mismatch(self, model):
        with pytest.raises(ModelError, match="does not match"):
            predict_ttl(model, np.array([1.0, 2.0, 3.0]))

    def test_non_finite_input_rejected(self, model):
        with pytest.raises(ModelError, match="finite"):
            predict_ttl(model, np.array([np.inf, 1.0]))


class TestLeadTime:
    def test_positive_margin(self):
        out = lead_time(9.3, 4.0)
        assert out.ttl == 9.3
        assert out.current_tenure == 4.0
        assert out.lead_time_raw == 9.3 - 4.0
        assert out.lead_time == out.lead_time_raw
        assert out.overdue is False

    def test_overdue_clamps_to_zero(self):
        out = lead_time(2.0, 6.5)
        assert out.lead_time_raw == 2.0 - 6.5
        assert out.lead_time == 0.0
        assert out.overdue is True

    def test_exact_boundary(self):
        out = lead_time(5.0, 5.0)
        assert out.lead_time_raw == 0.0
        assert out.lead_time == 0.0
        assert out.overdue is False

    def test_negative_tenure_rejected(self):
        with pytest.raises(DataError, match="negative"):
            lead_time(5.0, -1.0)

    @given(st.floats(-100, 100), st.floats(0, 100))
    def test_identity_and_clamp(self, ttl, tenure):
        out = lead_time(ttl, tenure)
        assert out.lead_time_raw == ttl - tenure
        assert out.lead_time == max(0.0, out.lead_time_raw)
        assert out.overdue == (out.lead_time_raw < 0)

    def test_to_dict_keys(self):
        doc = lead_time(3.0, 1.0).to_dict()
        assert set(doc) == {"ttl", "current_tenure", "lead_time_raw",
                            "lead_time", "overdue"}
