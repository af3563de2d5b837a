"""Gate labeling and the gated-application workflow."""

import numpy as np
import pytest

from helpers import make_imputed, make_raw

from dosegate.errors import DegenerateGateError, DomainError, SchemaError
from dosegate.features import encode_features
from dosegate.gate import (
    GateConfig,
    GateLabel,
    classify_records,
    gated_evaluation,
    label_cohort,
    label_record,
    shrink_test_set,
)
from dosegate.iwpc import DEFAULT_COEFFICIENTS, predict_weekly_dose
from dosegate.kernels import KernelSpec
from dosegate.svm import TrainConfig, train
from dosegate.synth import generate_synthetic_cohort

CFG = GateConfig()


def test_label_values():
    assert GateLabel.SAFE_FOR_MODEL == -1
    assert GateLabel.HIGH_RISK == 1


def test_large_error_is_high_risk():
    assert label_record(40.0, 30.0, CFG) == GateLabel.HIGH_RISK


def test_exact_threshold_is_safe():
    # 34.5 vs 30 is exactly 15%; the rule is strict
    assert label_record(34.5, 30.0, CFG) == GateLabel.SAFE_FOR_MODEL


def test_perfect_prediction_is_safe():
    assert label_record(30.0, 30.0, CFG) == GateLabel.SAFE_FOR_MODEL


def test_nonpositive_therapeutic_rejected():
    with pytest.raises(DomainError):
        label_record(30.0, 0.0, CFG)


def test_label_scale_invariance():
    rng = np.random.default_rng(1)
    for _ in range(100):
        pred = float(rng.uniform(5, 80))
        ther = float(rng.uniform(5, 80))
        c = float(rng.uniform(0.01, 50))
        assert label_record(pred, ther, CFG) == label_record(c * pred, c * ther, CFG)


def test_threshold_validation():
    with pytest.raises(DomainError):
        GateConfig(threshold=0.0)
    with pytest.raises(DomainError):
        GateConfig(threshold=1.0)


def test_cohort_with_exact_predictions_all_safe():
    records = []
    for age in range(3, 8):
        probe = make_imputed(age_decade=age)
        records.append(make_imputed(
            age_decade=age,
            therapeutic_dose_mg_week=predict_weekly_dose(probe, DEFAULT_COEFFICIENTS),
        ))
    labels = label_cohort(records, DEFAULT_COEFFICIENTS, CFG)
    assert labels.n_safe == 5 and labels.n_high_risk == 0
    assert all(v == GateLabel.SAFE_FOR_MODEL for v in labels.labels)


def test_empty_cohort_empty_labels():
    labels = label_cohort([], DEFAULT_COEFFICIENTS, CFG)
    assert labels.labels == () and labels.n_safe == 0 and labels.n_high_risk == 0


def test_label_cohort_names_failing_record():
    bad = make_imputed(therapeutic_dose_mg_week=34.0)
    object.__setattr__(bad, "therapeutic_dose_mg_week", -1.0)
    with pytest.raises(DomainError, match="record 1"):
        label_cohort([make_imputed(), bad], DEFAULT_COEFFICIENTS, CFG)


def test_labels_ignore_unrelated_covariates():
    a = make_imputed(covariates={"aspirin": 0, "diabetes": 1})
    b = make_imputed(covariates={"aspirin": 1, "diabetes": 0})
    la = label_cohort([a], DEFAULT_COEFFICIENTS, CFG).labels[0]
    lb = label_cohort([b], DEFAULT_COEFFICIENTS, CFG).labels[0]
    assert la == lb


def _toy_gate_model(signs):
    """Train a model that reproduces the requested sign pattern."""
    rng = np.random.default_rng(0)
    x = np.array([[float(s), rng.normal() * 0.01] for s in signs])
    labels = np.array(signs, dtype=float)
    return train(x, labels, kernel=KernelSpec(variant="linear"),
                 config=TrainConfig(c_regularization=1e4, balance_classes=False,
                                    kkt_tolerance=1e-6, max_passes=400)), x


def test_shrink_indices_follow_predictions():
    model, x = _toy_gate_model([-1, 1, -1, 1])
    from dosegate.features import FeatureMatrix
    fm = FeatureMatrix(feature_names=model.feature_names, x=x,
                       means=model.scaler_means, scales=model.scaler_scales)
    kept = shrink_test_set(fm, model)
    assert kept.tolist() == [0, 2]


def test_shrink_schema_mismatch():
    model, x = _toy_gate_model([-1, 1, -1, 1])
    from dosegate.features import FeatureMatrix
    fm = FeatureMatrix(feature_names=("other", "names"), x=x,
                       means=model.scaler_means, scales=model.scaler_scales)
    with pytest.raises(SchemaError):
        shrink_test_set(fm, model)


def _split_synthetic(n=260, seed=5):
    records = generate_synthetic_cohort(n, seed)
    return records[: n // 2], records[n // 2:]


def test_identity_gate_preserves_metrics():
    train_recs, test_recs = _split_synthetic()
    out = gated_evaluation(train_recs, test_recs, KernelSpec(),
                           gate_mode="identity")
    assert out.report.shrink_ratio == 1.0
    assert out.report.rmse_shrunken == out.report.rmse_original
    assert out.report.mae_shrunken == out.report.mae_original


def test_oracle_gate_bounds_and_threshold():
    train_recs, test_recs = _split_synthetic(seed=6)
    out = gated_evaluation(train_recs, test_recs, KernelSpec(), gate_mode="oracle")
    r = out.report
    assert r.rmse_shrunken <= r.rmse_original
    assert r.mae_shrunken <= r.mae_original
    assert r.accuracy == 1.0
    assert 0.0 < r.shrink_ratio <= 1.0


def test_trained_gate_returns_model_and_plan():
    train_recs, test_recs = _split_synthetic(seed=7)
    out = gated_evaluation(train_recs, test_recs, KernelSpec(),
                           train_config=TrainConfig(c_regularization=1.0, seed=7))
    assert out.model is not None
    assert out.plan is not None
    assert 0.0 < out.report.shrink_ratio <= 1.0
    assert len(out.feature_names) >= 5


def test_degenerate_gate_carries_original_metrics():
    # every test dose is wildly wrong, so the oracle keeps nothing
    train_recs, _ = _split_synthetic(seed=8)
    bad_test = [make_raw(therapeutic_dose_mg_week=500.0 + i) for i in range(30)]
    with pytest.raises(DegenerateGateError) as info:
        gated_evaluation(train_recs, bad_test, KernelSpec(), gate_mode="oracle")
    assert info.value.report is not None
    assert info.value.report["rmse_original"] > 0


def test_classify_records_matches_decision_sign():
    train_recs, test_recs = _split_synthetic(seed=9)
    out = gated_evaluation(train_recs, test_recs, KernelSpec(),
                           train_config=TrainConfig(seed=9))
    from dosegate.cohort import apply_imputation
    imputed = [apply_imputation(out.plan, r) for r in test_recs]
    scores, signs = classify_records(out.model, imputed)
    assert np.all((scores >= 0) == (signs == 1))
    assert set(np.unique(signs)) <= {-1, 1}
