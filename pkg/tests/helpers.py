"""Shared record factories and toy-data generators for the test suite."""

import numpy as np

from dosegate.records import (
    BINARY_COVARIATES,
    ImputedPatientRecord,
    Race,
    RawPatientRecord,
)


def make_imputed(**overrides):
    values = {
        "inr": 2.5,
        "therapeutic_dose_mg_week": 34.0,
        "age_decade": 5,
        "height_cm": 170.0,
        "weight_kg": 80.0,
        "race": Race.WHITE,
        "gender": 1,
        "target_inr": 2.5,
        "covariates": {name: 0 for name in BINARY_COVARIATES},
    }
    cov_overrides = overrides.pop("covariates", {})
    values.update(overrides)
    values["covariates"] = {**values["covariates"], **cov_overrides}
    return ImputedPatientRecord(**values)


def make_raw(**overrides):
    values = {
        "inr": 2.5,
        "therapeutic_dose_mg_week": 34.0,
        "age_decade": 5,
        "height_cm": 170.0,
        "weight_kg": 80.0,
        "race": Race.WHITE,
        "gender": 1,
        "target_inr": 2.5,
        "covariates": {name: 0 for name in BINARY_COVARIATES},
    }
    cov_overrides = overrides.pop("covariates", {})
    values.update(overrides)
    values["covariates"] = {**values["covariates"], **cov_overrides}
    return RawPatientRecord(**values)


def separable_blobs(rng, n_per_class=15, gap=4.0, dims=2):
    """Two well-separated Gaussian blobs; linearly separable with margin."""
    neg = rng.normal(-gap / 2.0, 0.5, size=(n_per_class, dims))
    pos = rng.normal(+gap / 2.0, 0.5, size=(n_per_class, dims))
    x = np.vstack([neg, pos])
    labels = np.array([-1.0] * n_per_class + [1.0] * n_per_class)
    order = rng.permutation(len(labels))
    return x[order], labels[order]
