"""Feature encoding for the gate classifier.

Race becomes two indicator columns (African-American, Asian) with White
as the reference level, matching the dose model's own encoding. Coded
and continuous features (age decade, height, weight, target INR) are
z-scored with the population standard deviation; binary features pass
through as 0/1 and get identity scaler entries, so one (mean, scale)
pair per column describes the whole transform.

Observed INR and the therapeutic dose are never features: the first is
unknown at prescribing time and the second is the target.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cohort import filter_unbalanced
from .errors import DataError, DomainError, SchemaError
from .records import BINARY_COVARIATES, Race

RACE_INDICATORS = ("race_african_american", "race_asian")
SCALED_FEATURES = ("age_decade", "height_cm", "weight_kg", "target_inr")

# candidate features in canonical order; the unbalanced filter prunes this
FEATURE_CANDIDATES = (
    "age_decade",
    "height_cm",
    "weight_kg",
    "gender",
    *RACE_INDICATORS,
    "target_inr",
    *BINARY_COVARIATES,
)


@dataclass(frozen=True)
class FeatureMatrix:
    """Standardized rows plus the scaler that produced them."""

    feature_names: tuple
    x: np.ndarray  # (n, d) after scaling
    means: np.ndarray  # (d,)
    scales: np.ndarray  # (d,)
    labels: np.ndarray | None = None  # (n,) in {-1,+1} when present

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        means = np.asarray(self.means, dtype=float)
        scales = np.asarray(self.scales, dtype=float)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "scales", scales)
        d = len(self.feature_names)
        if x.ndim != 2 or x.shape[1] != d:
            raise DomainError(f"matrix has {x.shape} shape for {d} feature names")
        if means.shape != (d,) or scales.shape != (d,):
            raise DomainError("scaler length does not match feature count")
        if not np.all(scales > 0):
            raise DomainError("scaler scales must be positive")
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=float)
            object.__setattr__(self, "labels", labels)
            if labels.shape != (x.shape[0],):
                raise DomainError("one label per row is required")
            if not np.all(np.isin(labels, (-1.0, 1.0))):
                raise DomainError("labels must be -1 or +1")

    @property
    def n_rows(self) -> int:
        return self.x.shape[0]


def with_labels(fm: FeatureMatrix, labels) -> FeatureMatrix:
    return replace(fm, labels=np.asarray(labels, dtype=float))


def default_feature_names(records, min_minority_fraction: float = 0.10) -> tuple:
    """The classifier feature list for a training cohort.

    Applies the minority-fraction filter to the binary variables and
    always drops enzyme: it stays an input to the dose model but is far
    too rare in this population to carry classifier signal.
    """
    removed = set(filter_unbalanced(records, min_minority_fraction))
    removed.add("enzyme")
    return tuple(name for name in FEATURE_CANDIDATES if name not in removed)


def _raw_value(record, name: str) -> float:
    if name == "race_african_american":
        value = None if record.race is None else float(record.race == Race.AFRICAN_AMERICAN)
    elif name == "race_asian":
        value = None if record.race is None else float(record.race == Race.ASIAN)
    elif name in BINARY_COVARIATES:
        value = record.covariates[name]
    elif name in ("age_decade", "height_cm", "weight_kg", "gender", "target_inr"):
        value = getattr(record, name)
    else:
        raise SchemaError(f"unknown feature name {name!r}")
    if value is None:
        raise DataError(f"record has a missing value for feature {name!r}; impute first")
    return float(value)


def feature_rows(records, feature_names) -> np.ndarray:
    """Raw (unscaled) feature rows; what decision_value expects."""
    names = tuple(feature_names)
    return np.array(
        [[_raw_value(r, name) for name in names] for r in records], dtype=float
    ).reshape(len(records), len(names))


def encode_features(records, feature_names, scaler=None, labels=None) -> FeatureMatrix:
    """Build the standardized matrix.

    With no scaler, one is fit on these rows (population sigma; constant
    columns keep scale 1). Passing a previous FeatureMatrix or a
    (means, scales) pair reuses its transform, e.g. for a test split.
    """
    names = tuple(feature_names)
    raw = feature_rows(records, names)
    if scaler is None:
        means = np.zeros(len(names))
        scales = np.ones(len(names))
        for j, name in enumerate(names):
            if name in SCALED_FEATURES:
                means[j] = float(np.mean(raw[:, j]))
                sigma = float(np.std(raw[:, j]))  # population, divide by n
                scales[j] = sigma if sigma > 0 else 1.0
    elif hasattr(scaler, "means") and hasattr(scaler, "scales"):
        if hasattr(scaler, "feature_names") and tuple(scaler.feature_names) != names:
            raise SchemaError("scaler feature names do not match the requested features")
        means = np.asarray(scaler.means, dtype=float).copy()
        scales = np.asarray(scaler.scales, dtype=float).copy()
    else:
        means, scales = (np.asarray(a, dtype=float).copy() for a in scaler)
    if means.shape != (len(names),) or scales.shape != (len(names),):
        raise SchemaError("scaler length does not match the requested features")
    x = (raw - means) / scales
    return FeatureMatrix(feature_names=names, x=x, means=means, scales=scales, labels=labels)
