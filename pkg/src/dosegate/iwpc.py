"""The IWPC clinical dose model.

A published linear model on the square root of the weekly warfarin dose
(mg/week). The coefficients are compile-time constants; loading
different values from a file is possible but must be explicitly forced,
since silently re-fitted constants would no longer be the clinical
model this package claims to apply.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DomainError, NonPhysicalDoseError, SchemaError
from .records import Race


@dataclass(frozen=True)
class IwpcCoefficients:
    """Additive contributions to sqrt(mg/week)."""

    intercept: float = 4.0376
    age_per_decade: float = -0.2546
    height_per_cm: float = 0.0118
    weight_per_kg: float = 0.0134
    asian: float = -0.6752
    black: float = 0.406
    race_missing: float = 0.0443
    enzyme: float = 1.2799
    amiodarone: float = -0.5695


DEFAULT_COEFFICIENTS = IwpcCoefficients()


def _require(record, name: str):
    value = getattr(record, name)
    if value is None:
        raise DomainError(f"dose model needs {name}, which is missing")
    return value


def predict_sqrt_weekly_dose(record, coeffs: IwpcCoefficients = DEFAULT_COEFFICIENTS) -> float:
    """Linear predictor in sqrt(mg/week) space.

    Exactly one race term contributes; a record with unknown race takes
    the race-missing adjustment (absent from this dataset but kept for
    schema fidelity).
    """
    age = _require(record, "age_decade")
    if not 1 <= age <= 9:
        raise DomainError(f"age_decade {age} outside the 1..9 code range")
    value = (
        coeffs.intercept
        + coeffs.age_per_decade * age
        + coeffs.height_per_cm * _require(record, "height_cm")
        + coeffs.weight_per_kg * _require(record, "weight_kg")
    )
    race = record.race
    if race is None:
        value += coeffs.race_missing
    elif race == Race.ASIAN:
        value += coeffs.asian
    elif race == Race.AFRICAN_AMERICAN:
        value += coeffs.black
    enzyme = record.covariates.get("enzyme")
    amiodarone = record.covariates.get("amiodarone")
    if enzyme is None or amiodarone is None:
        raise DomainError("dose model needs enzyme and amiodarone flags")
    value += coeffs.enzyme * enzyme + coeffs.amiodarone * amiodarone
    if value <= 0:
        raise NonPhysicalDoseError(
            f"sqrt-dose predictor {value:.4f} <= 0; record outside model range"
        )
    return value


def predict_weekly_dose(record, coeffs: IwpcCoefficients = DEFAULT_COEFFICIENTS) -> float:
    """Dose in mg/week: the square of the sqrt-space predictor."""
    root = predict_sqrt_weekly_dose(record, coeffs)
    return root * root


def load_coefficients(path, allow_override: bool = False) -> IwpcCoefficients:
    """Read key=value coefficients; deviations require allow_override."""
    values = {}
    names = {f.name for f in fields(IwpcCoefficients)}
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise SchemaError(f"bad coefficient line: {raw_line!r}")
        values[key] = float(value.strip())
    coeffs = IwpcCoefficients(**values)
    if coeffs != DEFAULT_COEFFICIENTS and not allow_override:
        raise DomainError(
            "coefficient file deviates from the published values; "
            "pass the override flag to use it anyway"
        )
    return coeffs
