"""Command-line entry point.

Subcommands: synth | ingest | train | evaluate | gate | dose | report.
Configuration comes from defaults, then an optional key=value config
file, then flags; the effective configuration is echoed into the output
directory so a run can be reproduced from its artifacts alone. All
artifacts are deterministic for a fixed seed and input (no timestamps).

Exit codes: 0 success, 1 usage, 2 data/schema, 3 numerical/degenerate.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .cohort import (
    CANONICAL_SCHEMA,
    apply_imputation,
    cohort_to_text,
    filter_unbalanced,
    fit_imputation,
    load_schema,
    parse_cohort,
    plan_from_text,
    plan_to_text,
    split_cohort,
)
from .crossval import select_c
from .errors import (
    DataError,
    DegenerateGateError,
    DosegateError,
    NumericalError,
    UsageError,
)
from .features import default_feature_names, encode_features
from .gate import GateConfig, GateLabel, classify_records, label_cohort
from .iwpc import DEFAULT_COEFFICIENTS, load_coefficients, predict_sqrt_weekly_dose
from .kernels import KernelSpec
from .metrics import confusion, fmt_metric, mae, metrics, rmse
from .model_io import load_model, save_model
from .records import BINARY_COVARIATES
from .svm import TrainConfig, train

_DEFAULTS = {
    "seed": 0,
    "train_fraction": 0.5,
    "threshold": 0.15,
    "kernel": "polynomial degree=2 offset=1.0",
    "c_grid": "0.1,1,10,100",
    "cv_k": 10,
    "balance_classes": True,
    "n": 1000,
    "gate_mode": "trained",
}

_CONFIG_TYPES = {
    "command": str,  # present in echoed configs; informational only
    "input": str,
    "schema": str,
    "out_dir": str,
    "run_dir": str,
    "model": str,
    "plan": str,
    "coefficients": str,
    "seed": int,
    "train_fraction": float,
    "threshold": float,
    "kernel": str,
    "c_grid": str,
    "cv_k": int,
    "balance_classes": bool,
    "n": int,
    "gate_mode": str,
}

DOSE_REQUIRED_FIELDS = (
    "age_decade", "height_cm", "weight_kg", "race", "enzyme", "amiodarone",
)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _read_config_file(path) -> dict:
    values = {}
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _CONFIG_TYPES:
            raise UsageError(f"bad config line: {raw_line!r}")
        caster = _CONFIG_TYPES[key]
        values[key] = _parse_bool(value) if caster is bool else caster(value)
    return values


def _effective_config(args: argparse.Namespace, keys) -> dict:
    """defaults < config file < explicit flags, restricted to ``keys``."""
    merged = {k: _DEFAULTS[k] for k in keys if k in _DEFAULTS}
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config)
        merged.update({k: v for k, v in file_values.items() if k in keys})
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _config_text(config: dict) -> str:
    # out_dir is where the echo itself lives; omitting it keeps artifacts
    # byte-identical across runs that differ only in destination
    lines = []
    for key in sorted(config):
        value = config[key]
        if value is None or key == "out_dir":
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def _out_dir(config: dict) -> Path:
    if not config.get("out_dir"):
        raise UsageError("an output directory is required (--out-dir)")
    path = Path(config["out_dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_cohort_file(path) -> tuple:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"cohort file not found: {path}") from None
    return parse_cohort(text, CANONICAL_SCHEMA)


def _coefficients(config: dict):
    if config.get("coefficients"):
        return load_coefficients(config["coefficients"],
                                 allow_override=bool(config.get("allow_override")))
    return DEFAULT_COEFFICIENTS


def cmd_synth(args) -> int:
    config = _effective_config(args, ("n", "seed", "out_dir"))
    out = _out_dir(config)
    from .synth import generate_synthetic_cohort

    records = generate_synthetic_cohort(config["n"], config["seed"])
    (out / "cohort.tsv").write_text(cohort_to_text(records), encoding="ascii")
    (out / "config.txt").write_text(_config_text({"command": "synth", **config}),
                                    encoding="ascii")
    print(f"wrote {len(records)} synthetic patients to {out / 'cohort.tsv'}")
    return 0


def cmd_ingest(args) -> int:
    config = _effective_config(args, ("input", "schema", "out_dir"))
    if not config.get("input"):
        raise UsageError("an input file is required (--input)")
    out = _out_dir(config)
    schema = load_schema(config["schema"]) if config.get("schema") else dict(CANONICAL_SCHEMA)
    try:
        text = Path(config["input"]).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"input file not found: {config['input']}") from None
    result = parse_cohort(text, schema)
    removed = filter_unbalanced(result.records)

    (out / "cohort.tsv").write_text(cohort_to_text(result.records), encoding="ascii")
    (out / "removed_variables.txt").write_text(
        "".join(f"{name}\n" for name in removed), encoding="ascii")
    exclusions = (
        f"data_rows {result.n_data_rows}\n"
        f"excluded_missing_dose {result.excluded_missing_dose}\n"
        f"excluded_inr {result.excluded_inr}\n"
        f"usable_rows {len(result.records)}\n"
    )
    (out / "exclusions.txt").write_text(exclusions, encoding="ascii")
    (out / "config.txt").write_text(_config_text({"command": "ingest", **config}),
                                    encoding="ascii")
    print(f"ingested {len(result.records)} of {result.n_data_rows} rows "
          f"({result.n_excluded} excluded); removed variables: "
          f"{', '.join(removed) if removed else 'none'}")
    return 0


def _cv_report_lines(selection, cv_k: int) -> list:
    lines = [f"cv_folds {cv_k}"]
    for c in sorted(selection.results):
        cv = selection.results[c]
        skipped = f" skipped_folds {cv.n_skipped}" if cv.n_skipped else ""
        lines.append(
            f"c {c:g} mean_accuracy {cv.mean_accuracy:.6f} "
            f"std {cv.std_accuracy:.6f}{skipped}"
        )
    lines.append(f"selected_c {selection.best_c:g}")
    return lines


def cmd_train(args) -> int:
    keys = ("input", "out_dir", "seed", "train_fraction", "threshold",
            "kernel", "c_grid", "cv_k", "balance_classes", "coefficients")
    config = _effective_config(args, keys)
    if not config.get("input"):
        raise UsageError("a normalized cohort file is required (--input)")
    out = _out_dir(config)
    coeffs = _coefficients(config)

    records = _load_cohort_file(config["input"]).records
    train_recs, test_recs = split_cohort(records, config["train_fraction"], config["seed"])

    plan = fit_imputation(train_recs)
    imputed_train = [apply_imputation(plan, r) for r in train_recs]
    gate_config = GateConfig(threshold=config["threshold"])
    labels = label_cohort(imputed_train, coeffs, gate_config)
    feature_names = default_feature_names(train_recs)
    fm = encode_features(imputed_train, feature_names, labels=labels.signs())

    kernel = KernelSpec.from_text(config["kernel"])
    base = TrainConfig(balance_classes=config["balance_classes"], seed=config["seed"])
    grid = tuple(float(v) for v in str(config["c_grid"]).split(",") if v.strip())
    if not grid:
        raise UsageError("the C grid is empty")

    report_lines = [
        f"train_rows {len(train_recs)}",
        f"test_rows {len(test_recs)}",
        f"train_high_risk {labels.n_high_risk}",
        f"train_safe {labels.n_safe}",
        "features " + " ".join(feature_names),
    ]
    if len(grid) == 1:
        best_c = grid[0]
        report_lines.append(f"selected_c {best_c:g} (single-value grid, no CV)")
    else:
        selection = select_c(fm, kernel, grid, k=config["cv_k"],
                             seed=config["seed"], base_config=base)
        best_c = selection.best_c
        report_lines.extend(_cv_report_lines(selection, config["cv_k"]))

    model = train(fm, kernel=kernel, config=replace(base, c_regularization=best_c))
    report_lines.extend([
        f"support_vectors {model.alphas.size}",
        f"converged {1 if model.converged else 0}",
        f"max_kkt_violation {model.max_kkt_violation:.17g}",
        f"dual_objective {model.dual_objective:.17g}",
    ])

    save_model(model, out / "model.txt")
    (out / "plan.txt").write_text(plan_to_text(plan), encoding="ascii")
    (out / "test.tsv").write_text(cohort_to_text(test_recs), encoding="ascii")
    (out / "train_report.txt").write_text("".join(f"{ln}\n" for ln in report_lines),
                                          encoding="ascii")
    (out / "config.txt").write_text(_config_text({"command": "train", **config}),
                                    encoding="ascii")
    status = "converged" if model.converged else (
        f"NOT CONVERGED (max KKT violation {model.max_kkt_violation:.3g})")
    print(f"trained on {len(train_recs)} rows, C={best_c:g}, "
          f"{model.alphas.size} support vectors, {status}")
    print(f"artifacts in {out}")
    return 0


def _evaluation_payload(report, gate_mode: str) -> dict:
    return {
        "gate_mode": gate_mode,
        "accuracy": report.accuracy,
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        "tp": report.confusion.tp,
        "fp": report.confusion.fp,
        "tn": report.confusion.tn,
        "fn": report.confusion.fn,
        "rmse_original": report.rmse_original,
        "rmse_shrunken": report.rmse_shrunken,
        "mae_original": report.mae_original,
        "mae_shrunken": report.mae_shrunken,
        "shrink_ratio": report.shrink_ratio,
    }


def _evaluation_text(report, gate_mode: str) -> str:
    lines = [
        f"gate_mode {gate_mode}",
        "",
        "classifier (HighRisk positive)",
        f"  accuracy    {fmt_metric(report.accuracy, percent=True)}",
        f"  sensitivity {fmt_metric(report.sensitivity, percent=True)}",
        f"  specificity {fmt_metric(report.specificity, percent=True)}",
        f"  confusion   tp={report.confusion.tp} fp={report.confusion.fp} "
        f"tn={report.confusion.tn} fn={report.confusion.fn}",
        "",
        "dose model error (mg/week)      original   shrunken",
        f"  rmse                          {report.rmse_original:8.3f}   {report.rmse_shrunken:8.3f}",
        f"  mae                           {report.mae_original:8.3f}   {report.mae_shrunken:8.3f}",
        "",
        f"retained fraction of test set {report.shrink_ratio:.4f}",
    ]
    return "\n".join(lines) + "\n"


def _require_run_dir(config: dict) -> Path:
    run_dir = config.get("run_dir") or config.get("out_dir")
    if not run_dir:
        raise UsageError("a run directory from `train` is required (--run-dir)")
    path = Path(run_dir)
    if not (path / "model.txt").exists():
        raise DataError(f"{path} does not contain model.txt (run `train` first)")
    return path


def cmd_evaluate(args) -> int:
    config = _effective_config(args, ("run_dir", "gate_mode", "threshold", "coefficients"))
    run_dir = _require_run_dir(config)
    gate_mode = config["gate_mode"]
    coeffs = _coefficients(config)
    gate_config = GateConfig(threshold=config["threshold"])

    model = load_model(run_dir / "model.txt")
    plan = plan_from_text((run_dir / "plan.txt").read_text(encoding="utf-8"))
    test_recs = _load_cohort_file(run_dir / "test.tsv").records

    imputed = [apply_imputation(plan, r) for r in test_recs]
    truth_labels = label_cohort(imputed, coeffs, gate_config)
    truth = truth_labels.signs().astype(int)

    if gate_mode == "trained":
        _, predicted = classify_records(model, imputed)
    elif gate_mode == "oracle":
        predicted = truth.copy()
    elif gate_mode == "identity":
        predicted = np.full(truth.shape, -1, dtype=int)
    else:
        raise UsageError(f"unknown gate mode {gate_mode!r}")

    from .iwpc import predict_weekly_dose

    actual = np.array([r.therapeutic_dose_mg_week for r in test_recs])
    model_dose = np.array([predict_weekly_dose(r, coeffs) for r in imputed])
    kept = np.flatnonzero(predicted == -1)
    if kept.size == 0:
        raise DegenerateGateError(
            "gate kept no test patients; nothing to evaluate on "
            f"(original rmse {rmse(actual, model_dose):.3f})",
            report={"rmse_original": rmse(actual, model_dose),
                    "mae_original": mae(actual, model_dose)},
        )
    summary = metrics(confusion(truth, predicted))

    from .metrics import EvalReport

    report = EvalReport(
        accuracy=summary.accuracy,
        sensitivity=summary.sensitivity,
        specificity=summary.specificity,
        rmse_original=rmse(actual, model_dose),
        rmse_shrunken=rmse(actual[kept], model_dose[kept]),
        mae_original=mae(actual, model_dose),
        mae_shrunken=mae(actual[kept], model_dose[kept]),
        shrink_ratio=kept.size / truth.size,
        confusion=confusion(truth, predicted),
    )
    (run_dir / "evaluation.txt").write_text(_evaluation_text(report, gate_mode),
                                            encoding="utf-8")
    (run_dir / "evaluation.json").write_text(
        json.dumps(_evaluation_payload(report, gate_mode), sort_keys=True, indent=2) + "\n",
        encoding="ascii")
    sys.stdout.write(_evaluation_text(report, gate_mode))
    return 0


def cmd_gate(args) -> int:
    config = _effective_config(args, ("run_dir", "input", "threshold", "coefficients"))
    run_dir = _require_run_dir(config)
    coeffs = _coefficients(config)
    model = load_model(run_dir / "model.txt")
    plan = plan_from_text((run_dir / "plan.txt").read_text(encoding="utf-8"))
    source = config.get("input") or run_dir / "test.tsv"
    records = _load_cohort_file(source).records

    from .iwpc import predict_weekly_dose

    imputed = [apply_imputation(plan, r) for r in records]
    scores, signs = classify_records(model, imputed)
    n_safe = int(np.sum(signs < 0))

    if args.jsonl:
        for i, (rec, score, sign) in enumerate(zip(imputed, scores, signs), start=1):
            payload = {
                "id": i,
                "predicted_dose_mg_week": round(predict_weekly_dose(rec, coeffs), 6),
                "decision_value": round(float(score), 9),
                "label": "HighRisk" if sign > 0 else "SafeForModel",
                "model_version": 1,
            }
            print(json.dumps(payload, sort_keys=True))
        print(f"safe {n_safe} of {len(records)}", file=sys.stderr)
    else:
        print("id\tpredicted_dose_mg_week\tlabel\tdecision_value")
        for i, (rec, score, sign) in enumerate(zip(imputed, scores, signs), start=1):
            label = "HighRisk" if sign > 0 else "SafeForModel"
            print(f"{i}\t{predict_weekly_dose(rec, coeffs):.3f}\t{label}\t{score:.6f}")
        print(f"# safe {n_safe} of {len(records)} "
              f"({100.0 * n_safe / len(records):.1f}% retained)")
    return 0


def _patient_from_pairs(pairs, plan) -> dict:
    values = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise UsageError(f"patient fields are key=value, got {pair!r}")
        key = key.strip()
        if key not in _PATIENT_FIELDS:
            raise UsageError(f"unknown patient field {key!r}")
        values[key] = _PATIENT_FIELDS[key](value.strip())
    missing = [k for k in DOSE_REQUIRED_FIELDS if k not in values]
    if missing:
        raise UsageError("missing required patient fields: " + ", ".join(missing))
    if plan is not None:
        for name in ("age_decade", "height_cm", "weight_kg", "gender", "target_inr"):
            values.setdefault(name, plan.means.get(name, plan.modes.get(name)))
        values.setdefault("race", plan.modes["race"])
        for name in BINARY_COVARIATES:
            values.setdefault(name, plan.modes[name])
    else:
        needed = ("gender", "target_inr", *BINARY_COVARIATES)
        still_missing = [k for k in needed if k not in values]
        if still_missing:
            raise UsageError(
                "no imputation plan available; also provide: " + ", ".join(still_missing)
            )
    return values


def _parse_race_arg(text: str):
    from .cohort import _parse_race

    race = _parse_race(text)
    if race is None:
        raise UsageError(f"cannot read race {text!r} (use 1/2/3 or white/black/asian)")
    return race


_PATIENT_FIELDS = {
    "age_decade": int,
    "height_cm": float,
    "weight_kg": float,
    "race": _parse_race_arg,
    "gender": int,
    "target_inr": float,
    **{name: int for name in BINARY_COVARIATES},
}


def cmd_dose(args) -> int:
    config = _effective_config(args, ("run_dir", "model", "plan", "threshold", "coefficients"))
    coeffs = _coefficients(config)
    if config.get("model"):
        model = load_model(config["model"])
        plan = (plan_from_text(Path(config["plan"]).read_text(encoding="utf-8"))
                if config.get("plan") else None)
    else:
        run_dir = _require_run_dir(config)
        model = load_model(run_dir / "model.txt")
        plan = plan_from_text((run_dir / "plan.txt").read_text(encoding="utf-8"))

    values = _patient_from_pairs(args.patient, plan)
    from .records import ImputedPatientRecord, Race

    # inr and therapeutic dose are unknown at prescribing time and feed
    # neither the dose model nor the gate features; placeholders satisfy
    # the record type only
    record = ImputedPatientRecord(
        inr=2.5,
        therapeutic_dose_mg_week=1.0,
        age_decade=values["age_decade"],
        height_cm=values["height_cm"],
        weight_kg=values["weight_kg"],
        race=Race(values["race"]),
        gender=int(values["gender"]),
        target_inr=float(values["target_inr"]),
        covariates={name: int(values[name]) for name in BINARY_COVARIATES},
    )
    sqrt_dose = predict_sqrt_weekly_dose(record, coeffs)
    scores, signs = classify_records(model, [record])
    label = GateLabel(int(signs[0]))
    print(f"sqrt_dose {sqrt_dose:.4f}")
    print(f"dose_mg_week {sqrt_dose * sqrt_dose:.3f}")
    if label == GateLabel.HIGH_RISK:
        print("gate HighRisk (model not recommended for this patient)")
    else:
        print("gate SafeForModel")
    print(f"decision_value {scores[0]:.6f}")
    return 0


def cmd_report(args) -> int:
    config = _effective_config(args, ("run_dir",))
    run_dir = _require_run_dir(config)
    eval_path = run_dir / "evaluation.json"
    if not eval_path.exists():
        raise DataError(f"{eval_path} not found; run `evaluate` first")
    payload = json.loads(eval_path.read_text(encoding="utf-8"))
    model = load_model(run_dir / "model.txt")
    print(f"run {run_dir}")
    print(f"model: kernel {model.kernel.to_text()}, {model.alphas.size} support vectors, "
          f"{'converged' if model.converged else 'NOT converged'}")
    print(f"gate mode {payload['gate_mode']}")
    acc = payload["accuracy"]
    sens = payload["sensitivity"]
    spec = payload["specificity"]
    print(f"accuracy {fmt_metric(acc, percent=True)}  "
          f"sensitivity {fmt_metric(sens, percent=True)}  "
          f"specificity {fmt_metric(spec, percent=True)}")
    print(f"rmse {payload['rmse_original']:.3f} -> {payload['rmse_shrunken']:.3f}  "
          f"mae {payload['mae_original']:.3f} -> {payload['mae_shrunken']:.3f}  "
          f"retained {payload['shrink_ratio']:.3f}")
    return 0


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="dosegate",
                     description="Gated warfarin dosing: clinical dose model "
                                 "behind a learned safety gate.")
    parser.add_argument("--version", action="version", version=f"dosegate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic cohort", parents=[])
    _add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="normalize a raw cohort export")
    _add_common(p)
    p.add_argument("--input", default=None)
    p.add_argument("--schema", default=None, help="column-map file (key=value)")
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="split, impute, label, and fit the gate")
    _add_common(p)
    p.add_argument("--input", default=None, help="normalized cohort (.tsv)")
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--kernel", default=None, help='e.g. "polynomial degree=2 offset=1"')
    p.add_argument("--c-grid", dest="c_grid", default=None, help="comma-separated C values")
    p.add_argument("--cv-k", dest="cv_k", type=int, default=None)
    p.add_argument("--balance", dest="balance_classes", action="store_const",
                   const=True, default=None)
    p.add_argument("--no-balance", dest="balance_classes", action="store_const", const=False)
    p.add_argument("--coefficients", default=None, help="override coefficient file")
    p.add_argument("--allow-coefficient-override", dest="allow_override",
                   action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score the trained gate on the held-out test set")
    _add_common(p)
    p.add_argument("--run-dir", dest="run_dir", default=None)
    p.add_argument("--gate-mode", dest="gate_mode", default=None,
                   choices=("trained", "identity", "oracle"))
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--coefficients", default=None)
    p.add_argument("--allow-coefficient-override", dest="allow_override",
                   action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gate", help="per-patient gate decisions")
    _add_common(p)
    p.add_argument("--run-dir", dest="run_dir", default=None)
    p.add_argument("--input", default=None, help="cohort to gate (default: run's test set)")
    p.add_argument("--jsonl", action="store_true", help="one JSON object per patient")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--coefficients", default=None)
    p.add_argument("--allow-coefficient-override", dest="allow_override",
                   action="store_true")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("dose", help="dose one patient given as key=value pairs")
    _add_common(p)
    p.add_argument("--run-dir", dest="run_dir", default=None)
    p.add_argument("--model", default=None, help="model file (alternative to --run-dir)")
    p.add_argument("--plan", default=None, help="imputation plan file")
    p.add_argument("--coefficients", default=None)
    p.add_argument("--allow-coefficient-override", dest="allow_override",
                   action="store_true")
    p.add_argument("patient", nargs="*", help="key=value patient fields")
    p.set_defaults(func=cmd_dose)

    p = sub.add_parser("report", help="summarize a finished run directory")
    _add_common(p)
    p.add_argument("--run-dir", dest="run_dir", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dosegate {args.command}: usage error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"dosegate {args.command}: numerical error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"dosegate {args.command}: data error: {exc}", file=sys.stderr)
        return 2
    except DosegateError as exc:
        print(f"dosegate {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
