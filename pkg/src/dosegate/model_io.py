"""Flat-text model serialization.

Versioned, self-describing, and bit-exact: floats are written with 17
significant digits, which round-trips IEEE doubles losslessly, so a
reloaded model produces identical decision values. One support vector
per line keeps the format diffable and greppable.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import SchemaError
from .kernels import KernelSpec
from .svm import SvmModel

FORMAT_NAME = "dosegate-svm"
FORMAT_VERSION = 1


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


def model_to_text(model: SvmModel) -> str:
    for name in model.feature_names:
        if not name or any(ch.isspace() for ch in name):
            raise SchemaError(f"feature name {name!r} is not serializable")
    lines = [
        f"{FORMAT_NAME} {FORMAT_VERSION}",
        f"kernel {model.kernel.to_text()}",
        "features " + " ".join(model.feature_names),
        "means " + " ".join(_fmt(v) for v in model.scaler_means),
        "scales " + " ".join(_fmt(v) for v in model.scaler_scales),
        f"bias {_fmt(model.bias)}",
        f"converged {1 if model.converged else 0}",
        f"max_kkt_violation {_fmt(model.max_kkt_violation)}",
        f"dual_objective {_fmt(model.dual_objective)}",
        f"support_vectors {model.alphas.size}",
    ]
    for label, alpha, row in zip(model.sv_labels, model.alphas, model.support_vectors):
        vec = " ".join(_fmt(v) for v in row)
        lines.append(f"{int(label):+d} {_fmt(alpha)} {vec}".rstrip())
    return "\n".join(lines) + "\n"


def _header_value(lines: list[str], index: int, key: str) -> str:
    if index >= len(lines):
        raise SchemaError(f"model text ended before {key!r} line")
    line = lines[index]
    head, _, rest = line.partition(" ")
    if head != key:
        raise SchemaError(f"expected {key!r} line, found {line!r}")
    return rest


def model_from_text(text: str) -> SvmModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError("empty model text")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != FORMAT_NAME:
        raise SchemaError(f"not a {FORMAT_NAME} file: {lines[0]!r}")
    if int(magic[1]) != FORMAT_VERSION:
        raise SchemaError(f"unsupported model format version {magic[1]}")

    kernel = KernelSpec.from_text(_header_value(lines, 1, "kernel"))
    names = tuple(_header_value(lines, 2, "features").split())
    means = np.array([float(v) for v in _header_value(lines, 3, "means").split()])
    scales = np.array([float(v) for v in _header_value(lines, 4, "scales").split()])
    bias = float(_header_value(lines, 5, "bias"))
    converged = _header_value(lines, 6, "converged") == "1"
    max_viol = float(_header_value(lines, 7, "max_kkt_violation"))
    objective = float(_header_value(lines, 8, "dual_objective"))
    n_sv = int(_header_value(lines, 9, "support_vectors"))

    if len(names) != means.size or len(names) != scales.size:
        raise SchemaError("feature names and scaler lengths disagree")
    body = lines[10:]
    if len(body) != n_sv:
        raise SchemaError(f"expected {n_sv} support vector lines, found {len(body)}")
    labels = np.empty(n_sv)
    alphas = np.empty(n_sv)
    vectors = np.empty((n_sv, len(names)))
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2 + len(names):
            raise SchemaError(f"support vector line {i + 1} has {len(parts)} fields")
        if parts[0] not in ("+1", "-1", "1"):
            raise SchemaError(f"bad label {parts[0]!r} on support vector line {i + 1}")
        labels[i] = float(parts[0])
        alphas[i] = float(parts[1])
        vectors[i] = [float(v) for v in parts[2:]]
    return SvmModel(
        kernel=kernel,
        support_vectors=vectors,
        alphas=alphas,
        sv_labels=labels,
        bias=bias,
        feature_names=names,
        scaler_means=means,
        scaler_scales=scales,
        converged=converged,
        max_kkt_violation=max_viol,
        dual_objective=objective,
    )


def save_model(model: SvmModel, path) -> None:
    Path(path).write_text(model_to_text(model), encoding="ascii")


def load_model(path) -> SvmModel:
    return model_from_text(Path(path).read_text(encoding="ascii"))
