"""Kernel functions for the max-margin classifier.

All classification goes through kernel evaluations; the implicit feature
map is never materialized. Supported variants:

    linear       <x, y>
    polynomial   (<x, y> + offset) ** degree
    sigmoid      tanh(<x, y> + theta)
    rbf          exp(-||x - y||^2 / (2 delta^2))
    anova        sum_k exp(-sigma (x_k - y_k)^2) ** d

The polynomial and rbf kernels are positive semidefinite; sigmoid is not
in general, and downstream code must not assume it is.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError

VARIANTS = ("linear", "polynomial", "sigmoid", "rbf", "anova")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel variant plus its parameters.

    Only the parameters relevant to ``variant`` are read; ``n_dims``
    limits the anova sum to the first ``n_dims`` coordinates (None means
    all coordinates; more than the input provides is a domain error).
    """

    variant: str = "polynomial"
    degree: int = 2
    offset: float = 1.0
    theta: float = 0.0
    delta: float = 1.0
    sigma: float = 1.0
    d: int = 1
    n_dims: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "polynomial" and (self.degree < 1 or int(self.degree) != self.degree):
            raise DomainError("polynomial degree must be an integer >= 1")
        if self.variant == "rbf" and not self.delta > 0:
            raise DomainError("rbf delta must be > 0")
        if self.variant == "anova":
            if not self.sigma > 0:
                raise DomainError("anova sigma must be > 0")
            if self.d < 1 or int(self.d) != self.d:
                raise DomainError("anova d must be an integer >= 1")

    def to_text(self) -> str:
        """One-line textual form, e.g. ``polynomial degree=2 offset=1``."""
        relevant = {
            "linear": (),
            "polynomial": ("degree", "offset"),
            "sigmoid": ("theta",),
            "rbf": ("delta",),
            "anova": ("sigma", "d", "n_dims"),
        }[self.variant]
        parts = [self.variant]
        for name in relevant:
            value = getattr(self, name)
            if value is None:
                continue
            parts.append(f"{name}={value!r}" if isinstance(value, str) else f"{name}={value}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "KernelSpec":
        tokens = text.replace(",", " ").split()
        if not tokens:
            raise DomainError("empty kernel specification")
        variant = tokens[0].lower()
        kwargs = {}
        valid = {f.name for f in fields(cls)} - {"variant"}
        for token in tokens[1:]:
            if "=" not in token:
                raise DomainError(f"bad kernel parameter {token!r} (expected key=value)")
            key, raw = token.split("=", 1)
            if key not in valid:
                raise DomainError(f"unknown kernel parameter {key!r}")
            try:
                kwargs[key] = int(raw) if key in ("degree", "d", "n_dims") else float(raw)
            except ValueError:
                raise DomainError(f"unreadable kernel parameter {token!r}") from None
        return cls(variant=variant, **kwargs)


def _cross_apply(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kernel values for every row pair of ``a`` (m rows) and ``b`` (n rows)."""
    if spec.variant == "linear":
        return a @ b.T
    if spec.variant == "polynomial":
        return (a @ b.T + spec.offset) ** spec.degree
    if spec.variant == "sigmoid":
        return np.tanh(a @ b.T + spec.theta)
    if spec.variant == "rbf":
        sq = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        np.maximum(sq, 0.0, out=sq)
        if a is b:
            np.fill_diagonal(sq, 0.0)
        return np.exp(-sq / (2.0 * spec.delta**2))
    if spec.variant == "anova":
        if spec.n_dims is not None and spec.n_dims > a.shape[1]:
            raise DomainError(
                f"anova n_dims={spec.n_dims} exceeds the {a.shape[1]} input dimensions"
            )
        dims = a.shape[1] if spec.n_dims is None else spec.n_dims
        out = np.zeros((a.shape[0], b.shape[0]))
        for k in range(dims):
            diff = a[:, k][:, None] - b[None, :, k]
            out += np.exp(-spec.sigma * diff * diff) ** spec.d
        return out
    raise DomainError(f"unknown kernel variant {spec.variant!r}")


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate the kernel on a single vector pair."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DomainError("kernel_eval expects 1-D vectors")
    if x.shape != y.shape:
        raise DomainError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(_cross_apply(spec, x[None, :], y[None, :])[0, 0])


def kernel_matrix(spec: KernelSpec, a, b) -> np.ndarray:
    """Kernel values between the rows of two matrices."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise DomainError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return _cross_apply(spec, a, b)


def gram_matrix(spec: KernelSpec, rows) -> np.ndarray:
    """Full kernel matrix of a sample against itself, exactly symmetric.

    Each unordered pair is evaluated once; the upper triangle is mirrored
    so G[i, j] and G[j, i] are the same float.
    """
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DomainError("gram_matrix expects a non-empty 2-D sample")
    g = _cross_apply(spec, x, x)
    iu, ju = np.triu_indices(g.shape[0], k=1)
    g[ju, iu] = g[iu, ju]
    return g
