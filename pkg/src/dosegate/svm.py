"""Soft-margin kernel SVM trained by pairwise dual coordinate ascent.

The trainer maximizes the dual

    W(a) = sum_i a_i - 1/2 sum_ij a_i a_j z_i z_j K(x_i, x_j)
    s.t.  0 <= a_i <= C_i,  sum_i a_i z_i = 0

by repeatedly solving closed-form two-variable subproblems (SMO style):
pick a maximal KKT violator, pair it with the index of largest error
difference, and update the pair analytically. C_i is the box bound,
optionally scaled per class to counter imbalance.

Models keep their support vectors in standardized feature space along
with the scaler, so decision_value accepts raw-space inputs and scales
internally. w is never formed; everything goes through the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabelsError, DomainError, NumericalError, SchemaError
from .kernels import KernelSpec, kernel_matrix

FULL_GRAM_LIMIT = 4000  # rows; above this kernel rows are cached lazily


@dataclass(frozen=True)
class TrainConfig:
    """Knobs for the dual solver.

    class_weights scales C per class as (scale for -1, scale for +1);
    when it is None and balance_classes is set, inverse class
    frequencies are used. seed only randomizes tie-breaking in the
    second-index search, so results are reproducible bit for bit.
    """

    c_regularization: float = 1.0
    kkt_tolerance: float = 1e-3
    numeric_epsilon: float = 1e-12
    max_passes: int = 200
    class_weights: tuple[float, float] | None = None
    balance_classes: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.c_regularization > 0:
            raise DomainError("c_regularization must be > 0")
        if not self.kkt_tolerance > 0:
            raise DomainError("kkt_tolerance must be > 0")
        if not self.numeric_epsilon > 0:
            raise DomainError("numeric_epsilon must be > 0")
        if self.max_passes < 1:
            raise DomainError("max_passes must be >= 1")
        if self.class_weights is not None:
            lo, hi = self.class_weights
            if not (lo > 0 and hi > 0):
                raise DomainError("class_weights must both be positive")


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: the kernel expansion plus its scaler."""

    kernel: KernelSpec
    support_vectors: np.ndarray  # (m, d), standardized space
    alphas: np.ndarray  # (m,), all in (0, C_i]
    sv_labels: np.ndarray  # (m,), -1/+1
    bias: float
    feature_names: tuple[str, ...]
    scaler_means: np.ndarray  # (d,)
    scaler_scales: np.ndarray  # (d,)
    converged: bool
    max_kkt_violation: float
    dual_objective: float


class _Gram:
    """Kernel matrix access: dense below FULL_GRAM_LIMIT, else row cache."""

    def __init__(self, spec: KernelSpec, x: np.ndarray):
        self._spec = spec
        self._x = x
        n = x.shape[0]
        if n <= FULL_GRAM_LIMIT:
            self._full = kernel_matrix(spec, x, x)
            self._rows = None
        else:
            self._full = None
            self._rows: dict[int, np.ndarray] = {}
        self.diag = (
            np.diagonal(self._full).copy()
            if self._full is not None
            else np.array([kernel_matrix(spec, x[i : i + 1], x[i : i + 1])[0, 0] for i in range(n)])
        )

    def col(self, i: int) -> np.ndarray:
        # columns equal rows by kernel symmetry
        if self._full is not None:
            return self._full[:, i]
        row = self._rows.get(i)
        if row is None:
            row = kernel_matrix(self._spec, self._x[i : i + 1], self._x)[0]
            self._rows[i] = row
        return row

    def scores(self, weighted: np.ndarray) -> np.ndarray:
        """Exact K @ weighted, touching only nonzero entries of weighted."""
        if self._full is not None:
            return self._full @ weighted
        live = np.flatnonzero(weighted)
        if live.size == 0:
            return np.zeros(self._x.shape[0])
        return kernel_matrix(self._spec, self._x, self._x[live]) @ weighted[live]


def _unpack_training(x, labels):
    if hasattr(x, "feature_names") and hasattr(x, "x"):
        data = np.asarray(x.x, dtype=float)
        lab = x.labels if labels is None else labels
        names = tuple(x.feature_names)
        means = np.asarray(x.means, dtype=float)
        scales = np.asarray(x.scales, dtype=float)
    else:
        data = np.atleast_2d(np.asarray(x, dtype=float))
        lab = labels
        names = tuple(f"f{i}" for i in range(data.shape[1]))
        means = np.zeros(data.shape[1])
        scales = np.ones(data.shape[1])
    if lab is None:
        raise DegenerateLabelsError("training labels are required")
    z = np.asarray(lab, dtype=float)
    if z.shape != (data.shape[0],):
        raise DomainError("one label per training row is required")
    if not np.all(np.isin(z, (-1.0, 1.0))):
        raise DomainError("labels must be -1 or +1")
    if not np.all(np.isfinite(data)):
        raise DomainError("training features must be finite")
    return data, z, names, means, scales


def _box_bounds(z: np.ndarray, config: TrainConfig) -> np.ndarray:
    if config.class_weights is not None:
        w_neg, w_pos = config.class_weights
    elif config.balance_classes:
        n = z.size
        n_pos = int(np.count_nonzero(z > 0))
        n_neg = n - n_pos
        w_neg = n / (2.0 * n_neg)
        w_pos = n / (2.0 * n_pos)
    else:
        w_neg = w_pos = 1.0
    return np.where(z > 0, config.c_regularization * w_pos, config.c_regularization * w_neg)


def _final_bias(alpha: np.ndarray, z: np.ndarray, scores: np.ndarray,
                upper: np.ndarray, snap: np.ndarray) -> float:
    in_bound = (alpha > snap) & (alpha < upper - snap)
    if in_bound.any():
        return float(np.mean(z[in_bound] - scores[in_bound]))
    lo, hi = -np.inf, np.inf
    for i in range(alpha.size):
        bound = z[i] - scores[i]
        at_zero = alpha[i] <= snap[i]
        if (at_zero and z[i] > 0) or (not at_zero and z[i] < 0):
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    if not np.isfinite(lo):
        lo = hi
    if not np.isfinite(hi):
        hi = lo
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise NumericalError("bias is unconstrained; training degenerate")
    return float(0.5 * (lo + hi))


def train(x, labels=None, kernel: KernelSpec = KernelSpec(),
          config: TrainConfig = TrainConfig()) -> SvmModel:
    """Fit the classifier. ``x`` is a feature matrix (standardized rows
    plus scaler metadata) or a plain array treated as already scaled."""
    data, z, names, means, scales = _unpack_training(x, labels)
    n = data.shape[0]
    if n < 2 or np.all(z == z[0]):
        raise DegenerateLabelsError("training needs at least one example of each class")

    upper = _box_bounds(z, config)
    snap = 1e-12 * np.maximum(1.0, upper)
    gram = _Gram(kernel, data)
    rng = np.random.default_rng(config.seed)

    alpha = np.zeros(n)
    score = np.zeros(n)  # sum_j a_j z_j K(j, i); bias tracked separately
    b = 0.0
    tol = config.kkt_tolerance
    budget = config.max_passes * n
    updates = 0
    excluded: set[int] = set()

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, updates
        if i1 == i2:
            return False
        a1, a2 = alpha[i1], alpha[i2]
        z1, z2 = z[i1], z[i2]
        c1, c2 = upper[i1], upper[i2]
        e1 = score[i1] + b - z1
        e2 = score[i2] + b - z2
        s = z1 * z2
        if s < 0:
            lo, hi = max(0.0, a2 - a1), min(c2, c1 + a2 - a1)
        else:
            lo, hi = max(0.0, a1 + a2 - c1), min(c2, a1 + a2)
        if hi - lo < 1e-15:
            return False
        k11 = gram.col(i1)[i1]
        k22 = gram.col(i2)[i2]
        k12 = gram.col(i1)[i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 1e-300:
            a2_new = a2 + z2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, lo), hi)
        else:
            # flat or indefinite direction: the 1-D objective is convex,
            # so the maximum sits at a segment endpoint
            t_lo, t_hi = lo - a2, hi - a2
            gain_lo = t_lo * z2 * (e1 - e2) - 0.5 * t_lo * t_lo * eta
            gain_hi = t_hi * z2 * (e1 - e2) - 0.5 * t_hi * t_hi * eta
            a2_new = lo if gain_lo >= gain_hi else hi
        d2 = a2_new - a2
        if abs(d2) < 1e-12:
            return False
        if eta <= 1e-300 and d2 * z2 * (e1 - e2) - 0.5 * d2 * d2 * eta <= 1e-15:
            return False
        a1_new = a1 + s * (a2 - a2_new)
        if a1_new < snap[i1]:
            a1_new = 0.0
        elif a1_new > c1 - snap[i1]:
            a1_new = c1
        if a2_new < snap[i2]:
            a2_new = 0.0
        elif a2_new > c2 - snap[i2]:
            a2_new = c2
        d1, d2 = a1_new - a1, a2_new - a2
        b1 = b - e1 - z1 * d1 * k11 - z2 * d2 * k12
        b2 = b - e2 - z1 * d1 * k12 - z2 * d2 * k22
        if snap[i1] < a1_new < c1 - snap[i1]:
            b_new = b1
        elif snap[i2] < a2_new < c2 - snap[i2]:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        alpha[i1], alpha[i2] = a1_new, a2_new
        score[:] += z1 * d1 * gram.col(i1) + z2 * d2 * gram.col(i2)
        b = b_new
        updates += 1
        return True

    def second_choice(i1: int, err: np.ndarray, in_bound: np.ndarray) -> bool:
        cand = np.flatnonzero(in_bound)
        if cand.size:
            j = cand[int(np.argmax(np.abs(err[i1] - err[cand])))]
            if take_step(i1, j):
                return True
            start = int(rng.integers(cand.size))
            for off in range(cand.size):
                if take_step(i1, int(cand[(start + off) % cand.size])):
                    return True
        start = int(rng.integers(n))
        for off in range(n):
            if take_step(i1, (start + off) % n):
                return True
        return False

    converged = False
    refreshes_left = 50

    def refresh_scores() -> bool:
        # incremental score updates drift over thousands of steps;
        # recompute exactly before trusting a convergence/stall verdict
        nonlocal refreshes_left
        exact = gram.scores(alpha * z)
        if float(np.max(np.abs(exact - score))) <= 0.05 * tol or refreshes_left <= 0:
            return False
        refreshes_left -= 1
        score[:] = exact
        return True

    def max_violation(bias_value: float) -> float:
        r = z * (score + bias_value - z)
        grow = np.where(alpha < upper - snap, -r, -np.inf)
        shrink = np.where(alpha > snap, r, -np.inf)
        return float(np.maximum(grow, shrink).max())

    while updates < budget:
        err = score + b - z
        r = z * err
        grow = np.where(alpha < upper - snap, -r, -np.inf)
        shrink = np.where(alpha > snap, r, -np.inf)
        viol = np.maximum(grow, shrink)
        if float(viol.max()) <= tol:
            if refresh_scores():
                continue
            # the stored model carries the averaged bias, so the verdict
            # must hold under that bias, not the running one
            b = _final_bias(alpha, z, score, upper, snap)
            if max_violation(b) <= tol:
                converged = True
                break
            excluded.clear()
            continue
        pick = viol.copy()
        if excluded:
            pick[list(excluded)] = -np.inf
        if float(pick.max()) <= tol:
            if refresh_scores():
                excluded.clear()
                continue
            # pair steps cannot repair a pure bias offset (it cancels in
            # e1 - e2); re-derive b once before giving up on the stall
            rule_b = _final_bias(alpha, z, score, upper, snap)
            if rule_b != b:
                b = rule_b
                if max_violation(b) <= tol:
                    converged = True
                    break
                excluded.clear()
                continue
            break  # every remaining violator already failed to move
        i1 = int(np.argmax(pick))
        in_bound = (alpha > snap) & (alpha < upper - snap)
        if second_choice(i1, err, in_bound):
            excluded.clear()
        else:
            excluded.add(i1)

    weighted = alpha * z
    final_scores = gram.scores(weighted)
    bias = _final_bias(alpha, z, final_scores, upper, snap)
    err = final_scores + bias - z
    r = z * err
    grow = np.where(alpha < upper - snap, -r, -np.inf)
    shrink = np.where(alpha > snap, r, -np.inf)
    max_viol = float(np.maximum(grow, shrink).max())
    objective = float(alpha.sum() - 0.5 * (weighted @ final_scores))

    keep = alpha > config.numeric_epsilon
    return SvmModel(
        kernel=kernel,
        support_vectors=data[keep].copy(),
        alphas=alpha[keep].copy(),
        sv_labels=z[keep].copy(),
        bias=bias,
        feature_names=names,
        scaler_means=means,
        scaler_scales=scales,
        converged=converged and max_viol <= tol,
        max_kkt_violation=max_viol,
        dual_objective=objective,
    )


def decision_values(model: SvmModel, rows) -> np.ndarray:
    """Decision scores for raw-space rows; scaling happens here."""
    raw = np.atleast_2d(np.asarray(rows, dtype=float))
    if raw.shape[1] != model.scaler_means.size:
        raise DomainError(
            f"expected {model.scaler_means.size} features, got {raw.shape[1]}"
        )
    scaled = (raw - model.scaler_means) / model.scaler_scales
    if model.alphas.size == 0:
        return np.full(raw.shape[0], model.bias)
    k = kernel_matrix(model.kernel, scaled, model.support_vectors)
    return k @ (model.alphas * model.sv_labels) + model.bias


def decision_value(model: SvmModel, x) -> float:
    """Decision score for a single raw-space vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError("decision_value expects a 1-D vector")
    return float(decision_values(model, x[None, :])[0])


def predict(model: SvmModel, x) -> int:
    """Class of one raw-space vector; a score of exactly 0 maps to +1."""
    return 1 if decision_value(model, x) >= 0.0 else -1


def predict_many(model: SvmModel, rows) -> np.ndarray:
    dv = decision_values(model, rows)
    return np.where(dv >= 0.0, 1, -1)


def decision_values_from_matrix(model: SvmModel, fm) -> np.ndarray:
    """Fast path for an already-standardized feature matrix.

    Rejects matrices whose feature names or scaler differ from the
    model's, since their rows would otherwise be silently double-scaled.
    """
    if tuple(fm.feature_names) != model.feature_names:
        raise SchemaError("feature names do not match the model")
    if not (
        np.array_equal(np.asarray(fm.means, dtype=float), model.scaler_means)
        and np.array_equal(np.asarray(fm.scales, dtype=float), model.scaler_scales)
    ):
        raise SchemaError("scaler parameters do not match the model")
    scaled = np.asarray(fm.x, dtype=float)
    if model.alphas.size == 0:
        return np.full(scaled.shape[0], model.bias)
    k = kernel_matrix(model.kernel, scaled, model.support_vectors)
    return k @ (model.alphas * model.sv_labels) + model.bias


def dual_feasibility_gap(model: SvmModel) -> float:
    """|sum alpha_i z_i|, which a valid model keeps within 1e-8."""
    return float(abs(np.sum(model.alphas * model.sv_labels)))
