"""First-order Sugeno neuro-fuzzy classifier seeded by fuzzy c-means.

One rule per cluster: Gaussian memberships ``exp(-((x - c) / a)**2)`` per
input, rule strength = product over inputs (evaluated in log space so
high-dimensional inputs cannot underflow), normalised strengths weight
first-order polynomial consequents. Hybrid training alternates an exact
least-squares solve of the consequents with a gradient step on the
Gaussian parameters.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, ShapeError

WIDTH_FLOOR_FRACTION = 1e-3


@dataclass
class FcmResult:
    centers: np.ndarray       # c x d
    memberships: np.ndarray   # points x c, rows sum to 1
    fuzzifier: float
    n_iter: int


def fcm(data, c: int, fuzzifier: float = 2.0, tol: float = 1e-5,
        max_iter: int = 200, seed: int = 0) -> FcmResult:
    """Fuzzy c-means with membership exponent ``fuzzifier``.

    Centers start on c distinct data rows; iteration stops when the largest
    center movement drops below ``tol``. A point coinciding with a center
    gets an indicator membership row (the standard singularity rule).
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    n = data.shape[0]
    if c < 2:
        raise ParameterError(f"need at least 2 clusters, got {c}")
    if n < c:
        raise ParameterError(f"need at least {c} rows for {c} clusters, got {n}")
    if fuzzifier <= 1:
        raise ParameterError(f"fuzzifier must exceed 1, got {fuzzifier}")
    rng = np.random.default_rng(seed)
    centers = data[rng.choice(n, size=c, replace=False)].copy()

    exponent = 2.0 / (fuzzifier - 1.0)
    memberships = np.empty((n, c))
    for iteration in range(max_iter):
        dist = np.linalg.norm(data[:, None, :] - centers[None, :, :], axis=2)
        zero_rows = dist.min(axis=1) == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = dist ** (-exponent)
            memberships = inv / inv.sum(axis=1, keepdims=True)
        if np.any(zero_rows):
            memberships[zero_rows] = 0.0
            memberships[zero_rows, dist[zero_rows].argmin(axis=1)] = 1.0
        um = memberships**fuzzifier
        new_centers = (um.T @ data) / um.sum(axis=0)[:, None]
        moved = float(np.abs(new_centers - centers).max())
        centers = new_centers
        if moved < tol:
            break
    return FcmResult(centers=centers, memberships=memberships,
                     fuzzifier=fuzzifier, n_iter=iteration + 1)


@dataclass
class AnfisModel:
    centers: np.ndarray      # rules x inputs, Gaussian centers
    widths: np.ndarray       # rules x inputs, Gaussian widths (> 0)
    consequents: np.ndarray  # rules x (inputs + 1), last column is the constant
    labels: tuple[int, ...] | None = None
    width_floor: np.ndarray | None = None  # per-input lower bound

    @property
    def n_rules(self) -> int:
        return self.centers.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.centers.shape[1]

    def copy(self) -> "AnfisModel":
        return AnfisModel(
            centers=self.centers.copy(), widths=self.widths.copy(),
            consequents=self.consequents.copy(), labels=self.labels,
            width_floor=None if self.width_floor is None else self.width_floor.copy(),
        )


@dataclass
class TrainReport:
    rmse: list[float] = field(default_factory=list)
    rmse_before_lse: list[float] = field(default_factory=list)
    rmse_after_lse: list[float] = field(default_factory=list)
    ridge_fallbacks: int = 0
    elapsed: float = 0.0

    @property
    def final_rmse(self) -> float:
        return self.rmse[-1] if self.rmse else float("nan")


def init_from_fcm(rows, targets, mf_per_input: int = 2, seed: int = 0) -> AnfisModel:
    """Seed one rule per cluster from fuzzy c-means over the input space.

    Premise centers are the cluster centers, widths the membership-weighted
    standard deviation per coordinate (floored); consequents start from one
    global least-squares fit shared by every rule.
    """
    if mf_per_input not in (2, 3):
        raise ParameterError(f"membership functions per input must be 2 or 3, got {mf_per_input}")
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)
    result = fcm(rows, c=mf_per_input, seed=seed)

    ranges = rows.max(axis=0) - rows.min(axis=0)
    floor = WIDTH_FLOOR_FRACTION * np.where(ranges > 0, ranges, 1.0)
    widths = np.empty_like(result.centers)
    for j in range(mf_per_input):
        w = result.memberships[:, j][:, None]
        var = (w * (rows - result.centers[j]) ** 2).sum(axis=0) / w.sum()
        widths[j] = np.sqrt(var)
    widths = np.maximum(widths, floor)

    design = np.hstack([rows, np.ones((rows.shape[0], 1))])
    beta, *_ = np.linalg.lstsq(design, targets, rcond=None)
    consequents = np.tile(beta, (mf_per_input, 1))

    labels = None
    if targets.size and np.allclose(targets, np.round(targets)):
        labels = tuple(sorted(int(v) for v in np.unique(np.round(targets))))
    return AnfisModel(centers=result.centers, widths=widths,
                      consequents=consequents, labels=labels, width_floor=floor)


def _log_strengths(model: AnfisModel, rows: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (rows[:, None, :] - model.centers[None, :, :]) / model.widths[None, :, :]
        return -(z**2).sum(axis=2)  # rows x rules


def _normalized_strengths(logw: np.ndarray) -> tuple[np.ndarray, bool]:
    shift = logw.max(axis=1, keepdims=True)
    finite = np.isfinite(shift[:, 0])
    with np.errstate(invalid="ignore"):
        w = np.exp(logw - np.where(finite[:, None], shift, 0.0))
        sums = w.sum(axis=1, keepdims=True)
        wbar = np.where(finite[:, None], w / sums, 1.0 / logw.shape[1])
    return wbar, bool(np.any(~finite))


def forward_batch(model: AnfisModel, rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    _check_inputs(model, rows)
    wbar, _ = _normalized_strengths(_log_strengths(model, rows))
    f = rows @ model.consequents[:, :-1].T + model.consequents[:, -1]
    return (wbar * f).sum(axis=1)


def forward(model: AnfisModel, x) -> tuple[float, dict]:
    """Evaluate one input; all layer outputs are exposed for inspection."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    _check_inputs(model, x)
    with np.errstate(over="ignore"):
        z = (x[0][None, :] - model.centers) / model.widths
        mu = np.exp(-(z**2))
    logw = _log_strengths(model, x)
    wbar, underflow = _normalized_strengths(logw)
    f = x[0] @ model.consequents[:, :-1].T + model.consequents[:, -1]
    y = float((wbar[0] * f).sum())
    layers = {
        "mu": mu,
        "omega": np.exp(logw[0]),
        "omega_bar": wbar[0],
        "f": f,
        "y": y,
        "underflow": underflow,
    }
    return y, layers


def _check_inputs(model: AnfisModel, rows: np.ndarray) -> None:
    if rows.shape[1] != model.n_inputs:
        raise ShapeError(f"expected {model.n_inputs} inputs, got {rows.shape[1]}")


def rmse(model: AnfisModel, rows, targets) -> float:
    pred = forward_batch(model, rows)
    return float(np.sqrt(np.mean((np.asarray(targets, dtype=np.float64) - pred) ** 2)))


def _solve_consequents(model: AnfisModel, rows: np.ndarray, targets: np.ndarray) -> bool:
    """Exact LSE of the consequents given the premises; True if ridge was needed."""
    wbar, _ = _normalized_strengths(_log_strengths(model, rows))
    n, d = rows.shape
    ext = np.hstack([rows, np.ones((n, 1))])
    design = (wbar[:, :, None] * ext[:, None, :]).reshape(n, model.n_rules * (d + 1))
    ridge = False
    solution, residuals, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    if rank < design.shape[1]:
        ridge = True
        gram = design.T @ design + 1e-8 * np.eye(design.shape[1])
        solution = np.linalg.solve(gram, design.T @ targets)
    model.consequents = solution.reshape(model.n_rules, d + 1)
    return ridge


def premise_gradients(model: AnfisModel, rows, targets) -> tuple[np.ndarray, np.ndarray]:
    """d(MSE)/d(centers), d(MSE)/d(widths)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)
    n = rows.shape[0]
    z = (rows[:, None, :] - model.centers[None, :, :]) / model.widths[None, :, :]
    logw = -(z**2).sum(axis=2)
    wbar, _ = _normalized_strengths(logw)
    f = rows @ model.consequents[:, :-1].T + model.consequents[:, -1]
    y = (wbar * f).sum(axis=1)
    err = y - targets
    # dE/dlogw_j = (2/N) err * wbar_j (f_j - y)
    dlogw = (2.0 / n) * err[:, None] * wbar * (f - y[:, None])
    grad_c = (dlogw[:, :, None] * (2.0 * z / model.widths[None, :, :])).sum(axis=0)
    grad_a = (dlogw[:, :, None] * (2.0 * z**2 / model.widths[None, :, :])).sum(axis=0)
    return grad_c, grad_a


def train_hybrid(model: AnfisModel, rows, targets, epochs: int = 30,
                 lr: float = 0.01) -> tuple[AnfisModel, TrainReport]:
    """Alternate exact consequent LSE and a premise gradient-descent step.

    The learning rate decays by 0.9 whenever an epoch fails to improve the
    RMSE; widths are clamped to their floor after every step.
    """
    if epochs < 1:
        raise ParameterError(f"epochs must be >= 1, got {epochs}")
    if lr <= 0:
        raise ParameterError(f"learning rate must be positive, got {lr}")
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)
    model = model.copy()
    floor = model.width_floor
    if floor is None:
        ranges = rows.max(axis=0) - rows.min(axis=0)
        floor = WIDTH_FLOOR_FRACTION * np.where(ranges > 0, ranges, 1.0)
    report = TrainReport()
    start = time.perf_counter()
    for _ in range(epochs):
        report.rmse_before_lse.append(rmse(model, rows, targets))
        if _solve_consequents(model, rows, targets):
            report.ridge_fallbacks += 1
        report.rmse_after_lse.append(rmse(model, rows, targets))

        grad_c, grad_a = premise_gradients(model, rows, targets)
        model.centers -= lr * grad_c
        model.widths = np.maximum(model.widths - lr * grad_a, floor)

        epoch_rmse = rmse(model, rows, targets)
        if report.rmse and epoch_rmse > report.rmse[-1]:
            lr *= 0.9
        report.rmse.append(epoch_rmse)
    report.elapsed = time.perf_counter() - start
    return model, report


def flatten_params(model: AnfisModel) -> np.ndarray:
    """Stable packing: all centers, all widths, then the consequents."""
    return np.concatenate([model.centers.ravel(), model.widths.ravel(),
                           model.consequents.ravel()])


def unflatten_params(template: AnfisModel, vector) -> AnfisModel:
    vector = np.asarray(vector, dtype=np.float64)
    r, d = template.n_rules, template.n_inputs
    expected = r * d * 2 + r * (d + 1)
    if vector.size != expected:
        raise ShapeError(f"expected a parameter vector of length {expected}, got {vector.size}")
    out = template.copy()
    out.centers = vector[: r * d].reshape(r, d).copy()
    out.widths = vector[r * d : 2 * r * d].reshape(r, d).copy()
    out.consequents = vector[2 * r * d :].reshape(r, d + 1).copy()
    return out


def classify(model: AnfisModel, x) -> int:
    """Nearest label to the network output; ties go to the smaller label."""
    if model.labels is None:
        raise ParameterError("model carries no label set; train on integer targets first")
    y = forward_batch(model, np.asarray(x, dtype=np.float64).reshape(1, -1))[0]
    labels = np.asarray(model.labels, dtype=np.float64)
    return int(model.labels[int(np.argmin(np.abs(labels - y)))])


def classify_batch(model: AnfisModel, rows) -> np.ndarray:
    if model.labels is None:
        raise ParameterError("model carries no label set; train on integer targets first")
    y = forward_batch(model, rows)
    labels = np.asarray(model.labels, dtype=np.float64)
    idx = np.argmin(np.abs(labels[None, :] - y[:, None]), axis=1)
    return np.asarray(model.labels, dtype=np.int64)[idx]


def save_model(model: AnfisModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"anfis 1\nrules {model.n_rules} inputs {model.n_inputs}\n")
        fh.write("labels " + (" ".join(map(str, model.labels)) if model.labels else "-") + "\n")
        for name, arr in (("centers", model.centers), ("widths", model.widths),
                          ("consequents", model.consequents)):
            fh.write(name + "\n")
            for row in arr:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_model(path: str | Path) -> AnfisModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("anfis 1"):
        raise ShapeError(f"{path}: not a version-1 model file")
    header = lines[1].split()
    r, d = int(header[1]), int(header[3])
    label_tokens = lines[2].split()[1:]
    labels = None if label_tokens == ["-"] else tuple(int(t) for t in label_tokens)
    blocks: dict[str, list[list[float]]] = {}
    current = None
    for line in lines[3:]:
        if line in ("centers", "widths", "consequents"):
            current = line
            blocks[current] = []
        elif line.strip() and current:
            blocks[current].append([float(t) for t in line.split()])
    model = AnfisModel(
        centers=np.asarray(blocks["centers"]),
        widths=np.asarray(blocks["widths"]),
        consequents=np.asarray(blocks["consequents"]),
        labels=labels,
    )
    if model.centers.shape != (r, d):
        raise ShapeError(f"{path}: inconsistent model dimensions")
    return model


def write_report_csv(report: TrainReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "rmse"])
        for i, value in enumerate(report.rmse):
            writer.writerow([i, f"{value:.12g}"])


def anfis_param_bounds(template: AnfisModel, rows, targets) -> tuple[np.ndarray, np.ndarray]:
    """Box bounds for metaheuristic training over the flattened vector.

    Centers range over the per-input data range, widths over
    [floor, 1.1 * range], consequents over a symmetric box scaled by the
    target magnitude.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)
    r, d = template.n_rules, template.n_inputs
    lo_in = rows.min(axis=0)
    hi_in = rows.max(axis=0)
    span = np.where(hi_in > lo_in, hi_in - lo_in, 1.0)
    floor = WIDTH_FLOOR_FRACTION * span
    c_scale = 10.0 * max(1.0, float(np.abs(targets).max()) if targets.size else 1.0)
    lo = np.concatenate([np.tile(lo_in, r), np.tile(floor, r),
                         np.full(r * (d + 1), -c_scale)])
    hi = np.concatenate([np.tile(hi_in, r), np.tile(1.1 * span, r),
                         np.full(r * (d + 1), c_scale)])
    return lo, hi
