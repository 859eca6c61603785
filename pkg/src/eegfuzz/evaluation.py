"""Classifier harness: stratified k-fold CV, repeated runs, fold metrics.

Every fold fits its whole chain — normalisation statistics, the optional
autoencoder, and the classifier — on that fold's training rows only, so
nothing about the test rows leaks into the fitted state.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import autoenc, fcm_anfis, metaheuristics, pipeline
from .errors import EmptyInputError, ParameterError, StratificationError

CLASSIFIER_KINDS = ("anfis", "anfis_pso", "anfis_goa", "anfis_bs", "knn")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "anfis_bs"
    mf_per_input: int = 2
    hybrid_epochs: int = 30
    hybrid_lr: float = 0.01
    knn_k: int = 5
    optimize: str = "full"  # or "premise": keep the seeded consequents fixed

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise ParameterError(f"unknown classifier kind {self.kind!r}")
        if self.optimize not in ("full", "premise"):
            raise ParameterError(f"optimize must be 'full' or 'premise', got {self.optimize!r}")


def stratified_kfold(labels, k: int, seed: int = 0) -> np.ndarray:
    """Fold index per item; every class is spread evenly over the k folds."""
    labels = np.asarray(labels)
    if k < 2:
        raise ParameterError(f"need at least 2 folds, got {k}")
    rng = np.random.default_rng(seed)
    folds = np.empty(labels.size, dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.size < k:
            raise StratificationError(f"class {cls} has {idx.size} items, fewer than {k} folds")
        rng.shuffle(idx)
        folds[idx] = np.arange(idx.size) % k
    return folds


def knn_classify(train_rows, train_labels, query, k_neighbors: int = 5) -> int:
    """Euclidean majority vote; a vote tie falls to the closest tied class."""
    train_rows = np.atleast_2d(np.asarray(train_rows, dtype=np.float64))
    train_labels = np.asarray(train_labels)
    if train_rows.shape[0] == 0:
        raise EmptyInputError("empty training set")
    if k_neighbors > train_rows.shape[0]:
        raise ParameterError(f"k={k_neighbors} exceeds training size {train_rows.shape[0]}")
    dist = np.linalg.norm(train_rows - np.asarray(query, dtype=np.float64), axis=1)
    order = np.argsort(dist, kind="stable")[:k_neighbors]
    votes: dict[int, int] = {}
    for i in order:
        votes[int(train_labels[i])] = votes.get(int(train_labels[i]), 0) + 1
    top = max(votes.values())
    tied = {label for label, count in votes.items() if count == top}
    if len(tied) == 1:
        return tied.pop()
    for i in order:  # nearest neighbour whose class is among the tied ones
        if int(train_labels[i]) in tied:
            return int(train_labels[i])
    raise AssertionError("unreachable")


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """K x K counts, rows = true class, columns = predicted class."""
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(np.asarray(y_true), np.asarray(y_pred)):
        cm[int(t), int(p)] += 1
    return cm


def _binary_counts(cm: np.ndarray, positive: int) -> tuple[int, int, int, int]:
    tp = int(cm[positive, positive])
    fn = int(cm[positive].sum() - tp)
    fp = int(cm[:, positive].sum() - tp)
    tn = int(cm.sum() - tp - fn - fp)
    return tp, fn, fp, tn


def metrics_from_confusion(cm, positive_class: int | None = None) -> dict:
    """Accuracy plus sensitivity/specificity/precision/F1.

    For a binary matrix the named positive class (default 1) is scored
    directly; with more classes and no positive class given, the four
    per-class metrics are macro-averaged one-vs-rest. Ratios with a zero
    denominator score 0 and raise the ``zero_denominator`` flag.
    """
    cm = np.asarray(cm, dtype=np.int64)
    total = int(cm.sum())
    if total == 0:
        raise EmptyInputError("empty confusion matrix")
    flags = {"zero_denominator": False}

    def ratio(num: int, den: int) -> float:
        if den == 0:
            flags["zero_denominator"] = True
            return 0.0
        return num / den

    def one_vs_rest(positive: int) -> dict[str, float]:
        tp, fn, fp, tn = _binary_counts(cm, positive)
        return {
            "sens": ratio(tp, tp + fn),
            "spec": ratio(tn, tn + fp),
            "prec": ratio(tp, tp + fp),
            "f1": ratio(2 * tp, 2 * tp + fp + fn),
        }

    if positive_class is None and cm.shape[0] == 2:
        positive_class = 1
    if positive_class is not None:
        out = one_vs_rest(positive_class)
    else:
        per_class = [one_vs_rest(c) for c in range(cm.shape[0])]
        out = {key: float(np.mean([m[key] for m in per_class])) for key in per_class[0]}
    out["acc"] = float(np.trace(cm)) / total
    out.update(flags)
    return out


METRIC_KEYS = ("acc", "sens", "spec", "prec", "f1")


@dataclass
class FoldRecord:
    repeat: int
    fold: int
    cm: np.ndarray
    metrics: dict
    norm_stats: tuple[np.ndarray, np.ndarray] | None = None


@dataclass
class EvalReport:
    folds: list[FoldRecord] = field(default_factory=list)
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    failed_folds: int = 0
    failures: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)


def _fit_fold(train_rows, train_labels, spec: ClassifierSpec,
              ae_config: autoenc.AeConfig | None, swarm: metaheuristics.SwarmConfig,
              seed: int):
    """Fit normalisation (+ AE, + classifier) on training rows only.

    Returns (predict(rows) -> labels, fitted norm stats).
    """
    stats = (train_rows.min(axis=0), train_rows.max(axis=0))
    train_n = pipeline.apply_normalization(train_rows, stats)

    encoder = None
    if ae_config is not None:
        model = autoenc.init_model(ae_config, seed=seed)
        model = autoenc.train(model, train_n, seed=seed + 1)
        encoder = model
        train_n = autoenc.encode(model, train_n)

    labels = tuple(sorted(int(v) for v in np.unique(train_labels)))
    targets = train_labels.astype(np.float64)

    if spec.kind == "knn":
        def predict(rows: np.ndarray) -> np.ndarray:
            return np.asarray([knn_classify(train_n, train_labels, q, spec.knn_k) for q in rows])
    else:
        template = fcm_anfis.init_from_fcm(train_n, targets, spec.mf_per_input, seed=seed)
        template.labels = labels
        if spec.kind == "anfis":
            model, _ = fcm_anfis.train_hybrid(template, train_n, targets,
                                              epochs=spec.hybrid_epochs, lr=spec.hybrid_lr)
        else:
            minimize = metaheuristics.MINIMIZERS[spec.kind.split("_")[1]]
            cost = metaheuristics.make_anfis_cost(train_n, targets, template)
            lo, hi = fcm_anfis.anfis_param_bounds(template, train_n, targets)
            x0 = fcm_anfis.flatten_params(template)
            if spec.optimize == "premise":
                n_premise = 2 * template.n_rules * template.n_inputs
                fixed = x0[n_premise:]

                def premise_cost(theta: np.ndarray) -> float:
                    return cost(np.concatenate([theta, fixed]))

                result = minimize(premise_cost, n_premise, (lo[:n_premise], hi[:n_premise]),
                                  dataclass_replace_seed(swarm, seed), x0=x0[:n_premise])
                best = np.concatenate([result.best, fixed])
            else:
                result = minimize(cost, x0.size, (lo, hi),
                                  dataclass_replace_seed(swarm, seed), x0=x0)
                best = result.best
            model = fcm_anfis.unflatten_params(template, best)

        def predict(rows: np.ndarray) -> np.ndarray:
            return fcm_anfis.classify_batch(model, rows)

    def predict_raw(rows: np.ndarray) -> np.ndarray:
        rows_n = pipeline.apply_normalization(rows, stats)
        if encoder is not None:
            rows_n = autoenc.encode(encoder, rows_n)
        return predict(rows_n)

    return predict_raw, stats


def dataclass_replace_seed(swarm: metaheuristics.SwarmConfig, seed: int) -> metaheuristics.SwarmConfig:
    return metaheuristics.SwarmConfig(n_pop=swarm.n_pop, max_iter=swarm.max_iter,
                                      seed=seed, pso=swarm.pso, bs=swarm.bs, goa=swarm.goa)


def run_experiment(values, labels, spec: ClassifierSpec,
                   folds: int = 10, repeats: int = 10, seed: int = 0,
                   ae_config: autoenc.AeConfig | None = None,
                   swarm: metaheuristics.SwarmConfig = metaheuristics.SwarmConfig(),
                   record_fold_stats: bool = False) -> EvalReport:
    """Repeated stratified k-fold evaluation of one classifier chain.

    Every repeat reshuffles the folds with a fresh child seed; all fitting
    happens inside the fold on training rows only. A fold whose fit raises
    is excluded from the averages and counted in ``failed_folds``.
    """
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    if values.shape[0] != labels.size:
        raise ParameterError("row/label count mismatch")
    n_classes = int(labels.max()) + 1
    seed_seq = np.random.SeedSequence(seed)
    repeat_seeds = seed_seq.spawn(repeats)

    report = EvalReport(config={
        "classifier": spec.__dict__, "folds": folds, "repeats": repeats, "seed": seed,
        "autoencoder": None if ae_config is None else list(ae_config.layer_sizes),
        "swarm": {"n_pop": swarm.n_pop, "max_iter": swarm.max_iter},
    })
    for rep in range(repeats):
        children = repeat_seeds[rep].spawn(folds + 1)
        fold_of = stratified_kfold(labels, folds, seed=children[0].entropy % (2**32))
        for f in range(folds):
            test_mask = fold_of == f
            fold_seed = int(children[f + 1].entropy % (2**31))
            try:
                predict, stats = _fit_fold(values[~test_mask], labels[~test_mask],
                                           spec, ae_config, swarm, fold_seed)
                predicted = predict(values[test_mask])
            except Exception as exc:  # a failed fold must not sink the run
                report.failed_folds += 1
                report.failures.append(f"repeat {rep} fold {f}: {exc}")
                continue
            cm = confusion_matrix(labels[test_mask], predicted, n_classes)
            record = FoldRecord(repeat=rep, fold=f, cm=cm,
                                metrics=metrics_from_confusion(cm),
                                norm_stats=stats if record_fold_stats else None)
            report.folds.append(record)
    for key in METRIC_KEYS:
        series = [rec.metrics[key] for rec in report.folds]
        report.mean[key] = float(np.mean(series)) if series else float("nan")
        report.std[key] = float(np.std(series)) if series else float("nan")
    return report


def write_report_csv(report: EvalReport, out_dir: str | Path) -> None:
    """Per-fold metric rows, a summary table, and the confusion matrices."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "folds.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repeat", "fold", "metric", "value"])
        for rec in report.folds:
            for key in METRIC_KEYS:
                writer.writerow([rec.repeat, rec.fold, key, f"{rec.metrics[key]:.12g}"])
    with open(out_dir / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "mean", "std"])
        for key in METRIC_KEYS:
            writer.writerow([key, f"{report.mean[key]:.12g}", f"{report.std[key]:.12g}"])
    with open(out_dir / "confusions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for rec in report.folds:
            writer.writerow([f"repeat={rec.repeat}", f"fold={rec.fold}"])
            for row in rec.cm:
                writer.writerow([int(v) for v in row])
