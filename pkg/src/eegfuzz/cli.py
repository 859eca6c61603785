"""Command-line front end.

Subcommands wire the processing chain end to end, driven by an INI-style
config file; every command echoes the effective config next to its
outputs so a run can be reproduced from its output directory alone.

Exit codes: 0 success, 2 configuration/input problem, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from pathlib import Path

import numpy as np

from . import autoenc, benchmark, dataio, evaluation, fcm_anfis, metaheuristics, pipeline, tqwt
from .entropy import EntropyParams
from .errors import EegfuzzError

DATA_ROOT_ENV = "EEGFUZZ_DATA_ROOT"


class RunConfig:
    """Typed view over the INI file, with defaults for everything."""

    def __init__(self, parser: configparser.ConfigParser, base_dir: Path):
        self.parser = parser
        self.base_dir = base_dir

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise EegfuzzError(f"config file not found: {path}")
        parser = configparser.ConfigParser()
        parser.read(path, encoding="utf-8")
        return cls(parser, path.parent)

    def _get(self, section: str, key: str, fallback):
        if not self.parser.has_option(section, key):
            return fallback
        raw = self.parser.get(section, key)
        if isinstance(fallback, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(fallback, int):
            return int(raw)
        if isinstance(fallback, float):
            return float(raw)
        return raw

    def resolve_path(self, value: str) -> Path:
        root = os.environ.get(DATA_ROOT_ENV)
        p = Path(value)
        if not p.is_absolute():
            p = (Path(root) if root else self.base_dir) / p
        return p

    # -- sections ----------------------------------------------------------
    def window_seconds(self) -> float:
        return self._get("window", "seconds", 5.0)

    def tqwt_params(self) -> tqwt.TqwtParams:
        return tqwt.TqwtParams(
            q=self._get("tqwt", "q", 1.0),
            r=self._get("tqwt", "r", 3.0),
            levels=self._get("tqwt", "levels", 8),
        )

    def entropy_params(self) -> EntropyParams:
        g = lambda key, fb: self._get("entropy", key, fb)
        return EntropyParams(
            m=g("m", 2), n=g("n", 2.0), r_frac=g("r_frac", 0.15), tau=g("tau", 2),
            alpha=g("alpha", 0.5), pm=g("pm", 3), delay=g("delay", 1),
            k_depth=g("k_depth", 2), k_seg=g("k_seg", 8), m_bins=g("m_bins", 512),
            shift=g("shift", 1), n_local=g("n_local", 3.0),
            r_local_frac=g("r_local_frac", 0.15), n_global=g("n_global", 2.0),
            r_global_frac=g("r_global_frac", 0.15),
        )

    def ae_config(self) -> autoenc.AeConfig | None:
        if not self._get("autoencoder", "enabled", True):
            return None
        return autoenc.AeConfig(
            epochs=self._get("autoencoder", "epochs", 200),
            batch_size=self._get("autoencoder", "batch_size", 32),
            rho=self._get("autoencoder", "rho", 0.95),
            epsilon=self._get("autoencoder", "epsilon", 1e-6),
        )

    def classifier_spec(self) -> evaluation.ClassifierSpec:
        return evaluation.ClassifierSpec(
            kind=self._get("classifier", "kind", "anfis_bs"),
            mf_per_input=self._get("classifier", "mf_per_input", 2),
            hybrid_epochs=self._get("classifier", "hybrid_epochs", 30),
            hybrid_lr=self._get("classifier", "hybrid_lr", 0.01),
            knn_k=self._get("classifier", "knn_k", 5),
            optimize=self._get("classifier", "optimize", "full"),
        )

    def swarm_config(self, seed: int) -> metaheuristics.SwarmConfig:
        g = lambda key, fb: self._get("swarm", key, fb)
        return metaheuristics.SwarmConfig(
            n_pop=g("n_pop", 60), max_iter=g("max_iter", 400), seed=seed,
            pso=metaheuristics.PsoParams(c1=g("c1", 2.0), c2=g("c2", 2.0), w=g("w", 0.2)),
            bs=metaheuristics.BsParams(
                w1=g("w1", 1.8), k1=g("k1", 2.0), w=g("bs_w", 0.2),
                ga_fraction=g("ga_fraction", 0.5),
            ),
            goa=metaheuristics.GoaParams(
                c_min=g("c_min", 0.00004), c_max=g("c_max", 1.0),
                f=g("f", 0.5), l=g("l", 1.5),
            ),
        )

    def seed(self) -> int:
        return self._get("evaluation", "seed", 0)

    def case(self) -> dataio.CaseSpec:
        return dataio.case_by_name(self._get("evaluation", "case", "A-E"))

    def out_dir(self, override: str | None) -> Path:
        out = Path(override) if override else Path(self._get("output", "dir", "out"))
        out.mkdir(parents=True, exist_ok=True)
        return out

    def echo(self, out_dir: Path) -> None:
        with open(out_dir / "config_echo.ini", "w", encoding="utf-8") as fh:
            self.parser.write(fh)


def _load_pools(cfg: RunConfig) -> dict[str, list[dataio.SignalFrame]]:
    """Window every configured recording, grouped per class tag."""
    seconds = cfg.window_seconds()
    pools: dict[str, list[dataio.SignalFrame]] = {}

    def add(rec: dataio.Recording) -> None:
        pools.setdefault(rec.class_tag, []).extend(dataio.window(rec, seconds))

    bonn_dir = cfg._get("data", "bonn_dir", "")
    csv_files = cfg._get("data", "csv_files", "")
    if bonn_dir:
        root = cfg.resolve_path(bonn_dir)
        if not root.is_dir():
            raise EegfuzzError(f"data directory not found: {root}")
        paths = sorted(root.glob("*.txt")) + sorted(root.glob("*.TXT"))
        if not paths:
            raise EegfuzzError(f"no .txt segments under {root}")
        for p in paths:
            add(dataio.load_bonn_segment(p))
    elif csv_files:
        fs = cfg._get("data", "csv_fs", 256.0)
        channel = cfg._get("data", "csv_channel", 0)
        for item in csv_files.split(","):
            part = item.strip()
            if not part:
                continue
            path_str, _, tag = part.partition(":")
            rec = dataio.load_csv_multichannel(cfg.resolve_path(path_str), fs, channel,
                                               class_tag=tag or "X")
            add(rec)
    else:
        raise EegfuzzError("config needs [data] bonn_dir or csv_files")
    return pools


def _labelled_frames(cfg: RunConfig) -> list[dataio.SignalFrame]:
    return dataio.assemble_case(_load_pools(cfg), cfg.case())


def _load_or_extract_features(cfg: RunConfig, threads: int | None) -> pipeline.FeatureMatrix:
    features_csv = cfg._get("data", "features_csv", "")
    if features_csv:
        return pipeline.read_feature_csv(cfg.resolve_path(features_csv))
    frames = _labelled_frames(cfg)
    return pipeline.extract_features(frames, cfg.tqwt_params(), cfg.entropy_params(),
                                     n_workers=threads)


def cmd_decompose(cfg: RunConfig, out_dir: Path, threads: int | None) -> None:
    frames = [f for frames in _load_pools(cfg).values() for f in frames]
    if not frames:
        raise EegfuzzError("windowing produced no frames")
    params = cfg.tqwt_params()
    for frame in frames:
        sb = tqwt.decompose(frame.samples, params)
        tqwt.write_subbands_csv(sb, out_dir / f"{frame.source_id}_f{frame.frame_index}_bands.csv")
    print(f"decomposed {len(frames)} frames into {params.levels + 1} bands each -> {out_dir}")


def cmd_features(cfg: RunConfig, out_dir: Path, threads: int | None) -> None:
    fm = _load_or_extract_features(cfg, threads)
    pipeline.write_feature_csv(fm, out_dir / "features.csv")
    print(f"wrote {fm.n_rows} x {fm.n_columns} feature matrix -> {out_dir / 'features.csv'}")


def cmd_reduce(cfg: RunConfig, out_dir: Path, threads: int | None) -> None:
    fm = _load_or_extract_features(cfg, threads)
    ae_cfg = cfg.ae_config()
    if ae_cfg is None:
        raise EegfuzzError("[autoencoder] is disabled; nothing to reduce with")
    normalized = pipeline.normalize(fm)
    model = autoenc.init_model(ae_cfg, seed=cfg.seed())
    model = autoenc.train(model, normalized.values, seed=cfg.seed() + 1)
    encoded = autoenc.encode(model, normalized.values)
    autoenc.save_model(model, out_dir / "autoencoder.npz")
    autoenc.write_history_csv(model, out_dir / "ae_history.csv")
    reduced = pipeline.FeatureMatrix(
        values=encoded, labels=fm.labels,
        column_names=[f"enc{i}" for i in range(encoded.shape[1])],
        meta={"source": "autoencoder", "mse_final": model.history[-1] if model.history else None},
    )
    pipeline.write_feature_csv(reduced, out_dir / "encoded.csv")
    print(f"reduced {fm.n_columns} -> {encoded.shape[1]} features -> {out_dir / 'encoded.csv'}")


def cmd_train(cfg: RunConfig, out_dir: Path, threads: int | None) -> None:
    fm = _load_or_extract_features(cfg, threads)
    spec = cfg.classifier_spec()
    swarm = cfg.swarm_config(cfg.seed())
    predict, _ = evaluation._fit_fold(fm.values, fm.labels, spec, cfg.ae_config(),
                                      swarm, cfg.seed())
    predicted = predict(fm.values)
    cm = evaluation.confusion_matrix(fm.labels, predicted, int(fm.labels.max()) + 1)
    metrics = evaluation.metrics_from_confusion(cm)
    with open(out_dir / "train_metrics.csv", "w", encoding="utf-8") as fh:
        fh.write("metric,value\n")
        for key in evaluation.METRIC_KEYS:
            fh.write(f"{key},{metrics[key]:.12g}\n")
    print(f"training-set accuracy {metrics['acc']:.4f} ({spec.kind}) -> {out_dir}")


def cmd_evaluate(cfg: RunConfig, out_dir: Path, threads: int | None) -> None:
    fm = _load_or_extract_features(cfg, threads)
    spec = cfg.classifier_spec()
    report = evaluation.run_experiment(
        fm.values, fm.labels, spec,
        folds=cfg._get("evaluation", "folds", 10),
        repeats=cfg._get("evaluation", "repeats", 10),
        seed=cfg.seed(),
        ae_config=cfg.ae_config(),
        swarm=cfg.swarm_config(cfg.seed()),
    )
    evaluation.write_report_csv(report, out_dir)
    print(f"mean accuracy {report.mean['acc']:.4f} over "
          f"{len(report.folds)} folds ({report.failed_folds} failed) -> {out_dir}")


def cmd_bench(cfg: RunConfig, out_dir: Path, threads: int | None) -> None:
    n = cfg._get("bench", "n", 868)
    repeats = cfg._get("bench", "repeats", 5)
    if repeats < 3:
        print("benchmark needs >= 3 repeats; using 3", file=sys.stderr)
        repeats = 3
    rng = np.random.default_rng(cfg.seed())
    frame = rng.standard_normal(n)
    results = benchmark.benchmark_all(frame, cfg.entropy_params(), repeats=repeats)
    benchmark.write_benchmark_csv(results, out_dir / "bench.csv")
    sweep = cfg._get("bench", "sweep", "")
    if sweep:
        sizes = [int(s) for s in sweep.split(",") if s.strip()]
        sweep_results = [
            benchmark.benchmark_entropy("fu_en", rng.standard_normal(size),
                                        cfg.entropy_params(), repeats=repeats)
            for size in sizes
        ]
        benchmark.write_benchmark_csv(sweep_results, out_dir / "bench_sweep.csv")
    ordering = sorted(results, key=lambda r: r.median_s)
    print("fastest:", ordering[0].kernel_id, "slowest:", ordering[-1].kernel_id,
          f"-> {out_dir / 'bench.csv'}")


COMMANDS = {
    "decompose": cmd_decompose,
    "features": cmd_features,
    "reduce": cmd_reduce,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eegfuzz",
                                     description="EEG sub-band fuzzy-entropy classification toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", "-c", required=True, help="INI run configuration")
    parser.add_argument("--output", "-o", default=None, help="output directory override")
    parser.add_argument("--threads", "-t", type=int, default=None,
                        help="worker threads for frame-level work (default 1)")
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
        out_dir = cfg.out_dir(args.output)
        cfg.echo(out_dir)
        threads = args.threads if args.threads is None or args.threads >= 1 else 1
        COMMANDS[args.command](cfg, out_dir, threads)
    except (EegfuzzError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # unexpected failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
