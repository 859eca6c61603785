"""Feature-matrix assembly: entropy features per TQWT sub-band per frame."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataio import SignalFrame
from .entropy import DEFAULT_PARAMS, EntropyParams, REGISTRY, _c_fu_en, _fu_me_en_all
from .errors import EmptyInputError, InsufficientDataError, ShapeError
from .tqwt import TqwtParams, decompose

#: Feature ids computed for every sub-band, in column order.
PER_BAND_FEATURES = (
    "fu_en", "afu_en", "mfu_en", "rcm_fu_en", "ffu_en", "fu_ap_en", "mvm_fu_en",
    "ifu_en", "fu_dist_en", "c_fu_en", "fu_pe_en", "h_fu_en",
    "fu_me_en", "fu_me_en_local", "fu_me_en_global",
)


@dataclass
class FeatureMatrix:
    values: np.ndarray  # rows x columns
    labels: np.ndarray  # one integer per row
    column_names: list[str]
    norm_stats: tuple[np.ndarray, np.ndarray] | None = None  # fitted (min, max)
    meta: dict = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]


def column_names(n_bands: int) -> list[str]:
    return [f"band{b}_{feat}" for b in range(1, n_bands + 1) for feat in PER_BAND_FEATURES]


def _band_features(band: np.ndarray, ep: EntropyParams) -> tuple[list[float], int]:
    """The per-band feature block; returns (values, degenerate-cell count)."""
    values: list[float] = []
    degenerate = 0
    for feat in PER_BAND_FEATURES[:12]:
        if feat == "c_fu_en":
            half = band.size // 2
            value, flag = _c_fu_en(band[:half], band[half:], ep)
        else:
            value, flag = REGISTRY[feat](band, ep)
        values.append(value)
        degenerate += int(flag)
    (total, local, global_), flag = _fu_me_en_all(band, ep)
    values.extend([total, local, global_])
    degenerate += 3 * int(flag)
    return values, degenerate


def extract_features(
    frames: Sequence[SignalFrame],
    tqwt_params: TqwtParams = TqwtParams(),
    entropy_params: EntropyParams = DEFAULT_PARAMS,
    n_workers: int | None = 1,
) -> FeatureMatrix:
    """Decompose every frame and compute the per-band entropy block.

    Frames too short for some kernel are skipped (counted in the metadata);
    degenerate kernel results enter the matrix as 0.0 and are counted too.
    """
    if not frames:
        raise EmptyInputError("no frames to extract features from")
    lengths = {f.samples.size for f in frames}
    if len(lengths) > 1:
        raise ShapeError(f"frames have mixed lengths {sorted(lengths)}")

    n_bands = tqwt_params.levels + 1

    def one_frame(frame: SignalFrame) -> tuple[list[float], int] | None:
        bands = decompose(frame.samples, tqwt_params).bands
        row: list[float] = []
        degenerate = 0
        try:
            for band in bands:
                vals, deg = _band_features(band, entropy_params)
                row.extend(vals)
                degenerate += deg
        except InsufficientDataError:
            return None
        return row, degenerate

    if n_workers is not None and n_workers == 1:
        results = [one_frame(f) for f in frames]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(one_frame, frames))

    rows, labels = [], []
    degenerate_cells = 0
    skipped = 0
    for frame, result in zip(frames, results):
        if result is None:
            skipped += 1
            continue
        row, deg = result
        rows.append(row)
        labels.append(frame.label)
        degenerate_cells += deg
    if not rows:
        raise EmptyInputError("every frame was too short for the configured kernels")

    values = np.asarray(rows, dtype=np.float64)
    meta = {
        "tqwt": {"q": tqwt_params.q, "r": tqwt_params.r, "levels": tqwt_params.levels},
        "entropy_params": {k: (list(v) if isinstance(v, tuple) else v)
                           for k, v in entropy_params.__dict__.items()},
        "degenerate_cells": degenerate_cells,
        "skipped_frames": skipped,
    }
    return FeatureMatrix(
        values=values,
        labels=np.asarray(labels, dtype=np.int64),
        column_names=column_names(n_bands),
        meta=meta,
    )


def normalize(fm: FeatureMatrix) -> FeatureMatrix:
    """Affine per-column map onto [-1, 1]; constant columns map to 0.

    The fitted (min, max) are kept on the result so held-out rows can be
    mapped with the same statistics.
    """
    col_min = fm.values.min(axis=0)
    col_max = fm.values.max(axis=0)
    return FeatureMatrix(
        values=apply_normalization(fm.values, (col_min, col_max)),
        labels=fm.labels.copy(),
        column_names=list(fm.column_names),
        norm_stats=(col_min, col_max),
        meta=dict(fm.meta),
    )


def apply_normalization(values: np.ndarray, stats: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    col_min, col_max = stats
    span = col_max - col_min
    out = np.zeros_like(values, dtype=np.float64)
    nonconst = span > 0
    out[:, nonconst] = (2.0 * (values[:, nonconst] - col_min[nonconst]) / span[nonconst]) - 1.0
    return out


def write_feature_csv(fm: FeatureMatrix, path: str | Path) -> None:
    """Write the matrix as CSV plus a '.meta' JSON sidecar."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fm.column_names + ["label"])
        for row, label in zip(fm.values, fm.labels):
            writer.writerow([f"{v:.17g}" for v in row] + [int(label)])
    with open(path.with_suffix(path.suffix + ".meta"), "w", encoding="utf-8") as fh:
        json.dump(fm.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_feature_csv(path: str | Path) -> FeatureMatrix:
    path = Path(path)
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "label":
            raise ShapeError(f"{path}: expected a trailing 'label' column")
        rows, labels = [], []
        for row in reader:
            rows.append([float(v) for v in row[:-1]])
            labels.append(int(row[-1]))
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    meta_path = path.with_suffix(path.suffix + ".meta")
    meta = {}
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    return FeatureMatrix(
        values=np.asarray(rows, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.int64),
        column_names=header[:-1],
        meta=meta,
    )
