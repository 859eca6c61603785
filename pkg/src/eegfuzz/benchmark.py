"""Wall-clock micro-benchmarks of the entropy kernels."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .entropy import DEFAULT_PARAMS, PRIMARY_KERNELS, REGISTRY, EntropyParams
from .errors import ParameterError


@dataclass
class BenchResult:
    kernel_id: str
    n: int
    repeats: int
    seconds: list[float] = field(default_factory=list)
    value: float = float("nan")

    @property
    def min_s(self) -> float:
        return min(self.seconds)

    @property
    def median_s(self) -> float:
        return float(np.median(self.seconds))


def benchmark_entropy(kernel_id: str, x, p: EntropyParams = DEFAULT_PARAMS,
                      repeats: int = 5) -> BenchResult:
    """Time one kernel; a warm-up evaluation is run first and not counted.

    Kernel output must be identical across repeats (they are pure), which
    is asserted as a cheap self-check.
    """
    if repeats < 3:
        raise ParameterError(f"need at least 3 repeats for a stable timing, got {repeats}")
    if kernel_id not in REGISTRY:
        raise ParameterError(f"unknown kernel id {kernel_id!r}")
    fn = REGISTRY[kernel_id]
    x = np.asarray(x, dtype=np.float64)
    warm_value, _ = fn(x, p)
    result = BenchResult(kernel_id=kernel_id, n=x.size, repeats=repeats, value=warm_value)
    for _ in range(repeats):
        start = time.perf_counter()
        value, _ = fn(x, p)
        result.seconds.append(time.perf_counter() - start)
        if value != warm_value:
            raise RuntimeError(f"kernel {kernel_id} is not deterministic across repeats")
    return result


def benchmark_all(x, p: EntropyParams = DEFAULT_PARAMS, repeats: int = 5) -> list[BenchResult]:
    """Benchmark the thirteen distinct kernels on one frame."""
    return [benchmark_entropy(kid, x, p, repeats) for kid in PRIMARY_KERNELS]


def write_benchmark_csv(results: list[BenchResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kernel_id", "n", "median_seconds", "min_seconds", "repeats"])
        for r in results:
            writer.writerow([r.kernel_id, r.n, f"{r.median_s:.9f}", f"{r.min_s:.9f}", r.repeats])
