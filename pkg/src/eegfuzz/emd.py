"""Empirical mode decomposition by cubic-spline sifting.

Envelopes are natural cubic splines through the interior extrema plus the
two signal endpoints. Sifting of one mode stops when the normalised
squared change between consecutive candidates drops below ``sd_threshold``;
the decomposition stops when the residual has fewer than two interior
extrema (monotone or trivially flat).
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InsufficientDataError

SD_THRESHOLD = 0.3
MAX_SIFTINGS = 100
MAX_IMFS = 32


def _interior_extrema(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict local maxima and minima (endpoints excluded)."""
    d = np.diff(x)
    rising = d > 0
    falling = d < 0
    maxima = np.flatnonzero(rising[:-1] & falling[1:]) + 1
    minima = np.flatnonzero(falling[:-1] & rising[1:]) + 1
    return maxima, minima


def _envelope(x: np.ndarray, knots: np.ndarray) -> np.ndarray:
    idx = np.concatenate([[0], knots, [x.size - 1]])
    idx = np.unique(idx)
    if idx.size < 2:
        return np.full_like(x, x[idx[0]])
    spline = CubicSpline(idx, x[idx], bc_type="natural")
    return spline(np.arange(x.size))


def _sift(residual: np.ndarray, sd_threshold: float, max_siftings: int) -> np.ndarray | None:
    """Extract one oscillatory mode; None when the residual cannot be sifted."""
    h = residual
    for _ in range(max_siftings):
        maxima, minima = _interior_extrema(h)
        if maxima.size + minima.size < 2:
            return None if h is residual else h
        upper = _envelope(h, maxima)
        lower = _envelope(h, minima)
        h_new = h - (upper + lower) / 2.0
        denom = float(np.sum(h * h))
        if denom == 0.0:
            return h_new
        sd = float(np.sum((h - h_new) ** 2)) / denom
        h = h_new
        if sd < sd_threshold:
            return h
    return h


def emd(
    x,
    sd_threshold: float = SD_THRESHOLD,
    max_siftings: int = MAX_SIFTINGS,
    max_imfs: int = MAX_IMFS,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Decompose x into intrinsic mode functions plus a residual.

    Returns ``(imfs, residual)`` with ``sum(imfs) + residual == x`` up to
    rounding. A signal with fewer than two interior extrema comes back
    unchanged as the residual with no modes.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 16:
        raise InsufficientDataError(f"need a 1-d signal of >= 16 samples, got shape {x.shape}")
    imfs: list[np.ndarray] = []
    residual = x.copy()
    while len(imfs) < max_imfs:
        maxima, minima = _interior_extrema(residual)
        if maxima.size + minima.size < 2:
            break
        imf = _sift(residual, sd_threshold, max_siftings)
        if imf is None:
            break
        imfs.append(imf)
        residual = residual - imf
    return imfs, residual
