"""Tunable-Q wavelet transform: analysis and synthesis filter banks.

The transform iterates a two-channel frequency-domain filter bank. The
low-pass branch scales the spectrum by ``xi`` and the high-pass branch
by ``gamma``, where both scaling factors derive from the quality factor
``q`` and redundancy ``r``::

    gamma = 2 / (q + 1)        xi = 1 - gamma / r

Filters are built on the DFT grid so the two branches satisfy
``H0(w)**2 + H1(w)**2 == 1`` bin-by-bin, which makes the filter bank
perfectly reconstructing up to FFT rounding.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, ShapeError


@dataclass(frozen=True)
class TqwtParams:
    """Transform parameters: quality factor, redundancy, level count."""

    q: float = 1.0
    r: float = 3.0
    levels: int = 8

    def __post_init__(self):
        if not self.r > 1:
            raise ParameterError(f"redundancy must exceed 1, got {self.r}")
        if not self.q >= 1:
            raise ParameterError(f"quality factor must be >= 1, got {self.q}")
        if self.levels < 1:
            raise ParameterError(f"level count must be >= 1, got {self.levels}")
        gamma, xi = self.gamma, self.xi
        if not (0 < xi < 1 and 0 < gamma <= 1 and xi + gamma > 1):
            raise ParameterError(f"derived scaling factors invalid: gamma={gamma}, xi={xi}")

    @property
    def gamma(self) -> float:
        """High-pass scaling factor."""
        return 2.0 / (self.q + 1.0)

    @property
    def xi(self) -> float:
        """Low-pass scaling factor."""
        return 1.0 - self.gamma / self.r

    def max_levels(self, n: int) -> int:
        """Deepest valid decomposition for an n-sample signal."""
        if n < 4:
            return 0
        arg = self.gamma * n / 8.0
        if arg <= 1.0:
            return 0
        return int(math.floor(math.log(arg) / math.log(1.0 / self.xi)))


@dataclass
class SubBandSet:
    """Coefficients of one decomposition.

    ``bands[0]`` is the highest-frequency detail, ``bands[-1]`` the final
    low-pass approximation; ``levels + 1`` bands in total.
    """

    bands: list[np.ndarray]
    params: TqwtParams
    original_length: int


def daubechies_response(w):
    """Transition-band frequency response cos^2(w/2) * sqrt(2 - cos w)."""
    w = np.asarray(w, dtype=np.float64)
    return np.cos(w / 2.0) ** 2 * np.sqrt(2.0 - np.cos(w))


def analysis_filters(params: TqwtParams, omega_grid) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the low/high-pass responses H0, H1 on frequencies in [0, pi]."""
    w = np.asarray(omega_grid, dtype=np.float64)
    if np.any(w < 0) or np.any(w > np.pi):
        raise ParameterError("omega grid values must lie in [0, pi]")
    gamma, xi = params.gamma, params.xi
    lo_edge = (1.0 - gamma) * np.pi
    hi_edge = xi * np.pi
    width = xi + gamma - 1.0
    h0 = np.zeros_like(w)
    h1 = np.zeros_like(w)
    pass_band = w < lo_edge
    stop_band = w >= hi_edge
    trans = ~(pass_band | stop_band)
    h0[pass_band] = 1.0
    h1[stop_band] = 1.0
    h0[trans] = daubechies_response((w[trans] + (gamma - 1.0) * np.pi) / width)
    h1[trans] = daubechies_response((xi * np.pi - w[trans]) / width)
    return h0, h1


def _even(x: float) -> int:
    """Nearest even integer to x (ties away from zero)."""
    return 2 * int(math.floor(x / 2.0 + 0.5))


def _level_lengths(params: TqwtParams, n: int) -> list[tuple[int, int, int]]:
    """Per level: (input length, low-pass output length, high-pass output length).

    All lengths are computed from the original n so per-level rounding does
    not compound.
    """
    gamma, xi = params.gamma, params.xi
    out = []
    for j in range(1, params.levels + 1):
        m = n if j == 1 else _even(xi ** (j - 1) * n)
        n0 = _even(xi ** j * n)
        n1 = _even(gamma * xi ** (j - 1) * n)
        if n1 > m or n0 > m or (n0 + n1 - m) // 2 - 1 < 0 or n0 < 4:
            raise ParameterError(
                f"level {j} of {params.levels} infeasible for length {n} "
                f"(q={params.q}, r={params.r})"
            )
        out.append((m, n0, n1))
    return out


def _transition_gains(t: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.arange(1, t + 1) * (np.pi / (t + 1))
    return daubechies_response(u), daubechies_response(np.pi - u)


def _afb(spec: np.ndarray, n0: int, n1: int) -> tuple[np.ndarray, np.ndarray]:
    """Split one spectrum into low-pass (length n0) and high-pass (length n1)."""
    m = spec.shape[0]
    p = (m - n1) // 2
    t = (n0 + n1 - m) // 2 - 1
    g0, g1 = _transition_gains(t)

    v0 = np.zeros(n0, dtype=np.complex128)
    v1 = np.zeros(n1, dtype=np.complex128)

    v0[0] = spec[0]
    k = np.arange(1, n0 // 2)
    gain = np.ones(k.size)
    trans = k > p
    gain[trans] = g0[k[trans] - p - 1]
    v0[k] = gain * spec[k]
    v0[n0 - k] = gain * spec[m - k]
    # Nyquist of the low-pass output sits at the upper band edge: H0 = 0.

    k1 = np.arange(1, n1 // 2)
    i1 = p + k1
    gain1 = np.ones(k1.size)
    sel = k1 <= t
    gain1[sel] = g1[k1[sel] - 1]
    v1[k1] = gain1 * spec[i1]
    v1[n1 - k1] = gain1 * spec[m - i1]
    v1[n1 // 2] = spec[m // 2]  # H1 = 1 at the input Nyquist
    return v0, v1


def _sfb(v0: np.ndarray, v1: np.ndarray, m: int) -> np.ndarray:
    """Merge low-pass/high-pass spectra back into a length-m spectrum."""
    n0, n1 = v0.shape[0], v1.shape[0]
    p = (m - n1) // 2
    t = (n0 + n1 - m) // 2 - 1
    g0, g1 = _transition_gains(t)

    spec = np.zeros(m, dtype=np.complex128)
    spec[0] = v0[0]
    k = np.arange(1, n0 // 2)
    gain = np.ones(k.size)
    trans = k > p
    gain[trans] = g0[k[trans] - p - 1]
    spec[k] = gain * v0[k]
    spec[m - k] = gain * v0[n0 - k]

    k1 = np.arange(1, n1 // 2)
    i1 = p + k1
    gain1 = np.ones(k1.size)
    sel = k1 <= t
    gain1[sel] = g1[k1[sel] - 1]
    spec[i1] += gain1 * v1[k1]
    spec[m - i1] += gain1 * v1[n1 - k1]
    spec[m // 2] = v1[n1 // 2]
    return spec


def decompose(frame, params: TqwtParams) -> SubBandSet:
    """Decompose a frame into ``levels + 1`` sub-bands.

    Odd-length frames are zero-padded by one sample internally; the pad is
    dropped again by :func:`synthesize`.
    """
    x = np.asarray(frame, dtype=np.float64)
    if x.ndim != 1 or x.size < 4:
        raise ParameterError("frame must be a 1-d sequence of at least 4 samples")
    if not np.all(np.isfinite(x)):
        raise ParameterError("frame contains non-finite samples")
    original_length = x.size
    if x.size % 2:
        x = np.concatenate([x, [0.0]])
    n = x.size
    jmax = params.max_levels(n)
    if params.levels > jmax:
        raise ParameterError(
            f"levels={params.levels} exceeds the maximum {jmax} for a frame of {n} samples"
        )
    lengths = _level_lengths(params, n)
    spec = np.fft.fft(x)
    bands: list[np.ndarray] = []
    for _, n0, n1 in lengths:
        spec, high = _afb(spec, n0, n1)
        bands.append(np.fft.ifft(high).real)
    bands.append(np.fft.ifft(spec).real)
    return SubBandSet(bands=bands, params=params, original_length=original_length)


def synthesize(sub_bands: SubBandSet) -> np.ndarray:
    """Invert :func:`decompose`; returns a signal of the original length."""
    params = sub_bands.params
    n = sub_bands.original_length
    padded = n + (n % 2)
    if len(sub_bands.bands) != params.levels + 1:
        raise ShapeError(
            f"expected {params.levels + 1} bands for levels={params.levels}, "
            f"got {len(sub_bands.bands)}"
        )
    lengths = _level_lengths(params, padded)
    expected = [n1 for _, _, n1 in lengths] + [lengths[-1][1]]
    actual = [band.shape[0] for band in sub_bands.bands]
    if expected != actual:
        raise ShapeError(f"band lengths {actual} do not match params (expected {expected})")
    spec = np.fft.fft(sub_bands.bands[-1])
    for j in range(params.levels - 1, -1, -1):
        m_in, _, _ = lengths[j]
        spec = _sfb(spec, np.fft.fft(sub_bands.bands[j]), m_in)
    return np.fft.ifft(spec).real[:n]


def write_subbands_csv(sub_bands: SubBandSet, path: str | Path) -> None:
    """Export one decomposition: metadata row, then one row per band."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["q", sub_bands.params.q, "r", sub_bands.params.r,
             "levels", sub_bands.params.levels, "original_length", sub_bands.original_length]
        )
        for i, band in enumerate(sub_bands.bands, start=1):
            writer.writerow([f"band{i}"] + [f"{v:.17g}" for v in band])
