"""The fuzzy-entropy kernel family.

Thirteen irregularity measures over a real sequence (one of them over a
pair of sequences), all built on the same primitive: templates of
consecutive samples, a Chebyshev distance between templates, and an
exponential fuzzy membership ``exp(-d**n / r)`` in place of a hard
threshold. The tolerance ``r`` is always a fraction of the standard
deviation of the series the kernel actually works on, so features stay
comparable across sub-bands of very different amplitude.

Conventions shared by all kernels:

* templates are baseline-removed (each window minus its own mean) unless
  a kernel explicitly uses the global series mean;
* for an N-sample series and embedding dimension m, both the m and the
  m+1 stage use N - m templates, so their counting ranges agree;
* a zero-variance series (or any intermediate singularity such as a
  zero-variance segment vector) yields a *degenerate* result of 0.0 with
  a flag rather than an error, because near-silent sub-bands are normal
  in practice;
* natural logarithms throughout, except the distribution entropy which
  is defined in bits and normalised by log2 of its bin count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import digamma, gamma as gamma_fn

from .emd import emd
from .errors import InsufficientDataError, ParameterError

_CHUNK = 256


@dataclass(frozen=True)
class EntropyParams:
    """Knobs of the kernel family; every kernel reads only the ones it needs.

    m, n, r_frac       embedding dimension, fuzzy power, tolerance fraction
    tau                scale factor of the multiscale / refined-composite /
                       inherent variants
    alpha              fractional order of the fractional variant
    pm, delay          permuted dimension and embedding delay of the
                       permutation variant
    k_depth            layers of the hierarchical variant
    k_seg              segments of the minimum-variance variant
    m_bins             histogram bins of the distribution variant
    shift              sample shift of the averaged variant's operators
    n_local/r_local_frac, n_global/r_global_frac
                       similarity parameters of the measure variant
    drop_imfs          mode indices removed when the inherent variant
                       regenerates its input
    """

    m: int = 2
    n: float = 2.0
    r_frac: float = 0.15
    tau: int = 2
    alpha: float = 0.5
    pm: int = 3
    delay: int = 1
    k_depth: int = 2
    k_seg: int = 8
    m_bins: int = 512
    shift: int = 1
    n_local: float = 3.0
    r_local_frac: float = 0.15
    n_global: float = 2.0
    r_global_frac: float = 0.15
    drop_imfs: tuple[int, ...] = (0,)

    def __post_init__(self):
        checks = [
            (self.m >= 1, f"m must be >= 1, got {self.m}"),
            (self.n > 0, f"n must be positive, got {self.n}"),
            (self.r_frac > 0, f"r_frac must be positive, got {self.r_frac}"),
            (self.tau >= 1, f"tau must be >= 1, got {self.tau}"),
            (self.pm >= 2, f"pm must be >= 2, got {self.pm}"),
            (self.delay >= 1, f"delay must be >= 1, got {self.delay}"),
            (self.k_depth >= 0, f"k_depth must be >= 0, got {self.k_depth}"),
            (self.k_seg >= 2, f"k_seg must be >= 2, got {self.k_seg}"),
            (self.m_bins >= 2, f"m_bins must be >= 2, got {self.m_bins}"),
            (self.shift >= 1, f"shift must be >= 1, got {self.shift}"),
            (self.n_local > 0 and self.n_global > 0, "local/global powers must be positive"),
            (self.r_local_frac > 0 and self.r_global_frac > 0, "local/global tolerance fractions must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ParameterError(msg)


DEFAULT_PARAMS = EntropyParams()


@dataclass(frozen=True)
class EntropyResult:
    value: float
    entropy_id: str
    degenerate: bool = False
    elapsed: float | None = None


# ---------------------------------------------------------------------------
# shared primitives


def _series(x, min_len: int, what: str = "series") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError(f"{what} must be 1-d, got shape {x.shape}")
    if x.size < min_len:
        raise InsufficientDataError(f"{what} needs >= {min_len} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ParameterError(f"{what} contains non-finite values")
    return x


def _tolerance(x: np.ndarray, r_frac: float) -> float | None:
    sd = float(np.std(x))
    if sd == 0.0:
        return None
    return r_frac * sd


def _membership_rowsums(a: np.ndarray, b: np.ndarray, n: float, r: float,
                        exclude_diag: bool = False) -> np.ndarray:
    """Row sums of exp(-d(a_i, b_j)**n / r) with Chebyshev d, in row chunks."""
    ca = a.shape[0]
    dims = a.shape[1]
    sums = np.empty(ca)
    for start in range(0, ca, _CHUNK):
        stop = min(start + _CHUNK, ca)
        d = np.abs(a[start:stop, None, 0] - b[None, :, 0])
        for k in range(1, dims):
            np.maximum(d, np.abs(a[start:stop, None, k] - b[None, :, k]), out=d)
        if n == 2.0:
            d *= d
        elif n != 1.0:
            d **= n
        d /= -r
        sim = np.exp(d)
        if exclude_diag:
            rows = np.arange(start, stop)
            sim[rows - start, rows] = 0.0
        sums[start:stop] = sim.sum(axis=1)
    return sums


def _phi_self(templates: np.ndarray, n: float, r: float) -> float:
    """Mean over i of the mean over j != i of the fuzzy similarity."""
    c = templates.shape[0]
    sums = _membership_rowsums(templates, templates, n, r, exclude_diag=True)
    return float(np.mean(sums / (c - 1)))


def _local_templates(x: np.ndarray, dim: int, count: int) -> np.ndarray:
    w = sliding_window_view(x, dim)[:count]
    return w - w.mean(axis=1, keepdims=True)


def _fuen_phis(x: np.ndarray, m: int, n: float, r: float) -> tuple[float, float]:
    count = x.size - m
    phi_m = _phi_self(_local_templates(x, m, count), n, r)
    phi_m1 = _phi_self(_local_templates(x, m + 1, count), n, r)
    return phi_m, phi_m1


def coarse_grain(x, tau: int) -> np.ndarray:
    """Means of consecutive non-overlapping blocks of tau samples."""
    x = np.asarray(x, dtype=np.float64)
    n_blocks = x.size // tau
    return x[: n_blocks * tau].reshape(n_blocks, tau).mean(axis=1)


def hierarchical_components(x, depth: int) -> list[np.ndarray]:
    """The 2**depth leaf series of the pairwise average/difference tree."""
    comps = [np.asarray(x, dtype=np.float64)]
    for _ in range(depth):
        nxt = []
        for c in comps:
            half = c.size // 2
            even, odd = c[: 2 * half : 2], c[1 : 2 * half : 2]
            nxt.append((even + odd) / 2.0)
            nxt.append((even - odd) / 2.0)
        comps = nxt
    return comps


# ---------------------------------------------------------------------------
# kernels (internal versions report degeneracy alongside the value)


def _fu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, p.m + 2)
    r = _tolerance(x, p.r_frac)
    if r is None:
        return 0.0, True
    phi_m, phi_m1 = _fuen_phis(x, p.m, p.n, r)
    if phi_m <= 0.0 or phi_m1 <= 0.0:
        return 0.0, True
    return math.log(phi_m) - math.log(phi_m1), False


_OPERATORS = ("T", "R", "I", "G")


def _afu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, p.m + p.shift + 2)
    r = _tolerance(x, p.r_frac)
    if r is None:
        return 0.0, True
    count = x.size - p.m
    idx = np.arange(count)
    total = 0.0
    for op in _OPERATORS:
        phis = []
        for dim in (p.m, p.m + 1):
            t = _local_templates(x, dim, count)
            if op in ("T", "G"):
                perm = (idx + p.shift) % count
            else:
                perm = (p.shift - idx) % count
            sign = -1.0 if op in ("I", "G") else 1.0
            sums = _membership_rowsums(t, sign * t[perm], p.n, r, exclude_diag=True)
            phis.append(float(np.mean(sums / (count - 1))))
        if phis[0] <= 0.0 or phis[1] <= 0.0:
            return 0.0, True
        total += math.log(phis[0]) - math.log(phis[1])
    return total / len(_OPERATORS), False


def _mfu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, p.tau * (p.m + 2))
    return _fu_en(coarse_grain(x, p.tau), p)


def _rcm_fu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, (p.m + 2) * p.tau + p.tau - 1)
    phis_m, phis_m1 = [], []
    for k in range(p.tau):
        z = coarse_grain(x[k:], p.tau)
        if z.size < p.m + 2:
            raise InsufficientDataError(f"coarse series at shift {k} too short ({z.size})")
        r = _tolerance(z, p.r_frac)
        if r is None:
            return 0.0, True
        phi_m, phi_m1 = _fuen_phis(z, p.m, p.n, r)
        phis_m.append(phi_m)
        phis_m1.append(phi_m1)
    mean_m, mean_m1 = float(np.mean(phis_m)), float(np.mean(phis_m1))
    if mean_m <= 0.0 or mean_m1 <= 0.0:
        return 0.0, True
    return -math.log(mean_m1 / mean_m), False


def _ffu_en(x, p: EntropyParams) -> tuple[float, bool]:
    if not -1.0 < p.alpha < 1.0:
        raise ParameterError(f"fractional order must lie in (-1, 1), got {p.alpha}")
    x = _series(x, p.m + 2)
    r = _tolerance(x, p.r_frac)
    if r is None:
        return 0.0, True
    phi_m, phi_m1 = _fuen_phis(x, p.m, p.n, r)
    if phi_m <= 0.0 or phi_m1 <= 0.0:
        return 0.0, True
    ratio = phi_m1 / phi_m
    value = -(ratio ** (-p.alpha)) * (
        (math.log(ratio) + digamma(1.0) - digamma(1.0 - p.alpha)) / gamma_fn(1.0 + p.alpha)
    )
    return float(value), False


def _fu_ap_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, p.m + 2)
    r = _tolerance(x, p.r_frac)
    if r is None:
        return 0.0, True

    def phi(dim: int) -> float | None:
        t = _local_templates(x, dim, x.size - dim + 1)
        c = t.shape[0]
        sums = _membership_rowsums(t, t, p.n, r, exclude_diag=True)
        mean_sim = sums / c  # normaliser counts all templates, sum skips j == i
        if np.any(mean_sim <= 0.0):
            return None
        return float(np.mean(np.log(mean_sim)))

    phi_m, phi_m1 = phi(p.m), phi(p.m + 1)
    if phi_m is None or phi_m1 is None:
        return 0.0, True
    return phi_m - phi_m1, False


def _mvm_fu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, 4 * p.k_seg)
    seg_len = x.size // p.k_seg
    segments = x[: p.k_seg * seg_len].reshape(p.k_seg, seg_len)
    energy = segments**2
    totals = energy.sum(axis=1)
    if np.any(totals == 0.0):
        return 0.0, True
    rel = energy / totals[:, None]
    term = np.zeros_like(rel)
    pos = rel > 0.0
    term[pos] = rel[pos] * np.log(rel[pos])
    below_one = rel < 1.0
    term[below_one] += (1.0 - rel[below_one]) * np.log1p(-rel[below_one])
    h = -term.sum(axis=1) / seg_len
    h_min = float(h.min())
    if h_min <= 0.0:
        return 0.0, True
    h_norm = h / h_min
    var = float(h_norm.var())
    if var == 0.0:
        return 0.0, True
    return float((h_norm / var).mean()), False


def _ifu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, max(16, p.tau * (p.m + 2)))
    imfs, _ = emd(x)
    x_hat = x.copy()
    for i in p.drop_imfs:
        if 0 <= i < len(imfs):
            x_hat -= imfs[i]
    return _mfu_en(x_hat, p)


def _entropy_from_counts(counts: np.ndarray, m_bins: int) -> float:
    total = counts.sum()
    probs = counts[counts > 0] / total
    return float(-np.sum(probs * (np.log2(probs) / np.log2(m_bins))))


def epdf_entropy(values, m_bins: int) -> float:
    """Normalised bit entropy of the histogram of values over [0, 1]."""
    counts, _ = np.histogram(np.asarray(values, dtype=np.float64), bins=m_bins, range=(0.0, 1.0))
    return _entropy_from_counts(counts, m_bins)


def _fu_dist_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, p.m + 2)
    r = _tolerance(x, p.r_frac)
    if r is None:
        return 0.0, True
    t = _local_templates(x, p.m, x.size - p.m + 1)
    c = t.shape[0]
    counts = np.zeros(p.m_bins, dtype=np.int64)
    for start in range(0, c, _CHUNK):
        stop = min(start + _CHUNK, c)
        d = np.abs(t[start:stop, None, 0] - t[None, :, 0])
        for k in range(1, p.m):
            np.maximum(d, np.abs(t[start:stop, None, k] - t[None, :, k]), out=d)
        if p.n == 2.0:
            d *= d
        elif p.n != 1.0:
            d **= p.n
        d /= -r
        sim = np.exp(d)
        keep = np.ones(sim.shape, dtype=bool)
        rows = np.arange(start, stop)
        keep[rows - start, rows] = False  # shun self-matching
        counts += np.histogram(sim[keep], bins=p.m_bins, range=(0.0, 1.0))[0]
    return _entropy_from_counts(counts, p.m_bins), False


def _c_fu_en(x, y, p: EntropyParams, exclude_self: bool = False) -> tuple[float, bool]:
    x = _series(x, p.m + 2, "first series")
    y = _series(y, p.m + 2, "second series")
    if exclude_self and x.size != y.size:
        raise ParameterError("self-exclusion needs series of equal length")
    pooled = math.sqrt((float(np.var(x)) + float(np.var(y))) / 2.0)
    if pooled == 0.0:
        return 0.0, True
    r = p.r_frac * pooled

    def phi(dim: int) -> float:
        count_x, count_y = x.size - p.m, y.size - p.m
        tx = _local_templates(x, dim, count_x)
        ty = _local_templates(y, dim, count_y)
        sums = _membership_rowsums(tx, ty, p.n, r, exclude_diag=exclude_self)
        denom = count_y - 1 if exclude_self else count_y
        return float(np.mean(sums / denom))

    phi_m, phi_m1 = phi(p.m), phi(p.m + 1)
    if phi_m <= 0.0 or phi_m1 <= 0.0:
        return 0.0, True
    return -math.log(phi_m1 / phi_m), False


def ordinal_ranks(x, pm: int, delay: int) -> np.ndarray:
    """Lexicographic rank in [1, pm!] of each length-pm ordinal pattern."""
    x = np.asarray(x, dtype=np.float64)
    k = x.size - (pm - 1) * delay
    emb = np.empty((k, pm))
    for c in range(pm):
        emb[:, c] = x[c * delay : c * delay + k]
    pattern = np.argsort(emb, axis=1, kind="stable")
    ranks = np.zeros(k, dtype=np.int64)
    for pos in range(pm):
        if pos:
            ranks *= pm - pos
        larger_before = np.zeros(k, dtype=np.int64)
        for later in range(pos + 1, pm):
            larger_before += pattern[:, later] < pattern[:, pos]
        ranks += larger_before
    return ranks + 1


def _fu_pe_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, (p.pm - 1) * p.delay + p.m + 2)
    ranks = ordinal_ranks(x, p.pm, p.delay).astype(np.float64)
    return _fu_en(ranks, p)


def _h_fu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = _series(x, (p.m + 2) << p.k_depth)
    if float(np.std(x)) == 0.0:
        return 0.0, True
    values = [_fu_en(c, p)[0] for c in hierarchical_components(x, p.k_depth)]
    return float(np.mean(values)), False


def _fu_me_en_all(x, p: EntropyParams) -> tuple[tuple[float, float, float], bool]:
    x = _series(x, p.m + 2)
    sd = float(np.std(x))
    if sd == 0.0:
        return (0.0, 0.0, 0.0), True
    count = x.size - p.m
    global_mean = float(np.mean(x))

    def phi(dim: int, global_baseline: bool, n: float, r: float) -> float:
        w = sliding_window_view(x, dim)[:count]
        t = w - global_mean if global_baseline else w - w.mean(axis=1, keepdims=True)
        return _phi_self(t, n, r)

    phis = [
        phi(p.m, False, p.n_local, p.r_local_frac * sd),
        phi(p.m + 1, False, p.n_local, p.r_local_frac * sd),
        phi(p.m, True, p.n_global, p.r_global_frac * sd),
        phi(p.m + 1, True, p.n_global, p.r_global_frac * sd),
    ]
    if any(v <= 0.0 for v in phis):
        return (0.0, 0.0, 0.0), True
    local = math.log(phis[0]) - math.log(phis[1])
    global_ = math.log(phis[2]) - math.log(phis[3])
    return (local + global_, local, global_), False


# ---------------------------------------------------------------------------
# public single-value API


def fu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Standard fuzzy entropy, log form."""
    return _fu_en(x, p)[0]


def afu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Mean fuzzy entropy over translated/reflected/inverted/glide templates."""
    return _afu_en(x, p)[0]


def mfu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Fuzzy entropy of the scale-tau coarse-grained series."""
    return _mfu_en(x, p)[0]


def rcm_fu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Refined composite multiscale variant: phis averaged over the tau shifts."""
    return _rcm_fu_en(x, p)[0]


def ffu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Fractional-order fuzzy entropy."""
    return _ffu_en(x, p)[0]


def fu_ap_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Fuzzy approximate entropy (log-of-mean form, self-matches excluded)."""
    return _fu_ap_en(x, p)[0]


def mvm_fu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Minimum-variance-normalised segment entropy of relative energies."""
    return _mvm_fu_en(x, p)[0]


def ifu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Multiscale fuzzy entropy of the mode-filtered signal."""
    return _ifu_en(x, p)[0]


def fu_dist_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Distribution entropy of the pairwise fuzzy-similarity histogram."""
    return _fu_dist_en(x, p)[0]


def c_fu_en(x, y, p: EntropyParams = DEFAULT_PARAMS, exclude_self: bool = False) -> float:
    """Cross fuzzy entropy between two series.

    With ``exclude_self=True`` (and equal lengths) template pairs with
    equal indices are skipped, which makes ``c_fu_en(x, x)`` coincide with
    :func:`fu_en`.
    """
    return _c_fu_en(x, y, p, exclude_self)[0]


def fu_pe_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Fuzzy entropy of the ordinal-pattern rank series."""
    return _fu_pe_en(x, p)[0]


def h_fu_en(x, p: EntropyParams = DEFAULT_PARAMS) -> float:
    """Mean fuzzy entropy over the depth-k hierarchical components."""
    return _h_fu_en(x, p)[0]


def fu_me_en(x, p: EntropyParams = DEFAULT_PARAMS) -> tuple[float, float, float]:
    """Fuzzy measure entropy: (total, local, global); total = local + global."""
    return _fu_me_en_all(x, p)[0]


# ---------------------------------------------------------------------------
# registry

def _registry_c_fu_en(x, p: EntropyParams) -> tuple[float, bool]:
    x = np.asarray(x, dtype=np.float64)
    half = x.size // 2
    return _c_fu_en(x[:half], x[half:], p)


def _fu_me_en_component(idx: int) -> "_KernelFn":
    def kernel(x, p: EntropyParams) -> tuple[float, bool]:
        values, degenerate = _fu_me_en_all(x, p)
        return values[idx], degenerate

    return kernel


_KernelFn = Callable[[np.ndarray, EntropyParams], tuple[float, bool]]

REGISTRY: dict[str, _KernelFn] = {
    "fu_en": _fu_en,
    "afu_en": _afu_en,
    "mfu_en": _mfu_en,
    "rcm_fu_en": _rcm_fu_en,
    "ffu_en": _ffu_en,
    "fu_ap_en": _fu_ap_en,
    "mvm_fu_en": _mvm_fu_en,
    "ifu_en": _ifu_en,
    "fu_dist_en": _fu_dist_en,
    "c_fu_en": _registry_c_fu_en,
    "fu_pe_en": _fu_pe_en,
    "h_fu_en": _h_fu_en,
    "fu_me_en": _fu_me_en_component(0),
    "fu_me_en_local": _fu_me_en_component(1),
    "fu_me_en_global": _fu_me_en_component(2),
}

#: The thirteen distinct kernels (measure entropy counted once).
PRIMARY_KERNELS = (
    "fu_en", "afu_en", "mfu_en", "rcm_fu_en", "ffu_en", "fu_ap_en", "mvm_fu_en",
    "ifu_en", "fu_dist_en", "c_fu_en", "fu_pe_en", "h_fu_en", "fu_me_en",
)

#: All registry ids, including the measure entropy's two components.
ALL_KERNELS = PRIMARY_KERNELS + ("fu_me_en_local", "fu_me_en_global")


def compute(kernel_id: str, x, p: EntropyParams = DEFAULT_PARAMS, timed: bool = False) -> EntropyResult:
    """Evaluate a kernel by its registry id."""
    try:
        fn = REGISTRY[kernel_id]
    except KeyError:
        raise ParameterError(f"unknown kernel id {kernel_id!r}") from None
    start = time.perf_counter() if timed else None
    value, degenerate = fn(x, p)
    elapsed = time.perf_counter() - start if timed else None
    return EntropyResult(value=value, entropy_id=kernel_id, degenerate=degenerate, elapsed=elapsed)
