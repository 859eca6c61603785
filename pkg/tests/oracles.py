"""Literal brute-force reference implementations of the entropy kernels.

Everything here is written as plain nested loops, directly following the
defining sums, with no code shared with the package implementations
(except the mode decomposition, which the inherent variant reuses because
its regenerated signal must match bit for bit). Slow on purpose.
"""

import itertools
import math

import numpy as np
from scipy.special import digamma, gamma as gamma_fn

from eegfuzz.emd import emd


def cheb(a, b):
    return max(abs(float(u) - float(v)) for u, v in zip(a, b))


def membership(d, n, r):
    return math.exp(-(d**n) / r)


def local_template(x, i, m):
    w = [float(v) for v in x[i:i + m]]
    mean = sum(w) / m
    return [v - mean for v in w]


def fuen_phi_pair(x, m, n, r):
    """The phi sums run over i, j = 1..N-m for both the m and m+1 stage."""
    count = len(x) - m
    phi_m_templates = [local_template(x, i, m) for i in range(count)]
    phi_m1_templates = [local_template(x, i, m + 1) for i in range(count)]

    def phi(templates):
        total = 0.0
        for i in range(count):
            inner = 0.0
            for j in range(count):
                if j != i:
                    inner += membership(cheb(templates[i], templates[j]), n, r)
            total += inner / (count - 1)
        return total / count

    return phi(phi_m_templates), phi(phi_m1_templates)


def tolerance(x, r_frac):
    return r_frac * float(np.std(np.asarray(x, dtype=float)))


def fu_en(x, m=2, n=2.0, r_frac=0.15):
    r = tolerance(x, r_frac)
    phi_m, phi_m1 = fuen_phi_pair(x, m, n, r)
    return math.log(phi_m) - math.log(phi_m1)


def afu_en_components(x, m=2, n=2.0, r_frac=0.15, shift=1):
    """The four operator entropies (T, R, I, G), in that order."""
    r = tolerance(x, r_frac)
    count = len(x) - m
    out = []
    for op in ("T", "R", "I", "G"):
        phis = []
        for dim in (m, m + 1):
            templates = [local_template(x, i, dim) for i in range(count)]
            total = 0.0
            for i in range(count):
                inner = 0.0
                for j in range(count):
                    if j == i:
                        continue
                    if op in ("T", "G"):
                        jj = (j + shift) % count
                    else:
                        jj = (shift - j) % count
                    other = templates[jj]
                    if op in ("I", "G"):
                        other = [-v for v in other]
                    inner += membership(cheb(templates[i], other), n, r)
                total += inner / (count - 1)
            phis.append(total / count)
        out.append(math.log(phis[0]) - math.log(phis[1]))
    return out


def afu_en(x, m=2, n=2.0, r_frac=0.15, shift=1):
    comps = afu_en_components(x, m, n, r_frac, shift)
    return sum(comps) / 4.0


def coarse(x, tau):
    blocks = len(x) // tau
    return [sum(float(v) for v in x[j * tau:(j + 1) * tau]) / tau for j in range(blocks)]


def mfu_en(x, m=2, n=2.0, r_frac=0.15, tau=2):
    return fu_en(coarse(x, tau), m, n, r_frac)


def rcm_fu_en(x, m=2, n=2.0, r_frac=0.15, tau=2):
    phis_m, phis_m1 = [], []
    for k in range(tau):
        z = coarse(x[k:], tau)
        r = tolerance(z, r_frac)
        phi_m, phi_m1 = fuen_phi_pair(z, m, n, r)
        phis_m.append(phi_m)
        phis_m1.append(phi_m1)
    return -math.log((sum(phis_m1) / tau) / (sum(phis_m) / tau))


def ffu_en(x, m=2, n=2.0, r_frac=0.15, alpha=0.5):
    r = tolerance(x, r_frac)
    phi_m, phi_m1 = fuen_phi_pair(x, m, n, r)
    ratio = phi_m1 / phi_m
    return -(ratio ** (-alpha)) * (
        (math.log(ratio) + digamma(1.0) - digamma(1.0 - alpha)) / gamma_fn(1.0 + alpha)
    )


def fu_ap_en(x, m=2, n=2.0, r_frac=0.15):
    r = tolerance(x, r_frac)

    def phi(dim):
        count = len(x) - dim + 1
        templates = [local_template(x, i, dim) for i in range(count)]
        total = 0.0
        for i in range(count):
            inner = 0.0
            for j in range(count):
                if j != i:
                    inner += membership(cheb(templates[i], templates[j]), n, r)
            total += math.log(inner / count)
        return total / count

    return phi(m) - phi(m + 1)


def mvm_fu_en(x, k_seg=8):
    seg_len = len(x) // k_seg
    h = []
    for s in range(k_seg):
        seg = [float(v) for v in x[s * seg_len:(s + 1) * seg_len]]
        tot = sum(v * v for v in seg)
        acc = 0.0
        for v in seg:
            psi = v * v / tot
            if psi > 0.0:
                acc += psi * math.log(psi)
            if psi < 1.0:
                acc += (1.0 - psi) * math.log(1.0 - psi)
        h.append(-acc / seg_len)
    h_min = min(h)
    h_new = [v / h_min for v in h]
    mean = sum(h_new) / k_seg
    var = sum((v - mean) ** 2 for v in h_new) / k_seg
    return sum(v / var for v in h_new) / k_seg


def ifu_en(x, m=2, n=2.0, r_frac=0.15, tau=2, drop_imfs=(0,)):
    x = np.asarray(x, dtype=float)
    imfs, _ = emd(x)  # shared sub-step; the entropy arithmetic below is not
    x_hat = x.copy()
    for i in drop_imfs:
        if 0 <= i < len(imfs):
            x_hat = x_hat - imfs[i]
    return mfu_en([float(v) for v in x_hat], m, n, r_frac, tau)


def fu_dist_en(x, m=2, n=2.0, r_frac=0.15, m_bins=512):
    r = tolerance(x, r_frac)
    count = len(x) - m + 1
    templates = [local_template(x, i, m) for i in range(count)]
    values = []
    for i in range(count):
        for j in range(count):
            if j != i:
                values.append(membership(cheb(templates[i], templates[j]), n, r))
    counts = [0] * m_bins
    for v in values:
        b = min(int(v * m_bins), m_bins - 1)
        counts[b] += 1
    total = len(values)
    acc = 0.0
    for cnt in counts:
        if cnt:
            p = cnt / total
            acc += p * math.log2(p) / math.log2(m_bins)
    return -acc


def c_fu_en(x, y, m=2, n=2.0, r_frac=0.15, exclude_self=False):
    vx = np.var(np.asarray(x, dtype=float))
    vy = np.var(np.asarray(y, dtype=float))
    r = r_frac * math.sqrt((float(vx) + float(vy)) / 2.0)

    def phi(dim):
        cx, cy = len(x) - m, len(y) - m
        tx = [local_template(x, i, dim) for i in range(cx)]
        ty = [local_template(y, j, dim) for j in range(cy)]
        total = 0.0
        for i in range(cx):
            inner = 0.0
            cnt = 0
            for j in range(cy):
                if exclude_self and j == i:
                    continue
                inner += membership(cheb(tx[i], ty[j]), n, r)
                cnt += 1
            total += inner / cnt
        return total / cx

    return -math.log(phi(m + 1) / phi(m))


def ordinal_rank_series(x, pm, delay):
    table = {perm: i + 1 for i, perm in enumerate(sorted(itertools.permutations(range(pm))))}
    k = len(x) - (pm - 1) * delay
    ranks = []
    for i in range(k):
        row = [float(x[i + c * delay]) for c in range(pm)]
        pattern = tuple(sorted(range(pm), key=lambda c: (row[c], c)))
        ranks.append(table[pattern])
    return ranks


def fu_pe_en(x, m=2, n=2.0, r_frac=0.15, pm=3, delay=1):
    return fu_en([float(v) for v in ordinal_rank_series(x, pm, delay)], m, n, r_frac)


def hierarchical_leaves(x, depth):
    comps = [[float(v) for v in x]]
    for _ in range(depth):
        nxt = []
        for c in comps:
            half = len(c) // 2
            nxt.append([(c[2 * i] + c[2 * i + 1]) / 2.0 for i in range(half)])
            nxt.append([(c[2 * i] - c[2 * i + 1]) / 2.0 for i in range(half)])
        comps = nxt
    return comps


def h_fu_en(x, m=2, n=2.0, r_frac=0.15, k_depth=2):
    leaves = hierarchical_leaves(x, k_depth)
    return sum(fu_en(c, m, n, r_frac) for c in leaves) / len(leaves)


def fu_me_en(x, m=2, n_local=3.0, r_local_frac=0.15, n_global=2.0, r_global_frac=0.15):
    sd = float(np.std(np.asarray(x, dtype=float)))
    r_l, r_g = r_local_frac * sd, r_global_frac * sd
    global_mean = sum(float(v) for v in x) / len(x)
    count = len(x) - m

    def phi(dim, global_baseline, n, r):
        if global_baseline:
            templates = [[float(v) - global_mean for v in x[i:i + dim]] for i in range(count)]
        else:
            templates = [local_template(x, i, dim) for i in range(count)]
        total = 0.0
        for i in range(count):
            inner = 0.0
            for j in range(count):
                if j != i:
                    inner += membership(cheb(templates[i], templates[j]), n, r)
            total += inner / (count - 1)
        return total / count

    local = math.log(phi(m, False, n_local, r_l)) - math.log(phi(m + 1, False, n_local, r_l))
    glob = math.log(phi(m, True, n_global, r_g)) - math.log(phi(m + 1, True, n_global, r_g))
    return local + glob, local, glob
