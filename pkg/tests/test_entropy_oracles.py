"""Each kernel against its literal nested-loop transcription."""

import math

import numpy as np
import pytest

import oracles
from eegfuzz import entropy as ent

P = ent.EntropyParams()


def sequences(seed, count, lengths=(32, 48, 64)):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = lengths[i % len(lengths)]
        out.append(rng.standard_normal(n))
    return out


ORACLE_OF = {
    "fu_en": lambda x: oracles.fu_en(x),
    "afu_en": lambda x: oracles.afu_en(x),
    "mfu_en": lambda x: oracles.mfu_en(x),
    "rcm_fu_en": lambda x: oracles.rcm_fu_en(x),
    "ffu_en": lambda x: oracles.ffu_en(x),
    "fu_ap_en": lambda x: oracles.fu_ap_en(x),
    "mvm_fu_en": lambda x: oracles.mvm_fu_en(x),
    "ifu_en": lambda x: oracles.ifu_en(x),
    "fu_dist_en": lambda x: oracles.fu_dist_en(x),
    "c_fu_en": lambda x: oracles.c_fu_en(x[: len(x) // 2], x[len(x) // 2 :]),
    "fu_pe_en": lambda x: oracles.fu_pe_en(x),
    "h_fu_en": lambda x: oracles.h_fu_en(x),
    "fu_me_en": lambda x: oracles.fu_me_en(x)[0],
}


@pytest.mark.parametrize("kernel_id", ent.PRIMARY_KERNELS)
def test_kernel_matches_oracle(kernel_id):
    for i, x in enumerate(sequences(seed=hash(kernel_id) % 1000, count=6)):
        impl = ent.compute(kernel_id, x, P).value
        ref = ORACLE_OF[kernel_id](x)
        assert impl == pytest.approx(ref, abs=1e-12), f"{kernel_id} differs on sequence {i}"


def test_fu_me_en_components_match_oracle(rng):
    x = rng.standard_normal(72)
    impl = ent.fu_me_en(x, P)
    ref = oracles.fu_me_en(x)
    for got, want in zip(impl, ref):
        assert got == pytest.approx(want, abs=1e-12)


class TestSpecSequences:
    def test_fu_en_ramp_sequence(self):
        x = np.array([1, 2, 3, 4, 5, 4, 3, 2, 1, 2], dtype=float)
        ref = oracles.fu_en(x, m=2, n=2.0, r_frac=0.15)
        assert ref == pytest.approx(0.6999010974297449, abs=1e-12)
        assert ent.fu_en(x, P) == pytest.approx(ref, abs=1e-12)

    def test_fu_ap_en_periodic_sequence(self):
        x = np.array([1, 2, 3, 2, 1, 2, 3, 2, 1, 2], dtype=float)
        p = ent.EntropyParams(r_frac=0.2)
        ref = oracles.fu_ap_en(x, m=2, n=2.0, r_frac=0.2)
        assert ref == pytest.approx(1.141661497661104, abs=1e-12)
        assert ent.fu_ap_en(x, p) == pytest.approx(ref, abs=1e-12)

    def test_mfu_en_block_means(self):
        assert np.array_equal(ent.coarse_grain(np.array([1., 2., 3., 4., 5., 6.]), 2),
                              [1.5, 3.5, 5.5])

    def test_afu_en_on_antisymmetric_input(self, rng):
        # x reversed equals -x; the four operator entropies are exercised
        # one by one against the transcription (their mean is the kernel).
        a = rng.standard_normal(24)
        x = np.concatenate([a, -a[::-1]])
        comps = oracles.afu_en_components(x)
        assert ent.afu_en(x, P) == pytest.approx(sum(comps) / 4.0, abs=1e-12)

    def test_rcm_two_shift_average(self, rng):
        x = rng.standard_normal(200)
        assert ent.rcm_fu_en(x, P) == pytest.approx(oracles.rcm_fu_en(x), abs=1e-12)

    def test_fu_dist_en_stepwise(self, rng):
        x = rng.standard_normal(128)
        p = ent.EntropyParams(m_bins=512)
        assert ent.fu_dist_en(x, p) == pytest.approx(oracles.fu_dist_en(x, m_bins=512), abs=1e-12)

    def test_fu_pe_en_alternating(self):
        x = np.array([1.0, 2.0] * 8)
        p = ent.EntropyParams(pm=2)
        ref = oracles.fu_pe_en(x, pm=2)
        assert ent.fu_pe_en(x, p) == pytest.approx(ref, abs=1e-12)

    def test_h_fu_en_depth2_mean_of_leaves(self, rng):
        x = rng.standard_normal(512)
        leaves = oracles.hierarchical_leaves(x, 2)
        assert len(leaves) == 4
        ref = np.mean([oracles.fu_en(c) for c in leaves])
        assert ent.h_fu_en(x, P) == pytest.approx(ref, abs=1e-12)

    def test_mvm_stepwise(self, rng):
        x = rng.standard_normal(256)
        assert ent.mvm_fu_en(x, P) == pytest.approx(oracles.mvm_fu_en(x), abs=1e-12)

    def test_ordinal_ranks_agree(self, rng):
        x = rng.standard_normal(100)
        for pm in (2, 3, 4):
            mine = ent.ordinal_ranks(x, pm, 1)
            ref = oracles.ordinal_rank_series(x, pm, 1)
            assert list(mine) == ref
            assert mine.min() >= 1 and mine.max() <= math.factorial(pm)
