"""Structural and invariance properties of the kernel family."""

import numpy as np
import pytest

from eegfuzz import entropy as ent
from eegfuzz.errors import InsufficientDataError, ParameterError

P = ent.EntropyParams()


class TestAnalyticReductions:
    def test_scale_one_multiscale_is_plain(self, rng):
        p1 = ent.EntropyParams(tau=1)
        for _ in range(5):
            x = rng.standard_normal(100)
            assert ent.mfu_en(x, p1) == pytest.approx(ent.fu_en(x, p1), abs=1e-12)
            assert ent.rcm_fu_en(x, p1) == pytest.approx(ent.fu_en(x, p1), abs=1e-12)

    def test_zero_order_fractional_is_plain(self, rng):
        p0 = ent.EntropyParams(alpha=0.0)
        for _ in range(5):
            x = rng.standard_normal(100)
            assert ent.ffu_en(x, p0) == pytest.approx(ent.fu_en(x, p0), abs=1e-9)

    def test_self_synchrony_is_plain(self, rng):
        for _ in range(5):
            x = rng.standard_normal(80)
            assert ent.c_fu_en(x, x, P, exclude_self=True) == pytest.approx(ent.fu_en(x, P), abs=1e-12)

    def test_measure_entropy_sum_identity(self, rng):
        for _ in range(5):
            total, local, global_ = ent.fu_me_en(rng.standard_normal(128), P)
            assert total == local + global_

    def test_depth_zero_hierarchy_is_plain(self, rng):
        p0 = ent.EntropyParams(k_depth=0)
        x = rng.standard_normal(64)
        assert ent.h_fu_en(x, p0) == pytest.approx(ent.fu_en(x, p0), abs=1e-12)

    def test_multiscale_is_composition(self, rng):
        x = rng.standard_normal(512)
        assert ent.mfu_en(x, P) == pytest.approx(ent.fu_en(ent.coarse_grain(x, P.tau), P), abs=1e-12)


class TestBaselineInvariance:
    @pytest.mark.parametrize("fn", [ent.fu_en, ent.afu_en, ent.fu_ap_en])
    def test_constant_offset_ignored(self, fn, rng):
        x = rng.standard_normal(96)
        assert fn(x + 1000.0, P) == pytest.approx(fn(x, P), abs=1e-10)

    def test_measure_entropy_offset_ignored(self, rng):
        x = rng.standard_normal(96)
        a = ent.fu_me_en(x, P)
        b = ent.fu_me_en(x + 1000.0, P)
        for u, v in zip(a, b):
            assert u == pytest.approx(v, abs=1e-10)

    def test_cross_entropy_offset_between_series(self, rng):
        x = rng.standard_normal(80)
        a = ent.c_fu_en(x, x + 500.0, P, exclude_self=True)
        b = ent.c_fu_en(x, x.copy(), P, exclude_self=True)
        assert a == pytest.approx(b, abs=1e-10)


def test_scaling_preserves_entropy_ranking(rng):
    signals = [rng.standard_normal(128) * s for s in (0.1, 1.0, 5.0, 40.0)] + [
        np.sin(np.arange(128) * 0.3),
        np.cumsum(rng.standard_normal(128)),
    ]
    base = [ent.fu_en(x, P) for x in signals]
    scaled = [ent.fu_en(3.7 * x, P) for x in signals]
    assert list(np.argsort(base)) == list(np.argsort(scaled))


class TestDegenerateInputs:
    def test_constant_series_flagged_zero(self):
        x = np.full(40, 2.5)
        for kernel_id in ent.ALL_KERNELS:
            res = ent.compute(kernel_id, x, ent.EntropyParams(k_seg=4))
            assert res.value == 0.0 and res.degenerate, kernel_id

    def test_no_nan_or_inf_ever(self, rng):
        nasty = [
            np.zeros(48),
            np.full(48, -7.0),
            np.concatenate([np.zeros(24), np.ones(24)]),
            np.repeat(rng.standard_normal(8), 6),
        ]
        for x in nasty:
            for kernel_id in ent.ALL_KERNELS:
                res = ent.compute(kernel_id, x, ent.EntropyParams(k_seg=4))
                assert np.isfinite(res.value), (kernel_id, x[:4])

    def test_mvm_equal_segments_degenerate(self):
        x = np.tile([1.0, 2.0, 3.0, 4.0], 8)
        res = ent.compute("mvm_fu_en", x, ent.EntropyParams(k_seg=8))
        assert res.degenerate and res.value == 0.0

    def test_mvm_scaled_halves_degenerate(self):
        # both segments have identical relative-energy profiles
        x = np.concatenate([np.tile([1.0, 2.0], 8), np.tile([2.0, 4.0], 8)])
        res = ent.compute("mvm_fu_en", x, ent.EntropyParams(k_seg=2))
        assert res.degenerate and res.value == 0.0

    def test_strictly_increasing_permutation_series(self):
        x = np.arange(48, dtype=float)
        res = ent.compute("fu_pe_en", x, P)
        assert res.value == 0.0 and res.degenerate


class TestErrors:
    def test_short_series(self):
        for kernel_id in ent.ALL_KERNELS:
            with pytest.raises(InsufficientDataError):
                ent.compute(kernel_id, np.array([1.0, 2.0, 3.0]), P)

    def test_alpha_domain(self, rng):
        x = rng.standard_normal(32)
        with pytest.raises(ParameterError):
            ent.ffu_en(x, ent.EntropyParams(alpha=1.5))

    def test_param_validation(self):
        with pytest.raises(ParameterError):
            ent.EntropyParams(m=0)
        with pytest.raises(ParameterError):
            ent.EntropyParams(r_frac=-0.1)
        with pytest.raises(ParameterError):
            ent.EntropyParams(pm=1)

    def test_unknown_kernel(self, rng):
        with pytest.raises(ParameterError):
            ent.compute("nope", rng.standard_normal(32), P)

    def test_non_finite_rejected(self):
        x = np.ones(32)
        x[3] = np.nan
        with pytest.raises(ParameterError):
            ent.fu_en(x, P)


class TestOrderingProperties:
    def test_noise_more_irregular_than_sine(self):
        t = np.arange(1024)
        sine = np.sin(2 * np.pi * 8 * t / 1024)
        fu_wins = ap_wins = 0
        for seed in range(20):
            noise = np.random.default_rng(100 + seed).standard_normal(1024)
            fu_wins += ent.fu_en(noise, P) > ent.fu_en(sine, P)
            ap_wins += ent.fu_ap_en(noise, P) > ent.fu_ap_en(sine, P)
        assert fu_wins == 20
        assert ap_wins == 20

    def test_mode_filtering_regularises(self):
        wins = 0
        for seed in range(20):
            r = np.random.default_rng(200 + seed)
            t = np.arange(512) / 256.0
            x = np.sin(2 * np.pi * 2 * t) + 0.4 * r.standard_normal(512)
            wins += ent.ifu_en(x, P) <= ent.mfu_en(x, P)
        assert wins >= 18

    def test_independent_pair_less_synchronous(self):
        wins = 0
        for seed in range(20):
            r = np.random.default_rng(300 + seed)
            a, b = r.standard_normal(128), r.standard_normal(128)
            wins += ent.c_fu_en(a, b, P) > ent.c_fu_en(a, a.copy(), P)
        assert wins == 20


class TestDistributionEntropyHelpers:
    def test_uniform_bins_max_entropy(self):
        values = np.array([0.1, 0.35, 0.6, 0.85])
        assert ent.epdf_entropy(values, 4) == pytest.approx(1.0, abs=1e-12)

    def test_single_bin_zero_entropy(self):
        values = np.full(50, 0.999)
        assert ent.epdf_entropy(values, 512) == 0.0


class TestRegistry:
    def test_ids_complete(self):
        assert len(ent.PRIMARY_KERNELS) == 13
        assert len(ent.ALL_KERNELS) == 15
        assert set(ent.ALL_KERNELS) == set(ent.REGISTRY)

    def test_compute_timed(self, rng):
        res = ent.compute("fu_en", rng.standard_normal(64), P, timed=True)
        assert res.elapsed is not None and res.elapsed >= 0.0
        assert res.entropy_id == "fu_en"

    def test_registry_cross_entropy_splits_halves(self, rng):
        x = rng.standard_normal(100)
        by_registry = ent.compute("c_fu_en", x, P).value
        direct = ent.c_fu_en(x[:50], x[50:], P)
        assert by_registry == direct
