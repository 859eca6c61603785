import numpy as np
import pytest

from eegfuzz import tqwt
from eegfuzz.errors import ParameterError, ShapeError

DEFAULT = tqwt.TqwtParams(q=1.0, r=3.0, levels=8)


class TestParams:
    def test_derived_factors(self):
        assert DEFAULT.gamma == pytest.approx(1.0)
        assert DEFAULT.xi == pytest.approx(2.0 / 3.0)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            tqwt.TqwtParams(q=1.0, r=1.0, levels=8)  # redundancy must exceed 1
        with pytest.raises(ParameterError):
            tqwt.TqwtParams(q=0.5, r=3.0, levels=8)
        with pytest.raises(ParameterError):
            tqwt.TqwtParams(q=1.0, r=3.0, levels=0)

    def test_max_levels(self):
        assert DEFAULT.max_levels(868) == 11
        assert DEFAULT.max_levels(16) == 1


class TestFilters:
    def test_band_edges(self):
        h0, h1 = tqwt.analysis_filters(DEFAULT, [0.0, np.pi])
        assert h0[0] == pytest.approx(1.0)
        assert h1[0] == pytest.approx(0.0, abs=1e-30)
        assert h0[1] == pytest.approx(0.0, abs=1e-30)
        assert h1[1] == pytest.approx(1.0)

    def test_stop_band_point(self):
        # xi*pi = (2/3)*pi < 0.9*pi, so 0.9*pi is past the low-pass stop edge
        h0, h1 = tqwt.analysis_filters(DEFAULT, [0.9 * np.pi])
        assert h0[0] == 0.0
        assert h1[0] == 1.0

    def test_responses_bounded(self):
        grid = np.linspace(0, np.pi, 1001)
        for q, r in ((1.0, 3.0), (2.0, 3.0), (1.5, 2.0)):
            h0, h1 = tqwt.analysis_filters(tqwt.TqwtParams(q=q, r=r, levels=3), grid)
            assert np.all((h0 >= 0) & (h0 <= 1))
            assert np.all((h1 >= 0) & (h1 <= 1))

    def test_power_complementary_in_transition(self):
        grid = np.linspace(0, np.pi, 513)
        h0, h1 = tqwt.analysis_filters(tqwt.TqwtParams(q=2.0, r=3.0, levels=3), grid)
        assert np.max(np.abs(h0**2 + h1**2 - 1.0)) < 1e-12

    def test_grid_domain_checked(self):
        with pytest.raises(ParameterError):
            tqwt.analysis_filters(DEFAULT, [-0.1])


class TestDecompose:
    def test_band_count(self, rng):
        for n in (256, 500, 868, 1024):
            sb = tqwt.decompose(rng.standard_normal(n), DEFAULT)
            assert len(sb.bands) == 9

    def test_roundtrip_impulse_j1(self):
        x = np.zeros(64)
        x[10] = 1.0
        sb = tqwt.decompose(x, tqwt.TqwtParams(q=1.0, r=3.0, levels=1))
        assert len(sb.bands) == 2
        err = np.linalg.norm(tqwt.synthesize(sb) - x)
        assert err <= 1e-10

    def test_levels_beyond_max(self):
        with pytest.raises(ParameterError):
            tqwt.decompose(np.arange(16.0), tqwt.TqwtParams(q=1.0, r=3.0, levels=20))

    def test_zero_frame(self):
        sb = tqwt.decompose(np.zeros(256), DEFAULT)
        out = tqwt.synthesize(sb)
        assert np.allclose(out, 0.0, atol=1e-14)

    def test_odd_length(self, rng):
        x = rng.standard_normal(867)
        sb = tqwt.decompose(x, DEFAULT)
        out = tqwt.synthesize(sb)
        assert out.size == 867
        assert np.linalg.norm(out - x) / np.linalg.norm(x) <= 1e-9


class TestRoundtrip:
    @pytest.mark.parametrize("n", [256, 868, 1024])
    def test_noise(self, n, rng):
        for _ in range(10):
            x = rng.standard_normal(n)
            err = np.linalg.norm(tqwt.synthesize(tqwt.decompose(x, DEFAULT)) - x)
            assert err / np.linalg.norm(x) <= 1e-9

    def test_sine(self):
        t = np.arange(868)
        x = np.sin(2 * np.pi * 11 * t / 868)
        err = np.linalg.norm(tqwt.synthesize(tqwt.decompose(x, DEFAULT)) - x)
        assert err / np.linalg.norm(x) <= 1e-9

    def test_other_parameter_sets(self, rng):
        x = rng.standard_normal(512)
        for q, r, j in ((2.0, 3.0, 6), (1.0, 2.0, 5), (3.0, 4.0, 4)):
            params = tqwt.TqwtParams(q=q, r=r, levels=j)
            sb = tqwt.decompose(x, params)
            assert len(sb.bands) == j + 1
            err = np.linalg.norm(tqwt.synthesize(sb) - x) / np.linalg.norm(x)
            assert err <= 1e-9, (q, r, j)


class TestLinearity:
    def test_bandwise(self, rng):
        x = rng.standard_normal(868)
        y = rng.standard_normal(868)
        a, b = 2.3, -0.7
        mixed = tqwt.decompose(a * x + b * y, DEFAULT)
        sx = tqwt.decompose(x, DEFAULT)
        sy = tqwt.decompose(y, DEFAULT)
        for bm, bx, by in zip(mixed.bands, sx.bands, sy.bands):
            assert np.max(np.abs(bm - (a * bx + b * by))) < 1e-10


class TestSynthesizeValidation:
    def test_band_count_mismatch(self, rng):
        sb = tqwt.decompose(rng.standard_normal(256), DEFAULT)
        sb.bands = sb.bands[:-1]
        with pytest.raises(ShapeError):
            tqwt.synthesize(sb)

    def test_band_length_mismatch(self, rng):
        sb = tqwt.decompose(rng.standard_normal(256), DEFAULT)
        sb.bands[3] = sb.bands[3][:-2]
        with pytest.raises(ShapeError):
            tqwt.synthesize(sb)


def test_subband_csv_export(tmp_path, rng):
    sb = tqwt.decompose(rng.standard_normal(256), DEFAULT)
    path = tmp_path / "bands.csv"
    tqwt.write_subbands_csv(sb, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 1 + 9
    assert lines[0].startswith("q,1.0,r,3.0,levels,8")
    first_band = lines[1].split(",")
    assert first_band[0] == "band1"
    assert len(first_band) - 1 == sb.bands[0].size
