import math

import numpy as np
import pytest

from ofdm_relay.channel import (SUI3, PathLossModel, SuiTapProfile, draw_frames, draw_taps,
                                frame_rng, hop_scale, path_loss_db, read_channel_csv,
                                realize_network, subcarrier_frequencies, taps_to_subcarriers,
                                write_channel_csv)
from ofdm_relay.config import NetworkConfig

A_REF = 20 * math.log10(4 * math.pi * 100 / (2.998e8 / 1.9e9))


class TestPathLoss:
    def test_reference_distance(self):
        assert path_loss_db(PathLossModel(), 100.0) == pytest.approx(A_REF)
        assert A_REF == pytest.approx(78.0, abs=0.05)

    def test_exponent(self):
        assert PathLossModel().alpha == pytest.approx(4 - 0.0065 * 30 + 17.1 / 30)
        assert PathLossModel().alpha == pytest.approx(4.375)

    def test_one_decade(self):
        assert path_loss_db(PathLossModel(), 1000.0) == pytest.approx(A_REF + 43.75)

    def test_literal_form(self):
        assert path_loss_db(PathLossModel(literal=True), 1000.0) == pytest.approx(A_REF + 4.375)

    def test_override(self):
        assert path_loss_db(PathLossModel(alpha_override=2.5), 1000.0) == pytest.approx(A_REF + 25)

    def test_clamp_below_reference(self):
        with pytest.warns(UserWarning):
            assert path_loss_db(PathLossModel(), 50.0) == pytest.approx(A_REF)


class TestTaps:
    def test_profile(self):
        np.testing.assert_allclose(SUI3.tap_powers.sum(), 1.0)
        np.testing.assert_allclose(SUI3.tap_powers[1] / SUI3.tap_powers[0], 10 ** -0.5)
        assert SUI3.derived_rms_delay_spread_us() == pytest.approx(0.26, abs=0.01)

    @pytest.mark.parametrize("kwargs", [dict(tap_delays_us=(0.1, 0.4), tap_powers_db=(0, -5)),
                                        dict(tap_delays_us=(0, 0.4), tap_powers_db=(0,)),
                                        dict(rician_k_first_tap=-1.0)])
    def test_profile_validation(self, kwargs):
        with pytest.raises(ValueError):
            SuiTapProfile(**kwargs)

    def test_mean_tap_powers(self):
        taps = draw_taps(SUI3, np.random.default_rng(1), size=1_000_000)
        np.testing.assert_allclose((np.abs(taps) ** 2).mean(axis=0), SUI3.tap_powers, rtol=0.01)

    def test_pure_line_of_sight(self):
        prof = SuiTapProfile(rician_k_first_tap=math.inf)
        taps = draw_taps(prof, np.random.default_rng(2), size=1000)
        np.testing.assert_allclose(np.abs(taps[:, 0]), math.sqrt(prof.tap_powers[0]))

    def test_no_line_of_sight(self):
        prof = SuiTapProfile(rician_k_first_tap=0.0)
        power = np.abs(draw_taps(prof, np.random.default_rng(3), size=400_000)[:, 0]) ** 2
        p1 = prof.tap_powers[0]
        assert power.mean() == pytest.approx(p1, rel=0.01)
        # exponential power: second moment is twice the squared mean
        assert (power**2).mean() == pytest.approx(2 * p1**2, rel=0.02)

    def test_rician_first_tap_spread(self):
        power = np.abs(draw_taps(SUI3, np.random.default_rng(4), size=400_000)[:, 0]) ** 2
        p1 = SUI3.tap_powers[0]
        # K = 1: E|h|^4 = (2 - (K/(K+1))^2) P^2 = 1.75 P^2
        assert (power**2).mean() == pytest.approx(1.75 * p1**2, rel=0.02)


class TestSubcarriers:
    def test_centered_grid(self):
        np.testing.assert_allclose(subcarrier_frequencies(4, 4e6), [-1.5e6, -0.5e6, 0.5e6, 1.5e6])

    def test_flat(self):
        np.testing.assert_allclose(taps_to_subcarriers(np.array([1.0 + 0j]), [0.0], 16, 1e6),
                                   np.ones(16))

    def test_destructive_interference(self):
        g = taps_to_subcarriers(np.array([1.0, 1.0 + 0j]), [0.0, 1.0], 4, 4e6)
        assert g[2] == pytest.approx(0.0, abs=1e-20)
        assert g[1] == pytest.approx(0.0, abs=1e-20)
        assert np.all(g <= 4 + 1e-12)

    def test_mean_gain_is_total_power(self):
        taps = draw_taps(SUI3, np.random.default_rng(5), size=100_000)
        g = taps_to_subcarriers(taps, SUI3.tap_delays_us, 16, 1e6)
        np.testing.assert_allclose(g.mean(axis=0), 1.0, rtol=0.01)
        assert g.mean() == pytest.approx(1.0, rel=0.01)


class TestNetwork:
    def test_flat_single_hop(self):
        cfg = NetworkConfig(n_hops=1)
        prof = SuiTapProfile(tap_delays_us=(0.0,), tap_powers_db=(0.0,),
                             rician_k_first_tap=math.inf)
        ch = realize_network(cfg, np.random.default_rng(0), profile=prof)
        expected = 10 ** (-(A_REF + 43.75) / 10) / 10 ** 0.82
        np.testing.assert_allclose(ch.gains, expected, rtol=1e-9)

    def test_halving_distance(self):
        pl = PathLossModel()
        ratio = hop_scale(NetworkConfig(n_hops=4), pl) / hop_scale(NetworkConfig(n_hops=2), pl)
        assert 10 * math.log10(ratio) == pytest.approx(10 * 4.375 * math.log10(2))
        assert 10 * math.log10(ratio) == pytest.approx(13.17, abs=0.01)

    def test_determinism(self):
        cfg = NetworkConfig(n_frames=5)
        a = realize_network(cfg, frame_rng(9, 3), frame_index=3)
        b = realize_network(cfg, frame_rng(9, 3), frame_index=3)
        np.testing.assert_array_equal(a.gains, b.gains)
        np.testing.assert_array_equal(draw_frames(cfg, 9)[3], a.gains)
        np.testing.assert_array_equal(draw_frames(cfg, 9, 2, start=3)[0], a.gains)
        assert not np.array_equal(draw_frames(cfg, 10)[3], a.gains)

    def test_positive_and_uncorrelated_hops(self):
        cfg = NetworkConfig(n_hops=3, n_frames=10_000)
        f = draw_frames(cfg, 0)
        assert np.all(f > 0) and np.all(np.isfinite(f))
        h = f[:, :, 0]
        r = np.corrcoef(h.T)
        assert np.all(np.abs(r[np.triu_indices(3, 1)]) < 0.02)

    def test_csv_round_trip(self, tmp_path):
        f = draw_frames(NetworkConfig(n_hops=2, n_subcarriers=3), 1, 4)
        path = tmp_path / "ch.csv"
        write_channel_csv(path, f)
        back = read_channel_csv(path)
        assert [c.frame_index for c in back] == [0, 1, 2, 3]
        np.testing.assert_array_equal(np.stack([c.gains for c in back]), f)
