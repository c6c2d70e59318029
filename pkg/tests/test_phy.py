"""Radio model unit tests: rate table, error curve, propagation, channel plan."""

import math

import pytest
from hypothesis import given, strategies as st

from wifislice.phy import (
    CHANNEL_WIDTHS_MHZ,
    MCS_MIN_SNR_DB,
    ChannelSpec,
    channel_overlap,
    channel_plan_highest,
    channel_plan_lowest,
    data_rate,
    noise_power_dbm,
    packet_error_rate,
    path_loss_db,
    sinr_db,
)

GI_VALUES_NS = (800, 1600, 3200)


# -- data rate ----------------------------------------------------------------


def test_data_rate_reference_points():
    # 234 subcarriers x 4 bit over a 14.4 us symbol.
    assert data_rate(20, 5, 1600) == pytest.approx(65e6, abs=1.0)
    assert data_rate(160, 5, 1600) == pytest.approx(544444444.4444444, rel=1e-12)
    assert data_rate(40, 0, 3200) == pytest.approx(14625000.0, rel=1e-12)
    assert data_rate(160, 11, 800) == pytest.approx(1200932352.9411764, rel=1e-12)
    assert data_rate(40, 4, 800) == pytest.approx(103235294.11764705, rel=1e-12)


def test_data_rate_monotone_in_mcs_and_width():
    for width in CHANNEL_WIDTHS_MHZ:
        for gi in GI_VALUES_NS:
            rates = [data_rate(width, m, gi) for m in range(12)]
            assert all(a < b for a, b in zip(rates, rates[1:]))
    for mcs in range(12):
        for gi in GI_VALUES_NS:
            rates = [data_rate(w, mcs, gi) for w in CHANNEL_WIDTHS_MHZ]
            assert all(a < b for a, b in zip(rates, rates[1:]))


def test_data_rate_decreases_with_longer_guard_interval():
    for width in CHANNEL_WIDTHS_MHZ:
        for mcs in range(12):
            assert (data_rate(width, mcs, 800) > data_rate(width, mcs, 1600)
                    > data_rate(width, mcs, 3200))


def test_data_rate_rejects_unknown_parameters():
    with pytest.raises((KeyError, ValueError, IndexError)):
        data_rate(30, 5, 1600)
    with pytest.raises((KeyError, ValueError, IndexError)):
        data_rate(20, 12, 1600)
    with pytest.raises((KeyError, ValueError, IndexError)):
        data_rate(20, 5, 400)


# -- packet error curve ---------------------------------------------------------


def test_error_rate_calibration_points():
    # The curve is anchored so the threshold SNR hits 1e-3 and the midpoint
    # sits 3 dB below it.
    for mcs in range(12):
        threshold = MCS_MIN_SNR_DB[mcs]
        assert packet_error_rate(threshold, mcs) == pytest.approx(1e-3, rel=1e-9)
        assert packet_error_rate(threshold - 3.0, mcs) == pytest.approx(0.5, rel=1e-12)
        assert packet_error_rate(threshold - 6.0, mcs) == pytest.approx(1 - 1e-3, rel=1e-9)


def test_error_rate_monotonicity():
    for mcs in range(12):
        snrs = [s * 0.5 for s in range(-20, 100)]
        pers = [packet_error_rate(s, mcs) for s in snrs]
        assert all(a >= b for a, b in zip(pers, pers[1:]))
        # Strictly decreasing wherever the curve is away from float saturation.
        assert all(a > b for a, b in zip(pers, pers[1:])
                   if 1e-12 < a < 1.0 - 1e-12)
        assert all(0.0 <= p <= 1.0 for p in pers)
    # A denser constellation needs more SNR, so at fixed SNR it loses more.
    for snr in (0.0, 10.0, 20.0, 30.0):
        pers = [packet_error_rate(snr, m) for m in range(12)]
        assert all(a <= b for a, b in zip(pers, pers[1:]))


@given(st.floats(min_value=-50, max_value=80), st.integers(min_value=0, max_value=11))
def test_error_rate_is_a_probability(snr, mcs):
    assert 0.0 <= packet_error_rate(snr, mcs) <= 1.0


# -- propagation ---------------------------------------------------------------


def test_path_loss_reference_distances():
    ap = (10.0, 5.0, 3.0)
    assert path_loss_db((10.0, 5.0, 3.0), ap, 0.0) == pytest.approx(46.4)
    # 10 m adds exactly 30 dB on the 1 m anchor.
    assert path_loss_db((10.0, 15.0, 3.0), ap, 0.0) == pytest.approx(76.4, rel=1e-12)
    # Distances under the 1 m anchor clamp to the anchor loss.
    assert path_loss_db((10.0, 5.4, 3.0), ap, 0.0) == pytest.approx(46.4)
    # Far room corner at receiver height.
    corner = path_loss_db((0.0, 0.0, 1.5), ap, 0.0)
    assert corner == pytest.approx(77.9699, abs=0.2)


def test_path_loss_applies_shadowing_additively():
    ap = (10.0, 5.0, 3.0)
    base = path_loss_db((2.0, 2.0, 1.5), ap, 0.0)
    assert path_loss_db((2.0, 2.0, 1.5), ap, 4.5) == pytest.approx(base + 4.5, rel=1e-12)
    assert path_loss_db((2.0, 2.0, 1.5), ap, -3.0) == pytest.approx(base - 3.0, rel=1e-12)


def test_noise_power_scales_with_bandwidth():
    assert noise_power_dbm(20) == pytest.approx(-93.98970004336019, rel=1e-12)
    assert noise_power_dbm(160) == pytest.approx(-84.95880017344075, rel=1e-12)
    # Doubling the bandwidth costs 10*log10(2) dB.
    for a, b in zip(CHANNEL_WIDTHS_MHZ, CHANNEL_WIDTHS_MHZ[1:]):
        assert noise_power_dbm(b) - noise_power_dbm(a) == pytest.approx(
            10 * math.log10(2), rel=1e-9)


# -- channel plan ----------------------------------------------------------------


def test_channel_plan_extremes():
    assert channel_plan_lowest(160).number == 50
    assert channel_plan_highest(160).number == 114
    assert channel_plan_lowest(80).number == 42
    assert channel_plan_highest(80).number == 155
    assert channel_plan_lowest(40).number == 38
    assert channel_plan_highest(40).number == 159
    assert channel_plan_lowest(20).number == 36
    assert channel_plan_highest(20).number == 165


def test_channel_center_frequency():
    assert ChannelSpec(36, 20).center_freq_mhz == pytest.approx(5180.0)
    assert ChannelSpec(50, 160).center_freq_mhz == pytest.approx(5250.0)
    assert ChannelSpec(100, 20).center_freq_mhz == pytest.approx(5500.0)


def test_channel_spec_rejects_invalid_pairs():
    with pytest.raises(ValueError):
        ChannelSpec(37, 20)
    with pytest.raises(ValueError):
        ChannelSpec(36, 160)


def test_channel_overlap_fractions():
    ch36 = ChannelSpec(36, 20)
    ch50 = ChannelSpec(50, 160)
    ch149 = ChannelSpec(149, 20)
    ch100 = ChannelSpec(100, 20)
    ch64 = ChannelSpec(64, 20)
    # Full self overlap; a narrow transmitter inside a wide receiver lands all
    # its power in band, the converse only the shared 20 MHz slice.
    assert channel_overlap(ch36, ch36) == pytest.approx(1.0)
    assert channel_overlap(ch36, ch50) == pytest.approx(1.0)
    assert channel_overlap(ch50, ch36) == pytest.approx(20.0 / 160.0)
    assert channel_overlap(ch36, ch149) == 0.0
    # Either side of the mid-band gap (5330 vs 5490 MHz).
    assert channel_overlap(ch64, ch100) == 0.0


def test_sinr_reduces_to_snr_without_interference():
    rx = -60.0
    assert sinr_db(rx, 20, []) == pytest.approx(rx - noise_power_dbm(20), rel=1e-12)
    # Zero-overlap interferers contribute nothing.
    assert sinr_db(rx, 20, [(-40.0, 0.0)]) == pytest.approx(
        rx - noise_power_dbm(20), rel=1e-12)


def test_sinr_accounts_for_interference_power():
    rx = -60.0
    clean = sinr_db(rx, 20, [])
    # An equal-power fully overlapping interferer dominates thermal noise.
    jammed = sinr_db(rx, 20, [(-60.0, 1.0)])
    assert jammed < clean
    assert jammed == pytest.approx(0.0, abs=0.01)
    # Interference scales with the overlap fraction.
    half = sinr_db(rx, 20, [(-60.0, 0.5)])
    assert jammed < half < clean
