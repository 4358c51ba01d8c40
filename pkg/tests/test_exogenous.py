import math

import numpy as np
import pytest

from osnsim.errors import BadConfig, SeriesTooShort
from osnsim.exogenous import (
    ShockConfig,
    ShockSeries,
    build_exogenous_network,
    butterworth_response,
    detect_shocks,
    highpass_filter,
    load_shock_csv,
    read_masks,
    rolling_zscore,
    write_masks,
)
from osnsim.ingestion import BinarySeries

from oracles import butterworth_squared


def _series(values, source="s1"):
    return ShockSeries(source, np.asarray(values, dtype=float), 3600, 0)


def test_butterworth_cutoff_is_half_power():
    for order in (1, 2, 3, 4):
        for kind in ("low", "high"):
            assert butterworth_response(0.1, 0.1, order, kind) == pytest.approx(0.5)


def test_butterworth_lowpass_dc_limit():
    assert butterworth_response(1e-9, 0.1, 2, "low") == pytest.approx(1.0)


def test_butterworth_order2_double_frequency():
    assert butterworth_response(0.2, 0.1, 2, "low") == pytest.approx(1.0 / 17.0)


def test_butterworth_matches_formula_oracle():
    for freq in (0.01, 0.05, 0.1, 0.25, 0.5):
        for order in (1, 2, 3):
            for kind in ("low", "high"):
                assert butterworth_response(freq, 0.1, order, kind) == pytest.approx(
                    butterworth_squared(freq, 0.1, order, kind), abs=1e-15)


def test_butterworth_bad_config():
    with pytest.raises(BadConfig):
        butterworth_response(0.6, 0.1, 2, "low")
    with pytest.raises(BadConfig):
        butterworth_response(0.1, 0.1, 0, "low")
    with pytest.raises(BadConfig):
        butterworth_response(0.1, 0.1, 2, "band")


def test_constant_series_all_zero_mask():
    mask = detect_shocks(_series([5.0] * 64))
    assert mask.bits.sum() == 0


def test_low_frequency_sinusoid_all_zero_mask():
    # period 500 ticks against cutoff 0.1 (period 10): heavily attenuated,
    # and what remains is smooth enough that no rolling z reaches 3
    t = np.arange(2048)
    mask = detect_shocks(_series(10.0 + 3.0 * np.sin(2 * np.pi * t / 500.0)))
    assert mask.bits.sum() == 0


def test_impulse_localized():
    cfg = ShockConfig()
    values = np.full(512, 2.0)
    values[250] += 8.0
    mask = detect_shocks(_series(values), cfg)
    hits = np.flatnonzero(mask.bits)
    assert hits.size >= 1
    # support confined to a window of 3 * order ticks around the impulse
    assert np.all(np.abs(hits - 250) <= 3 * cfg.order)


def test_impulse_translation_covariance():
    cfg = ShockConfig()
    base = np.full(512, 2.0)
    masks = []
    for shift in (200, 230):
        values = base.copy()
        values[shift] += 8.0
        masks.append(np.flatnonzero(detect_shocks(_series(values), cfg).bits))
    assert np.array_equal(masks[0] + 30, masks[1])


def test_filter_magnitude_at_cutoff_within_tolerance():
    # acceptance-style: pure tone at f_c comes out at -3.01 dB +/- 0.3 dB
    n = 4096
    for order in (1, 2, 3, 4):
        k = round(0.1 * n)  # tone on an exact rfft bin at the cutoff
        tone = np.sin(2 * np.pi * k * np.arange(n) / n)
        filtered = highpass_filter(tone, 0.1, order)
        ratio = np.abs(np.fft.rfft(filtered))[k] / np.abs(np.fft.rfft(tone))[k]
        db = 20 * math.log10(ratio)
        assert abs(db - (-3.0103)) < 0.3


def test_rolling_zscore_edges_and_constants():
    z = rolling_zscore(np.ones(10), 4)
    assert np.all(z == 0.0)
    z = rolling_zscore(np.array([1.0, 1.0, 1.0, 9.0]), 4)
    assert z[-1] > 1.5


def test_detect_shocks_errors():
    with pytest.raises(SeriesTooShort):
        detect_shocks(_series([1.0, 2.0, 3.0]))
    with pytest.raises(BadConfig):
        detect_shocks(_series([1.0] * 32), ShockConfig(cutoff_frac=0.7))
    with pytest.raises(BadConfig):
        detect_shocks(_series([np.nan] * 32))


def _mask(bits, source="s1"):
    return BinarySeries(source, np.asarray(bits, dtype=np.uint8), 3600, 0)


def test_exogenous_network_all_zero_mask_no_edges():
    rng = np.random.default_rng(0)
    user = _mask(rng.integers(0, 2, 50), "u1")
    net = build_exogenous_network([_mask([0] * 50)], [user])
    assert net.edges == []


def test_exogenous_network_copy_edge():
    rng = np.random.default_rng(1)
    shock_bits = rng.integers(0, 2, 400)
    user_bits = np.roll(shock_bits, 1)
    user_bits[0] = 0
    net = build_exogenous_network(
        [_mask(shock_bits, "shock")], [_mask(user_bits, "u1")], nte_threshold=0.5)
    assert [(e.source, e.target) for e in net.edges] == [("shock", "u1")]


def test_exogenous_network_two_shocks_one_correlated():
    rng = np.random.default_rng(2)
    s1 = rng.integers(0, 2, 400)
    s2 = rng.integers(0, 2, 400)
    user = np.roll(s1, 1)
    user[0] = 0
    net = build_exogenous_network(
        [_mask(s1, "s1"), _mask(s2, "s2")], [_mask(user, "u1")], nte_threshold=0.5)
    assert [(e.source, e.target) for e in net.edges] == [("s1", "u1")]


def test_shock_csv_and_mask_roundtrip(tmp_path):
    csv = tmp_path / "price.csv"
    csv.write_text("ts,value\n0,1.0\n3600,2.0\n10800,4.0\n")
    series = load_shock_csv(csv, source="price")
    # gap at tick 2 forward-filled from tick 1
    assert list(series.values) == [1.0, 2.0, 2.0, 4.0]

    mask_path = tmp_path / "masks.jsonl"
    write_masks(mask_path, [_mask([0, 1, 0, 1], "price")])
    loaded = read_masks(mask_path, 4)
    assert list(loaded["price"].bits) == [0, 1, 0, 1]
