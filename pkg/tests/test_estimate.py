import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsedemod import (
    HRVReport,
    NumericalError,
    PhaseSeries,
    RRSeries,
    ValidationError,
    bandpass,
    detect_heartbeats,
    estimate_rate_spectral,
    hrv_indices,
    relative_error_radial,
)
from pulsedemod.estimate import design_bandpass

from hrv_oracle import brute_hrv, random_rr


def tone(f, fs, dur, phase=0.0, amp=1.0):
    t = np.arange(int(round(fs * dur))) / fs
    return amp * np.sin(2 * np.pi * f * t + phase)


def rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


# --- bandpass ---------------------------------------------------------------

@pytest.mark.parametrize("phase", [0.0, 1.0])
def test_bandpass_passes_in_band_tone(phase):
    x = tone(0.25, 100, 120, phase)
    y = bandpass(PhaseSeries(100, x), 0.1, 0.5).values
    assert y.size == x.size
    assert rms(y) / rms(x) == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("phase", [0.0, 1.0, 2.2])
def test_bandpass_rejects_out_of_band_tone(phase):
    x = tone(1.2, 100, 120, phase)
    y = bandpass(PhaseSeries(100, x), 0.1, 0.5).values
    assert 20 * np.log10(rms(y) / rms(x)) <= -40


def test_bandpass_interior_unaffected_by_edges():
    fs = 100
    taps = design_bandpass(0.8, 1.7, fs)
    rng = np.random.default_rng(4)
    full = tone(0.3, fs, 200, 0.5, 4.0) + tone(1.25, fs, 200, 1.3, 0.3) + 0.1 * rng.standard_normal(20_000)
    ref = bandpass(PhaseSeries(fs, full), 0.8, 1.7).values
    cut = slice(5000, 15_000)
    part = bandpass(PhaseSeries(fs, full[cut]), 0.8, 1.7).values
    core = slice(2 * taps.size, 10_000 - 2 * taps.size)
    assert np.abs(part[core] - ref[cut][core]).max() < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_bandpass_edges_do_not_grow_on_noise(seed):
    x = np.random.default_rng(seed).standard_normal(3000)
    y = bandpass(PhaseSeries(50, x), 0.8, 1.7).values
    assert np.abs(y).max() < 5 * np.abs(x).max()


def test_bandpass_short_record_falls_back():
    x = tone(1.0, 20, 2.5)
    y = bandpass(PhaseSeries(20, x[:40]), 0.8, 1.7).values
    assert y.size == 40 and np.all(np.isfinite(y))


def test_bandpass_design_stopband():
    from scipy.signal import freqz
    taps = design_bandpass(0.8, 1.7, 500)
    _, h = freqz(taps, worN=[0.25, 0.5, 2.5, 5.0], fs=500)
    # forward-backward squares the magnitude response
    assert np.all(20 * np.log10(np.abs(h) ** 2) <= -40)


def test_bandpass_zero_in_zero_out():
    assert np.all(bandpass(PhaseSeries(50, np.zeros(3000)), 0.8, 1.7).values == 0)


@pytest.mark.parametrize("band", [(0.0, 1.0), (1.0, 0.5), (0.5, 50.0), (-1, 2)])
def test_bandpass_invalid_band(band):
    with pytest.raises(ValidationError):
        bandpass(PhaseSeries(100, np.zeros(1000)), *band)


# --- spectral rate ----------------------------------------------------------

def test_rate_single_tone():
    f = estimate_rate_spectral(PhaseSeries(100, tone(0.25, 100, 120)), (0.1, 0.7))
    assert f == pytest.approx(0.25, abs=1e-3)


def test_rate_off_bin_tone():
    # 0.2537 Hz sits between bins at 1/120 Hz resolution
    f = estimate_rate_spectral(PhaseSeries(100, tone(0.2537, 100, 120, 0.4)), (0.1, 0.7))
    assert f == pytest.approx(0.2537, abs=1e-3)


def test_rate_two_tones_heart_band():
    x = tone(0.25, 100, 120, amp=4.0) + tone(1.2, 100, 120, amp=0.3)
    assert estimate_rate_spectral(PhaseSeries(100, x), (0.8, 1.7)) == pytest.approx(1.2, abs=1e-2)


def test_rate_constant_has_no_peak():
    with pytest.raises(NumericalError, match="no peak"):
        estimate_rate_spectral(PhaseSeries(100, np.full(12_000, 3.0)), (0.1, 0.7))


def test_rate_record_too_short():
    with pytest.raises(ValidationError):
        estimate_rate_spectral(PhaseSeries(100, tone(0.25, 100, 10)), (0.2, 0.7))


@pytest.mark.parametrize("scale", [2.0 ** k for k in range(-20, 21, 5)])
def test_rate_power_of_two_scaling_bit_identical(scale):
    x = tone(1.13, 50, 60, 0.7) + 0.2 * tone(0.31, 50, 60)
    ref = estimate_rate_spectral(PhaseSeries(50, x), (0.8, 1.7))
    assert estimate_rate_spectral(PhaseSeries(50, scale * x), (0.8, 1.7)) == ref


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-6, 1e6))
def test_rate_amplitude_invariant(scale):
    x = tone(1.13, 50, 60, 0.7) + 0.2 * tone(0.31, 50, 60)
    ref = estimate_rate_spectral(PhaseSeries(50, x), (0.8, 1.7))
    assert estimate_rate_spectral(PhaseSeries(50, scale * x), (0.8, 1.7)) == pytest.approx(ref, rel=1e-12)


# --- beat detection ---------------------------------------------------------

def test_detect_one_hertz():
    fs = 100
    rr = detect_heartbeats(PhaseSeries(fs, tone(1.0, fs, 30)))
    assert len(rr) == 29
    assert np.all(np.abs(rr.intervals - 1000.0) <= 1000.0 / fs)


@pytest.mark.parametrize("fs", [100, 250, 500])
@pytest.mark.parametrize("f", [0.9, 1.2, 1.6])
def test_detect_mean_interval(f, fs):
    rr = detect_heartbeats(PhaseSeries(fs, tone(f, fs, 40, 0.3)))
    assert np.mean(rr.intervals) == pytest.approx(1000.0 / f, abs=1000.0 / fs)


def test_detect_1p2_hz():
    rr = detect_heartbeats(PhaseSeries(500, tone(1.2, 500, 30)))
    assert np.allclose(rr.intervals, 1000 / 1.2, atol=2.0)


def test_detect_zero_series():
    with pytest.raises(NumericalError, match="insufficient beats"):
        detect_heartbeats(PhaseSeries(100, np.zeros(3000)))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.85, 1.65), st.floats(-np.pi, np.pi), st.floats(30, 90))
def test_detect_after_bandpass_any_phase(f, phase, dur):
    fs = 200
    y = bandpass(PhaseSeries(fs, tone(f, fs, dur, phase, 0.3)), 0.8, 1.7)
    rr = detect_heartbeats(y)
    assert np.mean(rr.intervals) == pytest.approx(1000 / f, abs=1000 / fs)
    assert hrv_indices(rr).pnn50 == 0


def test_detect_refractory_suppresses_double_peaks():
    fs = 200
    x = tone(1.0, fs, 20) + 0.2 * tone(9.0, fs, 20)
    rr = detect_heartbeats(PhaseSeries(fs, x))
    assert np.all(rr.intervals >= 490)
    assert np.mean(rr.intervals) == pytest.approx(1000, abs=10)


# --- HRV --------------------------------------------------------------------

def test_hrv_constant():
    rep = hrv_indices(RRSeries([800, 800, 800]))
    assert rep == HRVReport(800.0, 0.0, 0.0, 0.0, 0.0)


def test_hrv_hand_example():
    rep = hrv_indices(RRSeries([800, 860, 865]))
    assert rep.pnn50 == 50.0
    assert rep.rmssd == pytest.approx(math.sqrt((3600 + 25) / 2), rel=1e-15)
    assert rep.rmssd == pytest.approx(42.5734, abs=1e-4)


def test_hrv_strict_fifty():
    assert hrv_indices(RRSeries([800, 850, 900, 950])).pnn50 == 0.0


def test_hrv_too_short():
    with pytest.raises(ValidationError):
        hrv_indices(RRSeries([800, 810]))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(3, 200))
def test_hrv_matches_oracle_and_bounds(seed, n):
    rr = random_rr(np.random.default_rng(seed), n)
    rep = hrv_indices(RRSeries(rr))
    expect = brute_hrv(rr)
    for key, value in expect.items():
        assert getattr(rep, key) == pytest.approx(value, rel=1e-12, abs=1e-12)
    assert 0 <= rep.pnn50 <= 100
    d = np.diff(rr)
    assert rep.rmssd ** 2 == pytest.approx(rep.sdsd ** 2 + np.mean(d) ** 2, rel=1e-9)


def test_relative_errors():
    ref = HRVReport(800, 50, 40, 40, 10)
    assert all(v == 0 for v in relative_error_radial(ref, ref).values())
    meas = HRVReport(800, 55, 40, 40, 10)
    assert relative_error_radial(ref, meas)["sdnn"] == pytest.approx(0.10)
    out = relative_error_radial(HRVReport(800, 50, 40, 40, 0), meas)
    assert out["pnn50"] is None
    assert set(out) == {"nnvgr", "sdnn", "rmssd", "sdsd", "pnn50"}
