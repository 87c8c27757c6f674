"""Breathing/heart rate, beat detection and time-domain HRV indices."""

from __future__ import annotations

import math

import numpy as np
from scipy import signal
from scipy.ndimage import uniform_filter1d

from .errors import NumericalError, ValidationError
from .signal_model import HRV_FIELDS, HRVReport, PhaseSeries, RRSeries

BREATHING_BAND = (0.1, 0.7)  # Hz
HEART_BAND = (0.8, 1.7)  # Hz

STOPBAND_DB = 50.0  # per pass; the forward-backward response doubles it
RMS_WINDOW_S = 5.0
THRESHOLD_FRACTION = 0.3
REFRACTORY_S = 1.0 / (1.7 * 1.2)
PREDICTOR_ORDER = 16  # edge extension for the bandpass


def _check_band(low, high, fs):
    if not (0 < low < high < fs / 2):
        raise ValidationError(
            f"band [{low}, {high}] Hz invalid for sampling rate {fs} Hz "
            f"(need 0 < low < high < {fs / 2})")


def design_bandpass(low, high, fs, stopband_db=STOPBAND_DB):
    """Kaiser-windowed sinc bandpass; transition width is bounded by the
    distance of each edge to DC/Nyquist and by half the band width."""
    _check_band(low, high, fs)
    nyq = fs / 2
    width = min(low, nyq - high, (high - low) / 2)
    numtaps, beta = signal.kaiserord(stopband_db, width / nyq)
    numtaps |= 1  # odd length: type I, no forced zero at Nyquist
    return signal.firwin(numtaps, [low, high], window=("kaiser", beta),
                         pass_zero=False, fs=fs)


def _predict_forward(x, count, order=PREDICTOR_ORDER):
    """Continue ``x`` by ``count`` samples with a least-squares linear predictor.

    The predictor is fitted on the last stretch of ``x`` (at least
    ``count`` samples); roots outside the unit circle are reflected inside
    so the continuation cannot grow.
    """
    seg = x[-min(x.size, max(4 * order, count)):]
    rows = np.lib.stride_tricks.sliding_window_view(seg, order)[:-1]
    coef, *_ = np.linalg.lstsq(rows, seg[order:], rcond=None)
    den = np.concatenate(([1.0], -coef[::-1]))
    roots = np.roots(den)
    outside = np.abs(roots) > 1
    if outside.any():
        roots[outside] = 1 / np.conj(roots[outside])
        den = np.real(np.poly(roots))
    zi = signal.lfiltic([1.0], den, seg[::-1][:order])
    out, _ = signal.lfilter([1.0], den, np.zeros(count), zi=zi)
    return out


def bandpass(series: PhaseSeries, low: float, high: float) -> PhaseSeries:
    """Zero-phase FIR bandpass (forward pass, then the time-reversed pass).

    Both ends are extended by one filter length with a linear-prediction
    continuation, which keeps oscillations phase-continuous across the
    boundary and so suppresses start-up ringing. Records too short to fit
    the predictor fall back to mirror reflection.
    """
    fs = series.sampling_rate
    taps = design_bandpass(low, high, fs)
    x = series.values
    pad = min(taps.size, x.size - 1)
    if x.size >= 4 * PREDICTOR_ORDER:
        ext = np.concatenate((_predict_forward(x[::-1], taps.size)[::-1], x,
                              _predict_forward(x, taps.size)))
        pad = taps.size
    elif pad > 0:
        ext = np.pad(x, pad, mode="reflect")
    else:
        ext = x
    half = taps.size // 2
    y = signal.oaconvolve(ext, taps)[half:half + ext.size]
    y = signal.oaconvolve(y[::-1], taps)[half:half + ext.size][::-1]
    return PhaseSeries(fs, y[pad:pad + x.size])


def estimate_rate_spectral(series: PhaseSeries, band=HEART_BAND) -> float:
    """Dominant in-band frequency in Hz.

    Mean-removed, Hann-tapered DFT magnitude; the peak bin is refined by a
    parabola through it and its two neighbours.
    """
    low, high = band
    fs = series.sampling_rate
    _check_band(low, high, fs)
    x = series.values
    if len(x) / fs < 3 / low:
        raise ValidationError(
            f"record of {len(x) / fs:.3g} s is shorter than 3 periods of {low} Hz")
    x = x - np.mean(x)
    spec = np.abs(np.fft.rfft(x * np.hanning(x.size)))
    freqs = np.fft.rfftfreq(x.size, 1 / fs)
    idx = np.flatnonzero((freqs >= low) & (freqs <= high))
    if idx.size == 0 or not np.any(spec[idx] > 0):
        raise NumericalError(f"no peak in [{low}, {high}] Hz")
    k = int(idx[np.argmax(spec[idx])])
    offset = 0.0
    if 0 < k < spec.size - 1:
        a, b, c = spec[k - 1], spec[k], spec[k + 1]
        denom = a - 2 * b + c
        if denom < 0:
            offset = 0.5 * (a - c) / denom
    return float((k + offset) * fs / x.size)


def _rolling_rms(x, n):
    return np.sqrt(uniform_filter1d(x * x, size=max(1, n), mode="reflect"))


def detect_heartbeats(series: PhaseSeries, enforce_bounds: bool = True) -> RRSeries:
    """RR intervals from local maxima of a heart-band signal.

    A peak must exceed 0.3x the centred 5 s rolling RMS and be at least
    1/(1.7*1.2) s from the previous accepted peak. Peak times are refined
    to sub-sample resolution with a three-point parabola.
    """
    fs = series.sampling_rate
    x = series.values
    threshold = THRESHOLD_FRACTION * _rolling_rms(x, int(round(RMS_WINDOW_S * fs)))
    distance = max(1, int(math.ceil(REFRACTORY_S * fs)))
    peaks, _ = signal.find_peaks(x, height=threshold, distance=distance)
    peaks = peaks[x[peaks] > 0]
    if peaks.size < 3:
        raise NumericalError(f"insufficient beats: {peaks.size} peaks detected")
    a, b, c = x[peaks - 1], x[peaks], x[peaks + 1]
    denom = a - 2 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(denom < 0, 0.5 * (a - c) / denom, 0.0)
    times = (peaks + offset) / fs
    return RRSeries(np.diff(times) * 1000.0, enforce_bounds=enforce_bounds)


def hrv_indices(rr: RRSeries) -> HRVReport:
    """Mean RR, SDNN, RMSSD, SDSD (population moments) and pNN50 (strict > 50 ms)."""
    x = rr.intervals
    if x.size < 3:
        raise ValidationError("hrv_indices needs at least 3 RR intervals")
    d = np.diff(x)
    return HRVReport(
        nnvgr=float(np.mean(x)),
        sdnn=float(np.std(x)),
        rmssd=float(np.sqrt(np.mean(d * d))),
        sdsd=float(np.std(d)),
        pnn50=100.0 * np.count_nonzero(np.abs(d) > 50.0) / d.size,
    )


def relative_error_radial(reference: HRVReport, measured: HRVReport) -> dict[str, float | None]:
    """``|measured - reference| / reference`` per index; ``None`` where the reference is 0."""
    out = {}
    for name in HRV_FIELDS:
        ref = getattr(reference, name)
        out[name] = None if ref == 0 else abs(getattr(measured, name) - ref) / ref
    return out
