"""Phase demodulators (arctangent, DACM, recursive BERT) and drift handling.

All three demodulators return phase in radians on the input's time base.
BERT and DACM compute the same cross-product increment, but DACM forms it
from explicit sample differences in a separate stage before integrating,
whereas BERT evaluates the cross product of neighbouring samples and adds
it to the running phase in one pass (a JIT-compiled loop when numba is
installed).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import least_squares

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised via the numpy fallback tests
    njit = None

from .errors import NumericalError, ValidationError
from .signal_model import DisplacementSeries, DriftCorrection, IQSeries, PhaseSeries, RadarConfig

# |c|^2 below this is treated as a zero-magnitude sample
MIN_POWER = 1e-24


def _require_length(iq, n=2):
    if len(iq) < n:
        raise ValidationError(f"demodulation needs at least {n} samples, got {len(iq)}")


def _check_power(power, offset, what):
    if power.min() < MIN_POWER:
        idx = int(np.flatnonzero(power < MIN_POWER)[0]) + offset
        raise NumericalError(f"undefined {what}: zero-magnitude sample", index=idx)


def unwrap(phase: PhaseSeries, period: float = 2 * np.pi) -> PhaseSeries:
    """Remove jumps larger than half a period between successive samples."""
    if not period > 0:
        raise ValidationError(f"period must be > 0, got {period!r}")
    return PhaseSeries(phase.sampling_rate, np.unwrap(phase.values, period=period))


def demod_ad(iq: IQSeries, use_two_argument_arctangent: bool = True) -> PhaseSeries:
    """Arctangent demodulation followed by unwrapping.

    With ``use_two_argument_arctangent=False`` the phase is ``arctan(q/i)``,
    which only resolves angles modulo pi, and is unwrapped with period pi.
    """
    _require_length(iq)
    i, q = iq.i, iq.q
    _check_power(i * i + q * q, 0, "phase")
    if use_two_argument_arctangent:
        wrapped, period = np.arctan2(q, i), 2 * np.pi
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            wrapped, period = np.arctan(q / i), np.pi
    return PhaseSeries(iq.sampling_rate, np.unwrap(wrapped, period=period))


def demod_dacm(iq: IQSeries) -> PhaseSeries:
    """Differentiate-and-cross-multiply demodulation.

    ``phi[n] = phi[n-1] + (I[n]*dQ[n] - Q[n]*dI[n]) / (I[n]**2 + Q[n]**2)``
    with forward differences ``dI``, ``dQ``; ``phi[0]`` from ``atan2``.
    """
    _require_length(iq)
    i, q = iq.i, iq.q
    i0, q0 = float(i[0]), float(q[0])
    if i0 * i0 + q0 * q0 < MIN_POWER:
        raise NumericalError("undefined phase: zero-magnitude sample", index=0)
    di = np.diff(i)
    dq = np.diff(q)
    i1, q1 = i[1:], q[1:]
    power = i1 ** 2 + q1 ** 2
    _check_power(power, 1, "phase")
    rate = (i1 * dq - q1 * di) / power
    out = np.empty(len(iq))
    out[0] = math.atan2(q0, i0)
    out[1:] = rate
    return PhaseSeries(iq.sampling_rate, np.cumsum(out))


def bert_increment(prev, cur) -> float:
    """Single-step increment ``(Q[n]*I[n-1] - I[n]*Q[n-1]) / (I[n]**2 + Q[n]**2)``.

    On the unit circle this equals ``sin(phi[n] - phi[n-1])``.
    """
    ip, qp = prev
    ic, qc = cur
    power = ic * ic + qc * qc
    if power < MIN_POWER:
        raise NumericalError("undefined increment: zero-magnitude sample")
    return (qc * ip - ic * qp) / power


def _initial_phase(i0, q0):
    # single-argument arctangent; i0 == 0 takes the limiting value
    if i0 == 0.0:
        return math.copysign(math.pi / 2, q0)
    return math.atan(q0 / i0)


def _bert_accumulate(i, q, phi0, out):
    """Fill ``out`` with the recursion; return the first bad index or -1."""
    phi = phi0
    out[0] = phi
    ip = i[0]
    qp = q[0]
    for n in range(1, i.size):
        ic = i[n]
        qc = q[n]
        power = ic * ic + qc * qc
        if power < MIN_POWER:
            return n
        phi += (qc * ip - ic * qp) / power
        out[n] = phi
        ip = ic
        qp = qc
    return -1


_bert_kernel = njit(cache=True, nogil=True)(_bert_accumulate) if njit is not None else None


def _bert_numpy(i, q, phi0, out):
    inc = out[1:]
    power = np.multiply(i[1:], i[1:])
    scratch = np.multiply(q[1:], q[1:])
    power += scratch
    if power.min() < MIN_POWER:
        return int(np.flatnonzero(power < MIN_POWER)[0]) + 1
    np.multiply(q[1:], i[:-1], out=inc)
    np.multiply(i[1:], q[:-1], out=scratch)
    inc -= scratch
    inc /= power
    out[0] = phi0
    np.cumsum(out, out=out)
    return -1


def demod_bert(iq: IQSeries) -> PhaseSeries:
    """Recursive BERT demodulation.

    ``phi[0] = arctan(Q[0]/I[0])`` and ``phi[n] = phi[n-1] + M[n-1]`` with
    ``M`` from :func:`bert_increment`. One pass over the samples with
    constant work each; no trigonometric function is evaluated past the
    first sample.
    """
    _require_length(iq)
    i, q = iq.i, iq.q
    i0, q0 = float(i[0]), float(q[0])
    if i0 * i0 + q0 * q0 < MIN_POWER:
        raise NumericalError("undefined increment: zero-magnitude sample", index=0)
    out = np.empty(i.size)
    kernel = _bert_kernel if _bert_kernel is not None else _bert_numpy
    bad = kernel(i, q, _initial_phase(i0, q0), out)
    if bad >= 0:
        raise NumericalError("undefined increment: zero-magnitude sample", index=bad)
    return PhaseSeries(iq.sampling_rate, out)


def _tone_design(n, freqs):
    cols = [np.ones_like(n), n]
    for w in freqs:
        cols.append(np.cos(w * n))
        cols.append(np.sin(w * n))
    return np.column_stack(cols)


def _tone_residual(phi, n, freqs):
    a = _tone_design(n, freqs)
    coef, *_ = np.linalg.lstsq(a, phi, rcond=None)
    return phi - a @ coef, coef


def _fit_slope(phi, tones, max_points=20000):
    """Least-squares slope of ``phi`` against its sample index.

    With ``tones > 0`` the strongest oscillations are modelled as nuisance
    sinusoids alongside the line, so a periodic signal that does not fill
    a whole number of cycles in a symmetric way no longer biases the slope.
    Tone frequencies are picked from a Hann-windowed spectrum and refined
    jointly by nonlinear least squares on a strided subsample.
    """
    n = np.arange(phi.size, dtype=np.float64)
    line = np.polyfit(n, phi, 1)
    if tones == 0:
        return float(line[0])
    stride = max(1, phi.size // max_points)
    ns, ps = n[::stride], phi[::stride]
    m = ps.size
    resid = ps - np.polyval(line, ns)
    floor = 1e-12 * max(1.0, float(np.abs(ps).max()))
    pad = 8 * m
    step = 2 * np.pi / pad
    # ignore components slower than ~1.5 cycles per window; they alias onto the line
    min_bin = int(math.ceil(1.5 * pad / m))
    window = np.hanning(m)
    freqs = []
    for _ in range(tones):
        if np.sqrt(np.mean(resid ** 2)) <= floor:
            break
        spec = np.abs(np.fft.rfft(resid * window, pad))
        spec[:min_bin] = 0.0
        k = int(np.argmax(spec))
        if spec[k] == 0.0 or k >= spec.size - 1:
            break
        freqs.append(k * step / stride)
        resid, _ = _tone_residual(ps, ns, freqs)
    if not freqs:
        return float(line[0])
    w0 = np.asarray(freqs)
    fit = least_squares(lambda w: _tone_residual(ps, ns, w)[0], w0,
                        x_scale=step / stride, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=200)
    w = fit.x if np.all(np.abs(fit.x - w0) < 4 * step / stride) else w0
    _, coef = _tone_residual(phi, n, list(w))
    return float(coef[1])


def estimate_drift(phase: PhaseSeries, window: tuple[int, int] | None = None,
                   tones: int = 2) -> DriftCorrection:
    """Estimate the linear drift angle of a phase trajectory.

    The slope (rad per sample) of a straight-line fit over ``window`` is
    turned into an angle in axes where one sample and one radian have equal
    length, ``delta = atan(slope)``. ``tones=0`` gives the plain ordinary
    least-squares line; the default also models the two strongest
    oscillations (see ``_fit_slope``).
    """
    if len(phase) < 10:
        raise ValidationError("estimate_drift needs at least 10 samples")
    start, stop = window if window is not None else (0, len(phase))
    stop = min(stop, len(phase))
    if stop - start < 10:
        raise ValidationError(f"fit window {window!r} holds fewer than 10 samples")
    slope = _fit_slope(phase.values[start:stop], tones)
    return DriftCorrection(math.atan(slope), (start, stop))


def compensate_drift(phase: PhaseSeries, corr: DriftCorrection) -> PhaseSeries:
    """Rotate the trajectory ``(n, phi[n])`` by ``-delta`` about its first point.

    ``phi'[n] = (phi[n] - phi[0]) * cos(delta) - n * sin(delta) + phi[0]``;
    a line of slope ``tan(delta)`` becomes constant.
    """
    phi = phase.values
    if corr.delta == 0.0:
        return phase
    phi0 = phi[0]
    c, s = math.cos(corr.delta), math.sin(corr.delta)
    out = (phi - phi0) * c
    out -= s * np.arange(phi.size)
    out += phi0
    return PhaseSeries(phase.sampling_rate, out)


def demod_bert_compensated(iq: IQSeries, window=None, tones: int = 2) -> PhaseSeries:
    """BERT followed by drift estimation and compensation (the BERT-C output)."""
    phase = demod_bert(iq)
    return compensate_drift(phase, estimate_drift(phase, window=window, tones=tones))


def phase_to_displacement(phase: PhaseSeries, cfg: RadarConfig) -> DisplacementSeries:
    return DisplacementSeries(phase.sampling_rate, phase.values * (cfg.wavelength / (4 * np.pi)))


METHODS = {
    "ad": demod_ad,
    "dacm": demod_dacm,
    "bert": demod_bert,
    "bert-c": demod_bert_compensated,
}


def demodulate(iq: IQSeries, method: str) -> PhaseSeries:
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValidationError(
            f"unknown method {method!r}; expected one of {', '.join(METHODS)}") from None
    return fn(iq)
