"""Domain types for bioradar vital-signs processing.

All series types hold read-only float64 views and validate their
invariants on construction. Units are SI except RR intervals (ms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

SPEED_OF_LIGHT = 299_792_458.0  # m/s

MAX_DISPLACEMENT = 12e-3  # m, upper bound of chest-wall micromotion
MAX_HEART_FREQUENCY = 1.7  # Hz
MAX_BREATHING_FREQUENCY = 0.7  # Hz

RR_MIN_MS = 250.0
RR_MAX_MS = 3000.0


def _frozen_array(values, name):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{name} contains a non-finite value at index {bad}")
    arr = arr.view()
    arr.flags.writeable = False
    return arr


def _check_rate(sampling_rate):
    if not (math.isfinite(sampling_rate) and sampling_rate > 0):
        raise ValidationError(f"sampling_rate must be positive, got {sampling_rate!r}")


@dataclass(frozen=True)
class RadarConfig:
    """Carrier and geometry constants of a CW bioradar.

    Parameters
    ----------
    carrier_frequency : float
        Carrier frequency in Hz.
    path_phase : float
        Constant phase shift from the round-trip path, in radians.
    """

    carrier_frequency: float
    path_phase: float = 0.0
    wavelength: float = field(init=False)

    def __post_init__(self):
        fc = float(self.carrier_frequency)
        if not (math.isfinite(fc) and fc > 0):
            raise ValidationError(f"carrier_frequency must be positive, got {fc!r}")
        if not math.isfinite(self.path_phase):
            raise ValidationError("path_phase must be finite")
        object.__setattr__(self, "carrier_frequency", fc)
        object.__setattr__(self, "path_phase", float(self.path_phase))
        object.__setattr__(self, "wavelength", SPEED_OF_LIGHT / fc)


@dataclass(frozen=True)
class VSParams:
    """Sinusoidal breathing and heartbeat motion (amplitudes in m, rates in Hz)."""

    breathing_amplitude: float
    breathing_frequency: float
    heartbeat_amplitude: float
    heartbeat_frequency: float
    breathing_phase: float = 0.0
    heartbeat_phase: float = 0.0

    def __post_init__(self):
        for name in ("breathing_amplitude", "heartbeat_amplitude"):
            a = getattr(self, name)
            if not (0.0 <= a <= MAX_DISPLACEMENT):
                raise ValidationError(f"{name} must lie in [0, 12 mm], got {a!r} m")
        if self.breathing_amplitude + self.heartbeat_amplitude > MAX_DISPLACEMENT:
            raise ValidationError("combined peak displacement exceeds 12 mm")
        if not (0.0 < self.breathing_frequency < MAX_BREATHING_FREQUENCY):
            raise ValidationError(
                f"breathing_frequency must lie in (0, 0.7) Hz, got {self.breathing_frequency!r}")
        if not (0.0 < self.heartbeat_frequency < MAX_HEART_FREQUENCY):
            raise ValidationError(
                f"heartbeat_frequency must lie in (0, 1.7) Hz, got {self.heartbeat_frequency!r}")
        if not (math.isfinite(self.breathing_phase) and math.isfinite(self.heartbeat_phase)):
            raise ValidationError("phases must be finite")


@dataclass(frozen=True)
class IQSeries:
    """Uniformly sampled in-phase/quadrature pairs.

    ``i`` and ``q`` are stored as separate contiguous arrays so the
    demodulation kernels can operate on them without reshaping.
    """

    sampling_rate: float
    i: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        _check_rate(self.sampling_rate)
        i = _frozen_array(self.i, "i")
        q = _frozen_array(self.q, "q")
        if i.shape != q.shape:
            raise ValidationError(f"i and q lengths differ ({i.size} != {q.size})")
        object.__setattr__(self, "sampling_rate", float(self.sampling_rate))
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_complex(cls, sampling_rate, samples):
        samples = np.asarray(samples)
        return cls(sampling_rate, samples.real, samples.imag)

    def to_complex(self):
        return self.i + 1j * self.q

    def __len__(self):
        return self.i.size

    @property
    def duration(self):
        return len(self) / self.sampling_rate


@dataclass(frozen=True)
class PhaseSeries:
    """Demodulated phase in radians on a uniform time base."""

    sampling_rate: float
    values: np.ndarray

    def __post_init__(self):
        _check_rate(self.sampling_rate)
        object.__setattr__(self, "sampling_rate", float(self.sampling_rate))
        object.__setattr__(self, "values", _frozen_array(self.values, "phase"))

    def __len__(self):
        return self.values.size

    @property
    def times(self):
        return np.arange(len(self)) / self.sampling_rate


@dataclass(frozen=True)
class DisplacementSeries:
    """Chest-wall displacement in meters on a uniform time base."""

    sampling_rate: float
    values: np.ndarray

    def __post_init__(self):
        _check_rate(self.sampling_rate)
        object.__setattr__(self, "sampling_rate", float(self.sampling_rate))
        object.__setattr__(self, "values", _frozen_array(self.values, "displacement"))

    def __len__(self):
        return self.values.size

    @property
    def times(self):
        return np.arange(len(self)) / self.sampling_rate


@dataclass(frozen=True)
class MGMParams:
    """Markov-Gauss propagation parameters: per-sample decay ``beta``, scale ``sigma``."""

    beta: float
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValidationError(f"beta must be >= 0, got {self.beta!r}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValidationError(f"sigma must be >= 0, got {self.sigma!r}")


@dataclass(frozen=True)
class MGMDiagnostics:
    increment_mean: float
    increment_variance: float
    upsilon_low: float
    upsilon_high: float

    def __post_init__(self):
        if self.upsilon_low > self.upsilon_high:
            raise ValidationError("upsilon_low must not exceed upsilon_high")


@dataclass(frozen=True)
class DriftCorrection:
    """Drift angle ``delta`` (rad) fitted over samples ``window[0]:window[1]``."""

    delta: float
    window: tuple[int, int]

    def __post_init__(self):
        if not (math.isfinite(self.delta) and abs(self.delta) < math.pi / 2):
            raise ValidationError(f"|delta| must be < pi/2, got {self.delta!r}")
        start, stop = self.window
        if not (0 <= start < stop):
            raise ValidationError(f"invalid fit window {self.window!r}")
        object.__setattr__(self, "window", (int(start), int(stop)))


@dataclass(frozen=True)
class RRSeries:
    """Beat-to-beat intervals in milliseconds.

    The 250-3000 ms plausibility check (20-240 bpm) can be disabled with
    ``enforce_bounds=False``; positivity is always required.
    """

    intervals: np.ndarray
    enforce_bounds: bool = field(default=True, compare=False)

    def __post_init__(self):
        rr = _frozen_array(self.intervals, "intervals")
        if np.any(rr <= 0):
            raise ValidationError("RR intervals must be positive")
        if self.enforce_bounds and rr.size and (rr.min() < RR_MIN_MS or rr.max() > RR_MAX_MS):
            bad = int(np.flatnonzero((rr < RR_MIN_MS) | (rr > RR_MAX_MS))[0])
            raise ValidationError(
                f"RR interval {rr[bad]:.1f} ms at index {bad} outside "
                f"[{RR_MIN_MS:.0f}, {RR_MAX_MS:.0f}] ms")
        object.__setattr__(self, "intervals", rr)

    def __len__(self):
        return self.intervals.size


HRV_FIELDS = ("nnvgr", "sdnn", "rmssd", "sdsd", "pnn50")


@dataclass(frozen=True)
class HRVReport:
    """Time-domain HRV indices; ``nnvgr`` is the mean RR interval."""

    nnvgr: float
    sdnn: float
    rmssd: float
    sdsd: float
    pnn50: float

    def __post_init__(self):
        for name in HRV_FIELDS:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be finite and >= 0, got {v!r}")
        if self.pnn50 > 100:
            raise ValidationError(f"pnn50 must be <= 100, got {self.pnn50!r}")

    def as_dict(self):
        return {name: float(getattr(self, name)) for name in HRV_FIELDS}


@dataclass(frozen=True)
class BenchReport:
    """Wall-clock timings of one demodulator on one input.

    ``output`` keeps the phase produced by the last timed repetition so the
    caller can score it; it is not part of the serialized report.
    """

    method_name: str
    samples_processed: int
    wall_times: tuple[float, ...]
    rmse_vs_truth: float | None = None
    output: PhaseSeries | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        times = tuple(float(t) for t in self.wall_times)
        if not times or any(not (t > 0) for t in times):
            raise ValidationError("wall_times must be non-empty and positive")
        if self.samples_processed < 2:
            raise ValidationError("samples_processed must be >= 2")
        object.__setattr__(self, "wall_times", times)

    @property
    def median(self):
        return float(np.median(self.wall_times))

    @property
    def minimum(self):
        return min(self.wall_times)

    @property
    def mean(self):
        return float(np.mean(self.wall_times))
