"""Synthetic ground truth: cardiorespiratory displacement, radar IQ, and
Markov-Gauss phase trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import ValidationError
from .signal_model import (
    DisplacementSeries,
    IQSeries,
    MGMDiagnostics,
    MGMParams,
    PhaseSeries,
    RadarConfig,
    VSParams,
)


@dataclass(frozen=True)
class Impairments:
    """Receiver non-idealities added on top of the ideal IQ circle."""

    noise_sigma: float = 0.0
    amplitude: float = 1.0
    dc_i: float = 0.0
    dc_q: float = 0.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValidationError(f"amplitude must be > 0, got {self.amplitude!r}")
        if not self.noise_sigma >= 0:
            raise ValidationError(f"noise_sigma must be >= 0, got {self.noise_sigma!r}")


def synth_displacement(params: VSParams, sampling_rate: float, duration: float) -> DisplacementSeries:
    """Sum of a breathing and a heartbeat sinusoid sampled at ``sampling_rate``."""
    n = round(duration * sampling_rate)
    if n < 2:
        raise ValidationError("duration * sampling_rate must be >= 2")
    t = np.arange(n) / sampling_rate
    x = (params.breathing_amplitude
         * np.sin(2 * np.pi * params.breathing_frequency * t + params.breathing_phase)
         + params.heartbeat_amplitude
         * np.sin(2 * np.pi * params.heartbeat_frequency * t + params.heartbeat_phase))
    return DisplacementSeries(sampling_rate, x)


def displacement_to_phase(x: DisplacementSeries, cfg: RadarConfig) -> PhaseSeries:
    """Ideal phase 4*pi*x/lambda, excluding the path phase."""
    return PhaseSeries(x.sampling_rate, (4 * np.pi / cfg.wavelength) * x.values)


def displacement_to_iq(x: DisplacementSeries, cfg: RadarConfig,
                       impairments: Impairments | None = None, seed=None) -> IQSeries:
    """Map displacement onto the CW radar baseband circle.

    Noise is drawn independently for I and Q from ``np.random.default_rng(seed)``,
    with the I draws taken first.
    """
    imp = impairments or Impairments()
    angle = cfg.path_phase + (4 * np.pi / cfg.wavelength) * x.values
    i = imp.amplitude * np.cos(angle) + imp.dc_i
    q = imp.amplitude * np.sin(angle) + imp.dc_q
    if imp.noise_sigma > 0:
        rng = np.random.default_rng(seed)
        i = i + rng.normal(0.0, imp.noise_sigma, i.size)
        q = q + rng.normal(0.0, imp.noise_sigma, q.size)
    return IQSeries(x.sampling_rate, i, q)


def mgm_propagate(phi0: float, p: MGMParams, step_gap: int = 1, count: int = 2,
                  sampling_rate: float = 1.0) -> PhaseSeries:
    """Propagate a Markov-Gauss phase chain.

    Returns ``count`` states spaced ``step_gap`` samples apart, starting at
    ``phi0``. Each transition is::

        phi_next = phi * exp(-beta*g) + G * sqrt(sigma**2 / (2*beta) * (1 - exp(-2*beta*g**2)))

    with ``G`` standard normal. At ``beta == 0`` the limit ``phi + sigma*g*G``
    is used directly; for ``g == 1`` this is a plain random walk whose
    states equal ``phi0`` followed by the running sum of ``sigma*G``.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    if step_gap < 1:
        raise ValidationError("step_gap must be >= 1")
    rng = np.random.default_rng(p.seed)
    draws = rng.standard_normal(count - 1)
    g = float(step_gap)
    if p.beta == 0:
        steps = np.empty(count)
        steps[0] = phi0
        steps[1:] = (p.sigma * g) * draws
        return PhaseSeries(sampling_rate, np.cumsum(steps))
    decay = math.exp(-p.beta * g)
    # squared gap in the innovation term, as in the model definition
    scale = math.sqrt(p.sigma ** 2 / (2 * p.beta) * -math.expm1(-2 * p.beta * g * g))
    values = np.empty(count)
    values[0] = phi0
    if count > 1:
        values[1:], _ = lfilter([1.0], [1.0, -decay], scale * draws, zi=[decay * phi0])
    return PhaseSeries(sampling_rate, values)


def mgm_diagnostics(phase: PhaseSeries) -> MGMDiagnostics:
    """Increment moments and the moving variance-shift range 0.5 +/- 2*E[phi]."""
    phi = phase.values
    if phi.size < 3:
        raise ValidationError("mgm_diagnostics needs at least 3 samples")
    inc = np.diff(phi)
    spread = 2 * abs(float(np.mean(phi)))
    return MGMDiagnostics(
        increment_mean=float(np.mean(inc)),
        increment_variance=float(np.var(inc)),
        upsilon_low=0.5 - spread,
        upsilon_high=0.5 + spread,
    )
