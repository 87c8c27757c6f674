"""IQ compensation: DC offset removal and path-phase rotation."""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError, ValidationError
from .signal_model import IQSeries

MIN_ARC = 0.1  # rad


def rotate(iq: IQSeries, theta: float) -> IQSeries:
    """Apply ``[[cos t, sin t], [-sin t, cos t]]`` to every sample."""
    c, s = math.cos(theta), math.sin(theta)
    return IQSeries(iq.sampling_rate, c * iq.i + s * iq.q, c * iq.q - s * iq.i)


def _arc_span(angles):
    a = np.sort(np.mod(angles, 2 * np.pi))
    gaps = np.diff(np.concatenate([a, [a[0] + 2 * np.pi]]))
    return 2 * np.pi - gaps.max()


def remove_dc(iq: IQSeries) -> tuple[IQSeries, tuple[float, float]]:
    """Subtract the center of an algebraic (Kasa) least-squares circle fit.

    Solves ``i**2 + q**2 = a*i + b*q + c`` for ``(a, b, c)``; the center is
    ``(a/2, b/2)``. Raises ``NumericalError`` when the constellation is too
    short an arc (< 0.1 rad about the fitted center) to pin the circle down.
    """
    if len(iq) < 10:
        raise ValidationError("remove_dc needs at least 10 samples")
    i, q = iq.i, iq.q
    # center the data first so the normal equations stay well conditioned
    mi, mq = float(np.mean(i)), float(np.mean(q))
    u, v = i - mi, q - mq
    design = np.column_stack([u, v, np.ones_like(u)])
    rhs = u * u + v * v
    scale = np.abs(design).max(axis=0)
    scale[scale == 0] = 1.0
    coef, _, rank, sv = np.linalg.lstsq(design / scale, rhs, rcond=None)
    if rank < 3 or sv[-1] <= 1e-10 * sv[0]:
        raise NumericalError("insufficient arc: circle fit matrix is singular")
    coef = coef / scale
    cu, cv = coef[0] / 2, coef[1] / 2
    center = (cu + mi, cv + mq)
    span = _arc_span(np.arctan2(v - cv, u - cu))
    if span < MIN_ARC:
        raise NumericalError(f"insufficient arc: constellation spans {span:.3g} rad")
    out = IQSeries(iq.sampling_rate, i - center[0], q - center[1])
    return out, (float(center[0]), float(center[1]))


def estimate_rotation(iq: IQSeries) -> float:
    """Circular mean angle of the (DC-free) samples."""
    mag = np.hypot(iq.i, iq.q)
    keep = mag > 0
    if not np.any(keep):
        raise NumericalError("ambiguous rotation: all samples are zero")
    ci = float(np.mean(iq.i[keep] / mag[keep]))
    cq = float(np.mean(iq.q[keep] / mag[keep]))
    if math.hypot(ci, cq) < 1e-9:
        raise NumericalError("ambiguous rotation: mean resultant vector is zero")
    return math.atan2(cq, ci)
