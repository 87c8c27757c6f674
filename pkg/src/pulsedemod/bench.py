"""Accuracy and wall-clock comparison of the demodulators."""

from __future__ import annotations

import gc
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .demod import METHODS
from .errors import ValidationError
from .signal_model import BenchReport, IQSeries, PhaseSeries

# speedups of BERT over AD and DACM reported for the clinical recordings
REPORTED_SPEEDUP_VS_AD = 19.0
REPORTED_SPEEDUP_VS_DACM = 46.0


def rmse(a, b) -> float:
    """Root-mean-square difference of two equal-length series."""
    a = getattr(a, "values", a)
    b = getattr(b, "values", b)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValidationError("rmse of empty series")
    d = a - b
    return float(np.sqrt(np.mean(d * d)))


def align_to_truth(estimate: PhaseSeries, truth: PhaseSeries) -> np.ndarray:
    """Shift ``estimate`` by the multiple of pi closest to its mean offset.

    Arctangent-seeded demodulators recover phase only up to their branch
    ambiguity (pi or 2*pi); any finer offset is left in as error.
    """
    k = round(float(np.mean(estimate.values - truth.values)) / math.pi)
    return estimate.values - k * math.pi


def time_method(method_id: str, iq: IQSeries, repetitions: int = 7, warmup: int = 1) -> BenchReport:
    """Run one demodulator ``warmup + repetitions`` times on the same input.

    Only the timed repetitions enter ``wall_times`` (monotonic
    ``perf_counter``); the garbage collector is paused while timing.
    """
    if repetitions < 3:
        raise ValidationError("repetitions must be >= 3")
    if warmup < 1:
        raise ValidationError("warmup must be >= 1")
    try:
        fn = METHODS[method_id]
    except KeyError:
        raise ValidationError(
            f"unknown method {method_id!r}; expected one of {', '.join(METHODS)}") from None
    for _ in range(warmup):
        fn(iq)
    times = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repetitions):
            t0 = time.perf_counter()
            out = fn(iq)
            times.append(time.perf_counter() - t0)
    finally:
        if gc_was_enabled:
            gc.enable()
    return BenchReport(method_id, len(iq), tuple(times), output=out)


@dataclass(frozen=True)
class ComparisonReport:
    reports: tuple[BenchReport, ...] = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    def by_method(self, name):
        return next(r for r in self.reports if r.method_name == name)

    def speedup(self, baseline, method="bert"):
        """Median-time ratio ``baseline / method``."""
        return self.by_method(baseline).median / self.by_method(method).median


def compare_methods(iq: IQSeries, truth: PhaseSeries | None, methods, repetitions: int = 7,
                    warmup: int = 1) -> ComparisonReport:
    """Time each method in turn and score its output against ``truth``.

    ``"bert"`` is the raw recursion (drifting, BERT-D); ``"bert-c"`` adds
    drift compensation, which is then part of its timed region.
    """
    if truth is not None and len(truth) != len(iq):
        raise ValidationError(f"truth length {len(truth)} != IQ length {len(iq)}")
    reports = []
    for m in methods:
        rep = time_method(m, iq, repetitions, warmup)
        if truth is not None:
            err = rmse(align_to_truth(rep.output, truth), truth.values)
            rep = BenchReport(rep.method_name, rep.samples_processed, rep.wall_times,
                              rmse_vs_truth=err, output=rep.output)
        reports.append(rep)
    return ComparisonReport(tuple(reports))
