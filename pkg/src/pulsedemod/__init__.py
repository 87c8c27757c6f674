"""Vital-signs phase demodulation for CW bioradar IQ data.

Three demodulators are provided: arctangent with unwrapping (``demod_ad``),
differentiate-and-cross-multiply (``demod_dacm``), and a recursive
cross-product accumulator (``demod_bert``) with linear-drift compensation.
"""

from .bench import compare_methods, rmse, time_method
from .compensate import estimate_rotation, remove_dc, rotate
from .demod import (
    bert_increment,
    compensate_drift,
    demod_ad,
    demod_bert,
    demod_bert_compensated,
    demod_dacm,
    demodulate,
    estimate_drift,
    phase_to_displacement,
    unwrap,
)
from .errors import NumericalError, ParseError, PulseDemodError, ValidationError
from .estimate import (
    bandpass,
    detect_heartbeats,
    estimate_rate_spectral,
    hrv_indices,
    relative_error_radial,
)
from .signal_model import (
    BenchReport,
    DisplacementSeries,
    DriftCorrection,
    HRVReport,
    IQSeries,
    MGMDiagnostics,
    MGMParams,
    PhaseSeries,
    RadarConfig,
    RRSeries,
    VSParams,
)
from .synth import (
    Impairments,
    displacement_to_iq,
    displacement_to_phase,
    mgm_diagnostics,
    mgm_propagate,
    synth_displacement,
)

__version__ = "0.1.0"
