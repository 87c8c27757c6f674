"""File formats: IQ as CSV or interleaved float32, phase/truth CSV,
reference RR lists, and the JSON report layout."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .signal_model import HRV_FIELDS, IQSeries, PhaseSeries, RRSeries

DEFAULT_CARRIER = 24e9  # Hz
UNIFORM_TOLERANCE = 1e-6  # relative spread of time steps


@dataclass(frozen=True)
class RecordMetadata:
    sampling_rate: float
    carrier_frequency: float = DEFAULT_CARRIER
    channel_labels: tuple[str, ...] = ("i", "q")
    source_note: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.sampling_rate) and self.sampling_rate > 0):
            raise ValidationError(f"sampling_rate must be positive, got {self.sampling_rate!r}")
        if not (math.isfinite(self.carrier_frequency) and self.carrier_frequency > 0):
            raise ValidationError(
                f"carrier_frequency must be positive, got {self.carrier_frequency!r}")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def read_sidecar(path) -> dict:
    path = Path(path)
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ParseError(f"sidecar {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"sidecar {path}: {exc.msg}", line=exc.lineno) from None
    if not isinstance(meta, dict):
        raise ParseError(f"sidecar {path} must hold a JSON object")
    return meta


def write_sidecar(path, n, sampling_rate, carrier_frequency):
    meta = {"n": int(n), "fs_hz": float(sampling_rate), "fc_hz": float(carrier_frequency)}
    Path(path).write_text(json.dumps(meta) + "\n", encoding="utf-8")


def _read_table(path, allowed_headers):
    """Parse a headed numeric CSV into a dict of float64 columns."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"{path} not found") from None
    lines = text.splitlines()
    if not lines:
        raise ParseError(f"{path} is empty", line=1)
    header = tuple(h.strip() for h in lines[0].split(","))
    if header not in allowed_headers:
        expected = " or ".join(",".join(h) for h in allowed_headers)
        raise ParseError(f"header must be {expected}, got {lines[0]!r}", line=1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(cells)}", line=lineno)
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"non-numeric cell in {line!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError(f"non-finite value in {line!r}", line=lineno)
        rows.append(row)
    data = np.array(rows, dtype=np.float64).reshape(-1, len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def _rate_from_times(t):
    dt = np.diff(t)
    step = float(np.mean(dt))
    if not step > 0:
        raise ParseError("timestamps must increase")
    bad = np.flatnonzero(np.abs(dt - step) > UNIFORM_TOLERANCE * step)
    if bad.size:
        # +3: one for the header, one for 1-based lines, one for the later sample
        raise ParseError("non-uniform timestamps", line=int(bad[0]) + 3)
    return 1.0 / step


def _resolve_rates(path, derived_fs, sampling_rate, carrier_frequency):
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = read_sidecar(side)
    fs = derived_fs or sampling_rate or meta.get("fs_hz")
    fc = carrier_frequency or meta.get("fc_hz") or DEFAULT_CARRIER
    if fs is None:
        raise ParseError(f"{path}: sampling rate unknown (no t column, sidecar or flag)")
    return float(fs), float(fc)


def read_iq_csv(path, sampling_rate=None, carrier_frequency=None):
    """Read ``t,i,q`` or ``i,q`` CSV into ``(IQSeries, RecordMetadata)``.

    With a ``t`` column the sampling rate is derived from the (uniform)
    timestamps; otherwise it comes from ``sampling_rate`` or the
    ``<path>.json`` sidecar.
    """
    cols = _read_table(path, [("t", "i", "q"), ("i", "q")])
    if cols["i"].size < 2:
        raise ParseError(f"{path}: need at least 2 samples, got {cols['i'].size}")
    derived = _rate_from_times(cols["t"]) if "t" in cols else None
    fs, fc = _resolve_rates(path, derived, sampling_rate, carrier_frequency)
    meta = RecordMetadata(fs, fc, ("i", "q"), f"csv:{Path(path).name}")
    return IQSeries(fs, cols["i"], cols["q"]), meta


def write_iq_csv(path, iq: IQSeries, carrier_frequency=DEFAULT_CARRIER, with_time=True):
    if with_time:
        table = np.column_stack([np.arange(len(iq)) / iq.sampling_rate, iq.i, iq.q])
        header = "t,i,q"
    else:
        table = np.column_stack([iq.i, iq.q])
        header = "i,q"
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.17g")
    write_sidecar(sidecar_path(path), len(iq), iq.sampling_rate, carrier_frequency)


def read_iq_binary(path, sidecar=None):
    """Read interleaved little-endian float32 I,Q described by a JSON sidecar."""
    path = Path(path)
    meta = read_sidecar(sidecar or sidecar_path(path))
    try:
        n = int(meta["n"])
        fs = float(meta["fs_hz"])
        fc = float(meta.get("fc_hz", DEFAULT_CARRIER))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"sidecar lacks a valid field: {exc}") from None
    layout = meta.get("layout", "interleaved_f32le")
    if layout != "interleaved_f32le":
        raise ParseError(f"unsupported layout {layout!r}")
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise ParseError(f"{path} not found") from None
    if len(raw) % 8:
        raise ParseError(f"{path}: truncated file ({len(raw)} bytes is not a whole number of I,Q pairs)")
    if len(raw) // 8 != n:
        raise ParseError(f"{path}: size mismatch, sidecar declares {n} samples, file holds {len(raw) // 8}")
    if n < 2:
        raise ParseError(f"{path}: need at least 2 samples")
    data = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise ParseError(f"{path}: non-finite sample")
    meta_out = RecordMetadata(fs, fc, ("i", "q"), f"f32le:{path.name}")
    return IQSeries(fs, data[0::2], data[1::2]), meta_out


def write_iq_binary(path, iq: IQSeries, carrier_frequency=DEFAULT_CARRIER, sidecar=None):
    inter = np.empty(2 * len(iq), dtype="<f4")
    inter[0::2] = iq.i
    inter[1::2] = iq.q
    Path(path).write_bytes(inter.tobytes())
    write_sidecar(sidecar or sidecar_path(path), len(iq), iq.sampling_rate, carrier_frequency)


def read_iq(path, sampling_rate=None, carrier_frequency=None):
    """Dispatch on extension: ``.bin``/``.f32`` binary, anything else CSV."""
    if Path(path).suffix.lower() in (".bin", ".f32"):
        return read_iq_binary(path)
    return read_iq_csv(path, sampling_rate, carrier_frequency)


def write_iq(path, iq, carrier_frequency=DEFAULT_CARRIER):
    if Path(path).suffix.lower() in (".bin", ".f32"):
        write_iq_binary(path, iq, carrier_frequency)
    else:
        write_iq_csv(path, iq, carrier_frequency)


def write_phase_csv(path, phase: PhaseSeries):
    table = np.column_stack([phase.times, phase.values])
    np.savetxt(path, table, delimiter=",", header="t,phase_rad", comments="", fmt="%.17g")


def read_phase_csv(path) -> PhaseSeries:
    """Read ``t,phase_rad`` (demod output) or ``t,x_m,phase_rad`` (synth truth)."""
    cols = _read_table(path, [("t", "phase_rad"), ("t", "x_m", "phase_rad")])
    if cols["t"].size < 2:
        raise ParseError(f"{path}: need at least 2 samples")
    return PhaseSeries(_rate_from_times(cols["t"]), cols["phase_rad"])


def write_truth_csv(path, x, phase):
    table = np.column_stack([phase.times, x.values, phase.values])
    np.savetxt(path, table, delimiter=",", header="t,x_m,phase_rad", comments="", fmt="%.17g")


def read_reference_rr(path, mode="interval", enforce_bounds=True) -> RRSeries:
    """One value per line: RR intervals in ms (``interval``) or beat times in s (``timestamp``)."""
    if mode not in ("interval", "timestamp"):
        raise ValidationError(f"mode must be 'interval' or 'timestamp', got {mode!r}")
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise ParseError(f"{path} not found") from None
    values = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ParseError(f"non-numeric value {line!r}", line=lineno) from None
    values = np.asarray(values, dtype=np.float64)
    if mode == "timestamp":
        d = np.diff(values)
        if np.any(d <= 0):
            raise ParseError("non-monotonic timestamps", line=int(np.flatnonzero(d <= 0)[0]) + 2)
        values = d * 1000.0
    return RRSeries(values, enforce_bounds=enforce_bounds)


_HRV_SCHEMA = {
    "type": "object",
    "properties": {name: {"type": "number", "minimum": 0} for name in HRV_FIELDS},
    "required": list(HRV_FIELDS),
    "additionalProperties": False,
}

_NUM_OR_UNDEFINED = {"anyOf": [{"type": "number", "minimum": 0}, {"const": "undefined"}]}

REPORT_SCHEMAS = {
    "estimate": {
        "type": "object",
        "properties": {"br_hz": {"type": "number"}, "hr_hz": {"type": "number"}},
        "required": ["br_hz", "hr_hz"],
        "additionalProperties": False,
    },
    "hrv": {
        "type": "object",
        "properties": {
            "hrv": _HRV_SCHEMA,
            "hrv_relative_error": {
                "type": "object",
                "properties": {name: _NUM_OR_UNDEFINED for name in HRV_FIELDS},
                "required": list(HRV_FIELDS),
                "additionalProperties": False,
            },
        },
        "required": ["hrv"],
        "additionalProperties": False,
    },
    "bench": {
        "type": "object",
        "properties": {
            "reports": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "method": {"type": "string"},
                        "n": {"type": "integer", "minimum": 2},
                        "times_s": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                                    "minItems": 1},
                        "rmse_rad": {"type": ["number", "null"]},
                    },
                    "required": ["method", "n", "times_s", "rmse_rad"],
                    "additionalProperties": False,
                },
            },
        },
        "required": ["reports"],
        "additionalProperties": False,
    },
}


def bench_to_json(report) -> dict:
    return {"reports": [
        {"method": r.method_name, "n": r.samples_processed, "times_s": list(r.wall_times),
         "rmse_rad": r.rmse_vs_truth}
        for r in report
    ]}


def hrv_to_json(hrv, relative=None) -> dict:
    out = {"hrv": hrv.as_dict()}
    if relative is not None:
        out["hrv_relative_error"] = {
            k: ("undefined" if v is None else float(v)) for k, v in relative.items()}
    return out
