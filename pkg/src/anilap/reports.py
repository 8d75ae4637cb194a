"""Structured experiment reports and their on-disk form.

A report carries the experiment name, the parameters it ran with, the
measured quantities (each with an uncertainty and the tolerance it is
judged against), reference bounds or exponents, free-form diagnostic
details, data curves, and a verdict.  Emission writes one JSON report,
one CSV per curve, and a manifest; wall-clock time goes to a sidecar
file so two runs of the same config and seed produce byte-identical
reports.
"""

import hashlib
import platform
from dataclasses import dataclass, field

from .errors import AnilapError

__all__ = [
    "Measurement",
    "Curve",
    "ExperimentReport",
    "emit_report",
    "format_float",
    "dump_json",
]

VERDICTS = ("pass", "flag", "fail", "error")


def format_float(x):
    """Decimal text with 17 significant digits (round-trips binary64)."""
    v = float(x)
    if v != v:
        return "nan"
    if v in (float("inf"), float("-inf")):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _dump(obj, out, indent):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            if not isinstance(key, str):
                raise AnilapError("report keys must be strings, got %r" % (key,))
            out.append('%s  "%s": ' % (pad, key))
            _dump(val, out, indent + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, val in enumerate(seq):
            out.append(pad + "  ")
            _dump(val, out, indent + 1)
            out.append(",\n" if i + 1 < len(seq) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        # JSON has no inf/nan literals; quote the rare non-finite value
        text = format_float(obj)
        out.append(text if text[-1].isdigit() else '"%s"' % text)
    elif isinstance(obj, str):
        out.append('"%s"' % obj.replace("\\", "\\\\").replace('"', '\\"'))
    else:
        try:
            out.append(format_float(float(obj)))
        except (TypeError, ValueError):
            raise AnilapError("cannot serialize %r" % (obj,))


def dump_json(obj):
    """Deterministic JSON text: insertion order, 17-digit floats, LF ends."""
    out = []
    _dump(obj, out, 0)
    return "".join(out) + "\n"


@dataclass(frozen=True)
class Measurement:
    """A single measured quantity with its uncertainty and tolerance."""

    value: float
    uncertainty: float = 0.0
    tolerance: float = 0.0
    target: float = None

    def as_dict(self):
        d = {
            "value": float(self.value),
            "uncertainty": float(self.uncertainty),
            "tolerance": float(self.tolerance),
        }
        if self.target is not None:
            d["target"] = float(self.target)
        return d


@dataclass(frozen=True)
class Curve:
    """A sampled curve; rows are (parameter, value, uncertainty) triples."""

    name: str
    parameter: str
    rows: tuple

    def csv_text(self):
        lines = ["parameter,value,uncertainty"]
        for row in self.rows:
            p, v = row[0], row[1]
            u = row[2] if len(row) > 2 else 0.0
            lines.append(",".join(format_float(x) for x in (p, v, u)))
        return "\n".join(lines) + "\n"


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict
    measurements: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    curves: tuple = ()
    verdict: str = "error"
    reason: str = ""
    runtime_seconds: float = 0.0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise AnilapError("verdict must be one of %s, got %r"
                              % (VERDICTS, self.verdict))

    def as_dict(self):
        """Everything except the wall clock, which is not reproducible."""
        return {
            "experiment": self.experiment,
            "verdict": self.verdict,
            "reason": self.reason,
            "parameters": self.parameters,
            "measurements": {k: m.as_dict()
                             for k, m in self.measurements.items()},
            "bounds": self.bounds,
            "details": self.details,
            "curves": [{"name": c.name, "parameter": c.parameter,
                        "file": c.name + ".csv", "rows": len(c.rows)}
                       for c in self.curves],
        }


def _versions():
    import numpy
    import scipy

    from . import __version__
    return {
        "anilap": __version__,
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def emit_report(report: ExperimentReport, out_dir, config_text=None):
    """Write report.json, one CSV per curve, manifest.json, timing.txt.

    Every file except timing.txt is a pure function of the report, so
    rerunning an identical config and seed reproduces them byte for
    byte.  Returns the list of paths written.
    """
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out / "report.json"
    report_path.write_text(dump_json(report.as_dict()))
    written.append(report_path)

    for curve in report.curves:
        path = out / (curve.name + ".csv")
        path.write_text(curve.csv_text())
        written.append(path)

    manifest = {
        "experiment": report.experiment,
        "inputs": report.parameters,
        "seeds": report.parameters.get("seed"),
        "versions": _versions(),
    }
    if config_text is not None:
        manifest["config_sha256"] = hashlib.sha256(
            config_text.encode()).hexdigest()
        config_path = out / "config.yaml"
        config_path.write_text(config_text)
        written.append(config_path)
    manifest["files"] = [p.name for p in written]
    manifest_path = out / "manifest.json"
    manifest_path.write_text(dump_json(manifest))
    written.append(manifest_path)

    timing_path = out / "timing.txt"
    timing_path.write_text("runtime_seconds %s\n"
                           % format_float(report.runtime_seconds))
    written.append(timing_path)
    return written
