"""Exception types shared across the package.

Parsing and estimation are total over text/bytes input: anything malformed
raises one of these instead of leaking ValueError/IndexError from helpers.
"""

from __future__ import annotations


class SvmSocError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedKernel(SvmSocError):
    """Model file declares a kernel other than linear (type 0)."""


class MalformedModel(SvmSocError):
    """Model file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedInstance(SvmSocError):
    """Test vector text is not Fl finite reals."""


class MalformedDataset(SvmSocError):
    """Labeled CSV is ragged, has bad labels, or non-finite features."""


class DimensionError(SvmSocError):
    """Model and instance/dataset disagree on feature count."""


class FrameLengthError(SvmSocError):
    """Stream frame word count does not match S*Fl + 1 + S + Fl."""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected {expected} stream words, got {actual}")


class CalibrationError(SvmSocError):
    """Base class for cost-model calibration problems."""


class InsufficientAnchors(CalibrationError):
    """A required (directive, regime) pair has no anchor rows."""


class UnknownCalibration(CalibrationError):
    """No calibration entry covers the requested lookup."""


class FlMismatch(CalibrationError):
    """Requested feature count differs from the calibrated one and the
    directive has no per-feature latency decomposition to bridge the gap."""


class UnknownDesign(CalibrationError):
    """Power lookup for a (model, design) pair that was never measured."""
