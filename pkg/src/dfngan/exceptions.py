"""Error types raised across the toolkit.

Every error carries a short machine-readable ``code`` which the command
line front end prints as ``error: <code>: <detail>``.
"""


class DfnganError(Exception):
    code = "Error"


class NonSquare(DfnganError, ValueError):
    code = "NonSquare"


class NonFinite(DfnganError, ValueError):
    code = "NonFinite"


class NoConvergence(DfnganError, ArithmeticError):
    code = "NoConvergence"

    def __init__(self, index, sweeps):
        self.index = index
        self.sweeps = sweeps
        super().__init__(
            f"subdiagonal entry {index} did not deflate within {sweeps} sweeps"
        )


class ZeroMatrix(DfnganError, ValueError):
    code = "ZeroMatrix"


class TooSmall(DfnganError, ValueError):
    code = "TooSmall"


class Overflow(DfnganError, OverflowError):
    code = "Overflow"


class DimensionMismatch(DfnganError, ValueError):
    code = "DimensionMismatch"


DimMismatch = DimensionMismatch


class ShapeMismatch(DimensionMismatch):
    code = "ShapeMismatch"


class EmptyBatch(DfnganError, ValueError):
    code = "EmptyBatch"


class DegenerateSpectrum(DfnganError, ArithmeticError):
    code = "DegenerateSpectrum"


class UnsupportedFormat(DfnganError, ValueError):
    code = "UnsupportedFormat"


class CorruptHeader(DfnganError, ValueError):
    code = "CorruptHeader"


class SignalTooShort(DfnganError, ValueError):
    code = "SignalTooShort"


class NotComplex(DfnganError, ValueError):
    code = "NotComplex"


class ColaViolation(DfnganError, ValueError):
    code = "ColaViolation"


class AlreadyVisualized(DfnganError, ValueError):
    code = "AlreadyVisualized"


class NotVisualized(DfnganError, ValueError):
    code = "NotVisualized"


class LogRealIrreversible(DfnganError, ValueError):
    code = "LogRealIrreversible"


class ScaleOutOfRange(DfnganError, ValueError):
    code = "ScaleOutOfRange"


class EmptySignal(DfnganError, ValueError):
    code = "EmptySignal"


class AmplitudeOutOfRange(DfnganError, ValueError):
    code = "AmplitudeOutOfRange"


class NumericalDivergence(DfnganError, ArithmeticError):
    code = "NumericalDivergence"


class TraceTooShort(DfnganError, ValueError):
    code = "TraceTooShort"


class NonPsd(DfnganError, ArithmeticError):
    code = "NonPsd"
