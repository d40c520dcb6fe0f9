"""Exception hierarchy shared by all modules."""


class DegchError(Exception):
    """Base class for library errors."""


class NonFiniteField(DegchError, ValueError):
    pass


class DimensionMismatch(DegchError, ValueError):
    pass


class DegenerateStabilizer(DegchError, ArithmeticError):
    pass


class StepSizeUnderflow(DegchError, RuntimeError):
    def __init__(self, msg, t=None):
        super().__init__(msg if t is None else f"{msg} (t={t:.6g})")
        self.t = t


class PotentialNotDoubleWell(DegchError, ValueError):
    pass


class QuadratureNotConverged(DegchError, RuntimeError):
    pass


class NoInterface(DegchError, ValueError):
    pass


class DegenerateCurve(DegchError, ValueError):
    pass


class TimeOrder(DegchError, ValueError):
    pass


class Mismatch(DegchError, ValueError):
    pass


class AmplitudeBelowNoise(DegchError, RuntimeError):
    pass


class GridTooLarge(DegchError, ValueError):
    pass


class ClimbDisabled(DegchError, ValueError):
    pass


class ConfigError(DegchError):
    pass


class ParseError(ConfigError):
    def __init__(self, msg, line=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        super().__init__(f"{msg} ({', '.join(loc)})" if loc else msg)
        self.line = line
        self.field = field


class ValidationError(ConfigError):
    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SnapshotError(DegchError):
    pass


class VersionMismatch(SnapshotError):
    pass


class CorruptPayload(SnapshotError):
    pass


class DigestMismatch(SnapshotError):
    pass
