class DlogSimulatorError(Exception):
    """Base class of every error raised by the simulator."""

    pass


class InvalidModulusError(DlogSimulatorError, ValueError):
    """Raised when a modulus is not a positive integer (or < 2 where required)."""

    pass


class NoInverseError(DlogSimulatorError, ArithmeticError):
    """Raised when an integer has no inverse modulo n."""

    def __init__(self, value: int, modulus: int):
        super().__init__(f"{value} is not invertible modulo {modulus}")
        self.value = value
        self.modulus = modulus


class InvalidInstanceError(DlogSimulatorError, ValueError):
    """Raised when a pair or argument lies outside the instance ranges."""

    pass


class ConvergenceError(DlogSimulatorError):
    """Raised when Simpson/Richardson refinement does not reach the tolerance."""

    def __init__(self, message: str, previous, last):
        super().__init__(f"{message} (previous={previous}, last={last})")
        self.previous = previous
        self.last = last


class EmptyCellError(DlogSimulatorError):
    """Raised when a histogram cell holds no admissible alpha_r."""

    pass


class HistogramFormatError(DlogSimulatorError):
    """Base class for histogram file parse errors."""

    pass


class HistogramVersionError(HistogramFormatError):
    pass


class HistogramChecksumError(HistogramFormatError):
    pass


class MalformedHistogramError(HistogramFormatError):
    pass


class ReportFormatError(DlogSimulatorError):
    """Raised when a capture table or oracle report cannot be parsed."""

    pass


class ResourceGuardError(DlogSimulatorError):
    """Raised when an exact computation would exceed the configured size."""

    pass


class TauTooLargeError(DlogSimulatorError):
    """Raised when the tau-expansion exceeds the configured bound."""

    def __init__(self, tau: int, bound: int):
        super().__init__(f"tau={tau} exceeds the search bound {bound}")
        self.tau = tau
        self.bound = bound
