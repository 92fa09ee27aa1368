class PeakboundError(Exception):
    """Base class for errors raised by peakbound."""


class ProductCapError(PeakboundError):
    """Raised when product enumeration would exceed the configured cap."""


class CertificateViolation(PeakboundError):
    """Raised when an expansion step contradicts a certified sigma bound.

    The offending data is kept on the exception so it can be reported.
    """

    def __init__(self, message, *, ratio=None, mu=None, x=None, R=None):
        super().__init__(message)
        self.ratio = ratio
        self.mu = mu
        self.x = x
        self.R = R


class ScheduleExhausted(PeakboundError):
    pass


class ModelFileError(PeakboundError):
    """Malformed or unsupported model file."""
