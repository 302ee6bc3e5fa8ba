"""Exception hierarchy. Each class carries the string ``code`` used in reports and CLI output."""


class BeamDecayError(Exception):
    code = "BEAMDECAY_ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details

    def __str__(self):
        return f"{self.code}: {self.args[0]}"


class DomainError(BeamDecayError, ValueError):
    code = "DOMAIN_ERROR"


class PreconditionViolation(BeamDecayError, ValueError):
    code = "PRECONDITION_VIOLATION"


class CertificateIneligible(BeamDecayError, ValueError):
    code = "CERTIFICATE_INELIGIBLE"


class LambdaInadmissible(BeamDecayError, ValueError):
    """Raised with ``details['bound']`` naming the violated side of the interval."""

    code = "LAMBDA_INADMISSIBLE"


class MeshIncompatible(BeamDecayError, ValueError):
    code = "MESH_INCOMPATIBLE"


class ResolutionError(BeamDecayError, ValueError):
    code = "RESOLUTION_ERROR"


class NumericalError(BeamDecayError, ArithmeticError):
    code = "NUMERICAL_ERROR"


class InsufficientData(BeamDecayError, ValueError):
    code = "INSUFFICIENT_DATA"


class RateUndefined(BeamDecayError, ValueError):
    code = "RATE_UNDEFINED"
