"""Exception hierarchy. Each class maps to a stable CLI exit code."""


class KhiError(Exception):
    exit_code = 1


class DiagramError(KhiError, ValueError):
    exit_code = 3


class MalformedSyntax(DiagramError):
    pass


class LabelMultiplicity(DiagramError):
    pass


class MultiComponent(DiagramError):
    pass


class NonPlanar(DiagramError):
    pass


class UnknownName(KhiError, KeyError):
    exit_code = 4

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown knot"


class ValidityFailure(KhiError):
    """A constructed sutured handlebody violates one of the key-inequality hypotheses."""

    exit_code = 70

    def __init__(self, condition: int, detail: str):
        super().__init__(f"condition {condition} failed: {detail}")
        self.condition = condition


class BandCycle(KhiError):
    pass


class BandCollision(KhiError):
    pass


class CurveSystemError(KhiError):
    """Structural invariant of a curve system violated."""

    exit_code = 70


class NonSeparating(KhiError):
    pass


class TooFewIntersections(KhiError, ValueError):
    pass


class InvalidInput(KhiError, ValueError):
    exit_code = 3


class CertificateMismatch(KhiError):
    exit_code = 5


class HypothesisNotMet(KhiError, ValueError):
    exit_code = 3


class InvalidSlope(KhiError, ValueError):
    exit_code = 3


class InvalidGenus(KhiError, ValueError):
    exit_code = 3
