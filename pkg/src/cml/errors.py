"""Exception hierarchy shared by every module."""


class CMLError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergence(CMLError):
    """Root finder exhausted its iteration budget without meeting the residual bound."""


class NotSquareFree(CMLError):
    pass


class NotDistinct(CMLError):
    pass


class ProjectionCollision(CMLError):
    """Two torsion points collapsed to the same complex number under x + tau*y."""


class PathHitsDiscriminant(CMLError):
    pass


class TrackingAmbiguity(CMLError):
    pass


class AmbiguousMatching(CMLError):
    pass


class IllConditioned(CMLError):
    pass


class CardinalityMismatch(CMLError):
    pass


class FlexNotOnCurve(CMLError):
    pass


class CertificateFailed(CMLError):
    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"{clause}: {detail}" if detail else clause)
        self.clause = clause
        self.detail = detail
