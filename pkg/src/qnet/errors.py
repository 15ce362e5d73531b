"""Exception hierarchy shared by all qnet modules."""


class QnetError(Exception):
    """Base class for all qnet domain errors."""


class DimensionMismatch(QnetError):
    pass


class VariantMismatch(QnetError):
    pass


class SingularCovariance(QnetError):
    pass


class InvalidWeight(QnetError):
    pass


class NotInvertibleHere(QnetError):
    """The algebraic result exists but violates the colour invariants.

    Update operations are only partially defined; outside the convex
    weight range a fused or discounted colour may leave the valid set
    (for example a non positive definite covariance), and this error
    marks that hole in the domain.
    """


class NonPositiveDensity(QnetError):
    pass


class MissingInput(QnetError):
    pass


class FusionUndefined(QnetError):
    """Propagation hit an undefined update; carries the interaction id."""

    def __init__(self, interaction_id, message=""):
        self.interaction_id = interaction_id
        super().__init__(message or f"fusion undefined at interaction {interaction_id!r}")


class InvalidSite(QnetError):
    pass


class MissingTrueCov(QnetError):
    pass


class MissingRegion(QnetError):
    pass
