"""Exception hierarchy shared by all scdkit modules."""


class SCDError(Exception):
    """Base class for every error raised by scdkit."""


class DimensionMismatch(SCDError, ValueError):
    pass


class RankDeficient(SCDError, ValueError):
    pass


class NotRegular(SCDError, ValueError):
    """The subspace contains a nonzero vector of the form (y*, 0)."""


class SingularTransform(SCDError, ValueError):
    pass


class InfeasibleSet(SCDError, ValueError):
    pass


class QPFailure(SCDError, RuntimeError):
    pass


class PointNotInSet(SCDError, ValueError):
    pass


class NotANormal(SCDError, ValueError):
    pass


class ScaleLimitExceeded(SCDError, ValueError):
    pass


class NoRegularSubspace(SCDError, RuntimeError):
    pass


class EmptyBundle(SCDError, ValueError):
    pass
