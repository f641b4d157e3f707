"""Exception hierarchy shared by every module."""


class DrsubmaxError(Exception):
    pass


class ConfigError(DrsubmaxError, ValueError):
    """Bad user input (config file, CLI flags, incompatible settings)."""


class Infeasible(DrsubmaxError):
    pass


class DegenerateHull(DrsubmaxError):
    """The feasible set is a single point."""


class DeltaTooLarge(DrsubmaxError, ValueError):
    pass


class NumericalFailure(DrsubmaxError):
    pass


class OutOfDomain(DrsubmaxError, ValueError):
    pass


class DimensionTooLarge(DrsubmaxError, ValueError):
    pass


class InfeasibleQuery(DrsubmaxError):
    """An oracle was asked about a point outside the feasible set.

    This always indicates a bug in the caller (wrong delta, wrong shrunken
    body) and must never be swallowed.
    """


class FeasibilityViolation(DrsubmaxError):
    pass


class VariantBodyMismatch(ConfigError):
    pass


class TargetTooTight(DrsubmaxError, ValueError):
    pass


class GridTooLarge(DrsubmaxError, ValueError):
    pass
