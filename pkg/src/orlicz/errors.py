"""Exception types shared across the package."""


class OrliczError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OrliczError):
    """Evaluation requested outside the trusted domain [0, u_max]."""


class UndefinedDerivativeError(OrliczError):
    """Second derivative requested at a kink of a piecewise function."""


class ZeroClassMismatchError(OrliczError):
    """Sampled small-argument curvature contradicts the declared class."""


class PreconditionError(OrliczError):
    """An operation's stated precondition does not hold for the inputs."""


class ConstructionError(OrliczError):
    """A piecewise construction could not satisfy its constraints."""


class BracketError(OrliczError):
    """A root bracket could not be established within the trusted domain."""


class SearchError(OrliczError):
    """A line search objective violated its unimodality assumption."""


class CrossingPointError(OrliczError):
    """The curve parameter hits an exact zero crossing of a cell value."""


class InfiniteCurvatureError(OrliczError):
    """An integrand needs M'' at 0 while the curvature blows up there."""


class AmbiguityError(OrliczError):
    """Operator recovery found a target cell fed by two basis images."""


class ConfigError(OrliczError):
    """An experiment configuration document could not be interpreted."""
