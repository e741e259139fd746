"""
Exception hierarchy for superres
"""


class SuperresError(Exception):
    """Base class for every error raised by superres"""


class DomainError(SuperresError, ValueError):
    """A formula was evaluated outside its mathematical domain"""


class ConfigError(SuperresError, ValueError):
    """A scenario, manifest or model parameter failed validation"""


class FitError(SuperresError, RuntimeError):
    """A least-squares fit or root search did not converge"""


class AssertionFailure(SuperresError):
    """An embedded scenario assertion did not hold"""
