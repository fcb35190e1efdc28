"""Exception hierarchy.

Each error carries the CLI exit code it maps to.
"""


class VorwaveError(Exception):
    exit_code = 3


class ConfigurationError(VorwaveError, ValueError):
    """Invalid descriptor, config key or CLI argument."""

    exit_code = 2


class NumericError(VorwaveError):
    exit_code = 3


class IntegrationError(NumericError):
    """The shooting integrator failed; ``last_y`` is the last accepted abscissa."""

    def __init__(self, message, last_y=None):
        super().__init__(message)
        self.last_y = last_y


class QuadratureError(NumericError):
    pass


class DomainError(NumericError, ValueError):
    pass


class AmplitudeError(DomainError):
    pass


class DegenerateError(NumericError):
    pass


class BranchUnavailableError(NumericError):
    pass


class AssemblyError(NumericError):
    pass


class SearchError(NumericError):
    pass


class PoleProximityError(NumericError):
    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class SolvabilityError(NumericError):
    pass


class DerivativeError(NumericError):
    pass


class ContinuationError(NumericError):
    pass


class ClassificationError(VorwaveError):
    """Counted objects disagree with their theoretical prediction."""

    exit_code = 4


class EigenvalueCensusError(ClassificationError):
    pass


class ConsistencyError(ClassificationError):
    pass
