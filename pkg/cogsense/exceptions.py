class CogsenseError(Exception):
    """A generic exception for all others to extend."""

    pass


class ConfigurationError(CogsenseError, ValueError):
    """Raised when a parameter or scenario setting is outside its legal range."""

    pass


class DomainError(ConfigurationError):
    """Raised when a probability or argument lies outside a function's domain."""

    pass


class InputError(CogsenseError, ValueError):
    """Raised when data handed to an operation is empty or malformed."""

    pass


class UsageError(CogsenseError):
    """Raised when an object is used in a way its state does not allow."""

    pass


class DeepFadeError(CogsenseError):
    """Raised when a reporting-channel gain is too small to equalize."""

    pass


class TrainingError(CogsenseError):
    """Raised when an adaptive fuser can not be trained on the given data."""

    pass


class EmissionError(CogsenseError, OSError):
    """Raised when result files can not be written."""

    pass


class TrialError(CogsenseError):
    """Raised when a single Monte Carlo trial fails."""

    def __init__(self, trial, error):
        self.trial = trial
        self.error = error
        super().__init__("Trial %d failed: %s" % (trial, error))
