"""Exception hierarchy shared by every module of the package."""


class SplncError(Exception):
    """Base class for all errors raised by :mod:`splnc`."""


class NonFiniteInput(SplncError, ValueError):
    pass


class NotPSD(SplncError, ValueError):
    pass


class DegenerateSpan(SplncError, ValueError):
    pass


class EmptyInput(SplncError, ValueError):
    pass


class DimensionMismatch(SplncError, ValueError):
    pass


class DegenerateProblem(SplncError, ValueError):
    """One class carries zero total weight, so the weighted dual is trivial."""


class NoConvergence(SplncError, RuntimeWarning):
    """Issued as a warning; the solver still returns its best iterate."""


class InvalidModel(SplncError, ValueError):
    pass


class NonPositivePace(SplncError, ValueError):
    pass


class TooFewClasses(SplncError, ValueError):
    pass


class EmptyClass(SplncError, ValueError):
    pass


class SingularCenter(SplncError, ValueError):
    pass


class BadSimilarity(SplncError, ValueError):
    pass


class NotPositiveDefinite(SplncError, ValueError):
    pass


class FractionTooLargeForClass(SplncError, ValueError):
    pass


class ShapeMismatch(SplncError, ValueError):
    pass


class UnknownPredictedClass(SplncError, ValueError):
    pass


class EmptyEvaluation(SplncError, ValueError):
    pass


class PaletteTooSmall(SplncError, ValueError):
    pass


class ConfigError(SplncError, ValueError):
    """Experiment configuration could not be parsed or validated.

    ``lineno`` is the 1-based line of the offending entry when known.
    """

    def __init__(self, message, lineno=None, key=None):
        self.lineno = lineno
        self.key = key
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
