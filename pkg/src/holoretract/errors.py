"""Exception hierarchy shared by all modules."""


class HoloRetractError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(HoloRetractError, ValueError):
    pass


class DomainError(HoloRetractError, ValueError):
    """A point or parameter lies outside the open domain of a map."""


class RankDeficient(HoloRetractError, ValueError):
    pass


class WrongNormKind(HoloRetractError, TypeError):
    pass


class NumericalFailure(HoloRetractError, RuntimeError):
    """An optimizer stopped before reaching the requested bracket.

    ``lower``/``upper`` hold the best bracket achieved, ``best`` the best
    iterate (whatever the caller finds useful).
    """

    def __init__(self, message, lower=None, upper=None, best=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.best = best

    @property
    def gap(self):
        if self.lower is None or self.upper is None:
            return None
        return self.upper - self.lower


class Infeasible(NumericalFailure):
    """No norm-1 extension was found; ``extension_norms`` lists what was achieved."""

    def __init__(self, message, extension_norms=(), **kw):
        super().__init__(message, **kw)
        self.extension_norms = list(extension_norms)


class NotAnIsometry(HoloRetractError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class VanishingViolation(NotAnIsometry):
    def __init__(self, message, k, l, witness=None):
        super().__init__(message, witness)
        self.k = k
        self.l = l


class LinearityViolation(HoloRetractError, ArithmeticError):
    def __init__(self, message, multi_index=None, modulus=None):
        super().__init__(message)
        self.multi_index = multi_index
        self.modulus = modulus


class VerificationFailure(HoloRetractError, AssertionError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
