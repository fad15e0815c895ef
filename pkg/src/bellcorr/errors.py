"""Exception types shared across the package."""


class BellcorrError(Exception):
    """Base class for all errors raised by bellcorr."""


class NonPrimeModulus(BellcorrError, ValueError):
    pass


class SinglePartyInput(BellcorrError, ValueError):
    pass


class DimensionMismatch(BellcorrError, ValueError):
    pass


class NotValidInequality(BellcorrError, ValueError):
    pass


class Infeasible(BellcorrError):
    pass


class Unbounded(BellcorrError):
    pass


class NotNormalizable(BellcorrError, ValueError):
    pass


class SettingMismatch(BellcorrError, ValueError):
    pass


class LinearFunctionInput(BellcorrError, ValueError):
    pass


class UnknownFamily(BellcorrError, KeyError):
    pass


class SearchSpaceTooLarge(BellcorrError):
    pass


class IncompatiblePermutation(BellcorrError, ValueError):
    pass


class InvalidSplit(BellcorrError, ValueError):
    pass


class NotNonsignaling(BellcorrError, ValueError):
    pass


class ExtendedRequired(BellcorrError):
    """The requested computation is tagged extended and needs an explicit opt-in."""


class BudgetExceeded(BellcorrError):
    """A brute-force search ran past its evaluation budget.

    ``partial`` holds whatever was gathered before the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
