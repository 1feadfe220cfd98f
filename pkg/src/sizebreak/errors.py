"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for bad input, 3 for numerical or degenerate situations, 4 for option
combinations that are not supported.
"""


class SizeBreakError(Exception):
    exit_code = 1


class InputError(SizeBreakError, ValueError):
    exit_code = 2


class MalformedInputError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateBinError(InputError):
    pass


class NonContiguousError(InputError):
    pass


class DomainError(InputError):
    pass


class RangeError(InputError):
    pass


class SpecError(InputError):
    pass


class NumericalError(SizeBreakError, ArithmeticError):
    exit_code = 3


class ZeroCountError(NumericalError):
    pass


class UnderdeterminedError(NumericalError):
    pass


class DegenerateDesignError(NumericalError):
    pass


class NoIntersectionError(NumericalError):
    pass


class DegenerateFitError(NumericalError):
    pass


class DegenerateAnchorError(NumericalError):
    pass


class NoSolutionError(NumericalError):
    pass


class InstabilityError(NumericalError):
    pass


class UnsupportedCombinationError(SizeBreakError):
    exit_code = 4
