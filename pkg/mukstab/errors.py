class MukstabError(Exception):
    pass


class InputError(MukstabError):
    """Bad user input; reported with exit code 2."""


class ComputeError(MukstabError):
    """A computation failed on valid input; reported with exit code 3."""


class ParseError(InputError):
    pass


class ValidationError(InputError):
    pass


class UnboundedError(InputError):
    pass


class EmptyPolytopeError(InputError):
    pass


class NotFullDimensionalError(InputError):
    pass


class NotDelzantError(InputError):
    pass


class NotReflexiveError(InputError):
    pass


class NotConvexError(InputError):
    pass


class ExponentOverflowError(ComputeError):
    pass


class DegenerateDirectionError(ComputeError):
    pass


class MaxIterationsError(ComputeError):
    pass


class SingularGramError(ComputeError):
    pass
