"""Exception hierarchy shared by the library and the CLI."""


class HilbertOtError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(HilbertOtError, ValueError):
    """Rejected input data: bad shapes, out-of-range values, broken weights.

    Mapped to exit code 2 by the CLI.
    """


class ParameterError(HilbertOtError, ValueError):
    """Invalid parameter combination (e.g. key width overflow, q > d).

    Mapped to exit code 3 by the CLI.
    """
