"""Exception hierarchy shared by all holomimo modules.

The CLI maps these onto process exit codes: configuration problems
exit 2, numerical failures exit 3, I/O failures exit 4.
"""


class HoloMimoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(HoloMimoError):
    """Invalid configuration, parameter out of range, or contract violation."""


class NumericError(HoloMimoError):
    """Numerical failure: degenerate spectrum, eigensolver breakdown, etc."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
