"""Exception types.

``PreconditionError`` covers numerical preconditions (non-square input, a
singular covariance, too many subsets). ``ConfigError`` covers malformed
experiment configuration. The CLI maps them to exit codes 2 and 1.
"""


class NoiseFoldError(Exception):
    pass


class PreconditionError(NoiseFoldError, ValueError):
    pass


class ConvergenceError(NoiseFoldError, ArithmeticError):
    pass


class ConfigError(NoiseFoldError, ValueError):
    pass
