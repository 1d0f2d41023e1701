"""
Exceptions raised by policy_dyn.

Everything derives from PolicyDynError so that the CLI can turn any library
failure into a one-line message; the mixins (ValueError, AssertionError,
OSError) keep ordinary ``except`` clauses working.
"""


class PolicyDynError(Exception):
    pass


class ValidationError(PolicyDynError, ValueError):
    pass


class DimensionError(ValidationError):

    def __init__(self, what, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__('%s: expected size %s, got %s' % (what, expected, actual))


class ConfigError(ValidationError):
    pass


class FunctionSpaceTooLarge(ValidationError):

    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__('function space has %d pairs, more than the cap of %d'
                         % (size, cap))


class ConvergenceError(PolicyDynError):

    def __init__(self, msg, last_iterate, residual):
        self.last_iterate = last_iterate
        self.residual = residual
        super().__init__('%s (residual %.3e)' % (msg, residual))


class LPError(PolicyDynError):

    def __init__(self, msg, iterations=None, condition=None):
        self.iterations = iterations
        self.condition = condition
        details = []
        if iterations is not None:
            details.append('iterations=%d' % iterations)
        if condition is not None:
            details.append('basis condition=%.3e' % condition)
        if details:
            msg = '%s [%s]' % (msg, ', '.join(details))
        super().__init__(msg)


class InvariantError(PolicyDynError, AssertionError):
    pass


class ReportError(PolicyDynError, OSError):

    def __init__(self, path, reason):
        self.path = path
        super().__init__('cannot write %s: %s' % (path, reason))
