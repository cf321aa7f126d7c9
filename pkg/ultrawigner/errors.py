'''Exceptions and warning categories raised by ultrawigner.'''


class UltraWignerError(Exception):
    '''Base class for every error raised by the package.'''


class ArgumentError(UltraWignerError, ValueError):
    pass


class DomainError(UltraWignerError, ValueError):
    pass


class ExtrapolationError(UltraWignerError, ValueError):
    pass


class CapacityError(UltraWignerError, ValueError):
    pass


class PreconditionError(UltraWignerError, ValueError):
    pass


class ConventionError(UltraWignerError, ValueError):
    pass


class DataError(UltraWignerError, ValueError):
    '''Malformed or non-finite input. `line` is set for file inputs.'''

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        if line is not None:
            where = f'{source}:{line}' if source else f'line {line}'
            message = f'{where}: {message}'
        super().__init__(message)


class NumericError(UltraWignerError, ArithmeticError):
    '''A numerical procedure did not reach its tolerance.'''

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class InsufficientSupportError(UltraWignerError, ValueError):
    pass


class FitDegenerateError(UltraWignerError, ValueError):

    def __init__(self, message, residual=None, beta_hat=None):
        self.residual = residual
        self.beta_hat = beta_hat
        super().__init__(message)


class TruncationWarning(UserWarning):
    '''Integrand or grid values did not decay at the boundary.'''
