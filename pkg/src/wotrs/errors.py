"""Exception hierarchy. CLI exit codes hang off these classes."""


class WOError(Exception):
    exit_code = 2


class ParseError(WOError):
    def __init__(self, message, line=1, col=1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class PositionError(WOError, IndexError):
    """A position does not address a node of the term."""


class NotARedex(WOError):
    pass


class NotLeftLinear(WOError):
    pass


class NotWeaklyOrthogonal(WOError):
    pass


class CollapsingRulesPresent(WOError):
    pass


class InvalidStep(WOError):
    """Redex set violates the disjointness / non-overlap contract."""


class InvalidDevelopment(InvalidStep):
    pass


class BudgetExhausted(WOError):
    exit_code = 3


class ModulusUnavailable(BudgetExhausted):
    pass


class WitnessUnavailable(WOError):
    pass


class InsufficientHeight(WOError):
    pass


class NoZeroFactorization(WOError):
    def __init__(self, message, factors, examined):
        super().__init__(message)
        self.factors = factors
        self.examined = examined


class InvariantViolation(AssertionError):
    """A proved bound failed to hold. Always an implementation bug."""
