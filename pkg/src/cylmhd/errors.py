"""Exception types shared across the package."""


class CylmhdError(Exception):
    pass


# symbolic engine
class CyclicRules(CylmhdError):
    pass


class InconclusiveZeroTest(CylmhdError):
    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"numeric residual {residual:.3e} inside the inconclusive band")


class UnboundSymbol(CylmhdError):
    pass


class DomainError(CylmhdError):
    pass


class JetOrderError(CylmhdError):
    pass


class ExponentError(CylmhdError):
    pass


class ParseError(CylmhdError):
    pass


# models and checks
class InvalidConfig(CylmhdError):
    pass


class UnsupportedOrder(CylmhdError):
    pass


class NotASymmetry(CylmhdError):
    pass


class IncompleteInversion(CylmhdError):
    pass


class GuardMismatch(CylmhdError):
    pass


# solver
class InvalidProfile(CylmhdError):
    pass


class SolverError(CylmhdError):
    def __init__(self, message, cell=None):
        self.cell = cell
        super().__init__(message if cell is None else f"{message} (cell {cell})")


class NonPositiveDensity(SolverError):
    pass


class NonPositivePressure(SolverError):
    pass


class ZeroConductivity(SolverError):
    pass
