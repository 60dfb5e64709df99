"""Exception hierarchy.

``DataError`` subclasses describe bad input; ``NumericalError`` subclasses
describe failures of an iterative or geometric routine. The CLI maps the two
families onto distinct exit codes.
"""


class TsnmfError(Exception):
    pass


class DataError(TsnmfError, ValueError):
    pass


class NumericalError(TsnmfError, ArithmeticError):
    pass


class ZeroColumn(DataError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"column {index} has (near) zero norm")


class HalfSphereViolation(DataError):
    pass


class DegenerateMean(DataError):
    pass


class InsufficientData(DataError):
    pass


class ParseError(DataError):
    def __init__(self, row, col, text=""):
        self.row = row
        self.col = col
        super().__init__(f"cannot parse cell at row {row}, column {col}: {text!r}")


class RaggedRows(DataError):
    pass


class EmptyFile(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class WrongK(DataError):
    pass


class NormTooLarge(NumericalError):
    pass


class OutsideHalfSphere(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class MaxIterations(NumericalError):
    def __init__(self, msg, column=None):
        self.column = column
        super().__init__(msg)


class RankDeficient(NumericalError):
    pass
