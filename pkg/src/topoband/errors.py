"""
Contract errors raised by the topoband modules.  Every error is a
TopoBandError; the command line turns those into exit status 2 and
reports the class name, anything else is treated as an internal failure.
"""

from bandcore.dbfutil import GenericException


class TopoBandError(GenericException):
    default_message = "Topological band computation failed"

    def __init__(self, msg=None, **details):
        super().__init__(msg=msg if msg is not None else self.default_message)
        self.details = details
        for key, val in details.items():
            setattr(self, key, val)

    def __str__(self):
        return f"{type(self).__name__}: {self.msg}"


# models

class UnknownModel(TopoBandError):
    default_message = "No model registered under that name"


class MissingParameter(TopoBandError):
    default_message = "A required model parameter is missing"


class UnknownParameter(TopoBandError):
    default_message = "The model takes no parameter of that name"


class InvalidOccupation(TopoBandError):
    default_message = "n_occ must satisfy 0 < n_occ < n_orb"


class NotHermitian(TopoBandError):
    default_message = "Matrix is not Hermitian"


class GapClosed(TopoBandError):
    default_message = "Spectral gap closes at the Fermi division"


class UnsupportedCount(TopoBandError):
    default_message = "Only 3 or 5 gamma matrices are supported"


# symmetry

class DimensionMismatch(TopoBandError):
    default_message = "Operator size does not match the model"


class InconsistentInput(TopoBandError):
    default_message = "Symmetry flags do not form a valid class"


# invariants

class GridTooCoarse(TopoBandError):
    default_message = "Plaquette field strength too large; refine the grid"


class NotConverged(TopoBandError):
    default_message = "Raw value is not close enough to an integer"


class NoChiralSymmetry(TopoBandError):
    default_message = "Model has no verified chiral symmetry"


class NoTimeReversal(TopoBandError):
    default_message = "Model has no verified time reversal with square -1"


class OddOccupation(TopoBandError):
    default_message = "Kramers pairing needs an even number of occupied bands"


class VanishingField(TopoBandError):
    default_message = "d-vector vanishes on the grid"


class SampleOnCriticalPoint(TopoBandError):
    default_message = "Parameter sample too close to a critical value"


# greens

class SingularGreen(TopoBandError):
    default_message = "Green's function is singular on the sampling set"


class SingularZeroFrequency(TopoBandError):
    default_message = "G(0, k) is not invertible"


class NonUniformFilling(TopoBandError):
    default_message = "Effective Hamiltonian filling varies over the zone"


# ktable

class UnknownLabel(TopoBandError):
    default_message = "Not one of the ten Cartan labels"


class ComplexClassUnsupported(TopoBandError):
    default_message = "Torus decomposition is only available for real classes"


# edge

class LongRangeModel(TopoBandError):
    default_message = "Hoppings beyond nearest neighbour along the open direction"


class WidthTooSmall(TopoBandError):
    default_message = "Ribbon too narrow"


class EdgesHybridized(TopoBandError):
    default_message = "Edge states of the two boundaries overlap"


# cli

class UsageError(TopoBandError):
    default_message = "Bad command line"


class UnsupportedFormat(TopoBandError):
    default_message = "Output format must be json or csv"
