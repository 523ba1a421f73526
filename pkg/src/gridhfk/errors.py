"""Exception types shared across the package.

Every failure mode that callers are expected to handle (bad input, moves
that are not legal in a given position, internal consistency checks that
double as mathematical assertions) gets its own class so tests and the
command line tool can react precisely.
"""

from __future__ import annotations


class GridHfkError(Exception):
    """Base class for all package-specific errors."""


class EmptyWord(GridHfkError):
    """A braid word with no letters was supplied."""


class NotPermutation(GridHfkError):
    """Grid data whose rows/columns are not a pair of permutations."""


class CoincidentDecorations(GridHfkError):
    """An X and an O occupy the same cell of the grid."""


class MultiComponentClosure(GridHfkError):
    """The closure of the braid word is a link with several components."""


class MultiComponent(GridHfkError):
    """The grid diagram traces out more than one closed curve."""


class TooSmall(GridHfkError):
    """A move would shrink the grid below the minimum size two."""


class IllegalCastling(GridHfkError):
    """Adjacent row/column exchange blocked by interleaved decorations."""


class DegenerateDeterminant(GridHfkError):
    """The winding matrix determinant vanished or failed to normalize."""


class PointOnDiagram(GridHfkError):
    """A winding-number query for a point lying on the curve itself."""


class InvalidOmission(GridHfkError):
    """A vertical/horizontal line omission that no valid configuration allows."""


class BoundarySquareNonzero(GridHfkError):
    """The boundary operator failed the d-squared-equals-zero check."""


class NonUnitPivot(GridHfkError):
    """A cancellation was requested on an entry that is not a unit."""


class ScheduleAssertionFailed(GridHfkError):
    """A retraction event violated its pairing/grading invariants."""


class CrosscheckFailed(GridHfkError):
    """Two independent computations disagreed on the same invariant."""


class InconsistentTensor(GridHfkError):
    """Deconvolution of the tensor factor produced a negative multiplicity."""


class UnderdeterminedSkip(GridHfkError):
    """Skipped homology slices cannot be reconstructed from the Euler data."""
