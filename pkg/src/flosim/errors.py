"""Exception types shared across the package.

Every error raised by the library derives from FlosimError so callers (and the
command line front end) can report failures as a single greppable line of the
form ``ClassName: message``.
"""


class FlosimError(Exception):
    """Base class for all errors raised by this package."""


class BadDimensions(FlosimError):
    """A matrix or vector has an incompatible or invalid shape."""


class DimensionMismatch(FlosimError):
    """Two objects refer to different mode counts."""


class NonSquare(FlosimError):
    """A square matrix was required."""


class NotHermitian(FlosimError):
    """A Hermitian matrix was required."""


class NotUnitary(FlosimError):
    """A unitary matrix was required."""


class NotAntisymmetric(FlosimError):
    """An antisymmetric (skew-symmetric) matrix was required."""


class OddDimension(FlosimError):
    """An even-dimensional matrix was required."""


class RankDeficient(FlosimError):
    """Input columns are (numerically) linearly dependent."""


class NotInSpan(FlosimError):
    """A vector was required to lie in the filled span."""


class ImpossibleOutcome(FlosimError):
    """A forced measurement outcome has probability below threshold."""


class BadIndexSet(FlosimError):
    """An occupation index set is not strictly increasing or out of range."""


class IndexOutOfRange(FlosimError):
    """A mode or orbital index lies outside its allowed range."""


class ModesNotOrthogonal(FlosimError):
    """Two measured mode vectors are not orthogonal."""


class TermCapExceeded(FlosimError):
    """A determinant sum grew past its term cap."""


class WrongParticleNumber(FlosimError):
    """An operation required a specific electron count."""


class BadContext(FlosimError):
    """The state is not in the reduction's expected standard form."""


class TooManyModes(FlosimError):
    """The dense representation cap was exceeded."""


class ZeroVector(FlosimError):
    """A nonzero vector was required."""


class BadConfig(FlosimError):
    """A configuration value is invalid."""


class ParityGroupingUnsupported(FlosimError):
    """The parity outcome grouping cannot be simulated branch-exactly."""


class NoAdmissibleBranch(FlosimError):
    """No branch is admissible; numbers do not add up to a valid choice."""


class ParseError(FlosimError):
    """A circuit or state document could not be parsed."""


class OracleCheckFailed(FlosimError):
    """The dense cross-check disagreed with the fast path."""
