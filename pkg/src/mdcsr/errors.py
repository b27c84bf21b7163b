"""Exception types shared across the package.

Every domain error derives from MdcError so the command-line layer can map
any validation failure to a single exit code.
"""


class MdcError(Exception):
    """Base class for all domain errors raised by this package."""


class BadParameters(MdcError):
    """A parameter tuple violates one of its defining inequalities."""


class BadRange(MdcError):
    """An index or parameter lies outside its stated range."""


class ZeroInverse(MdcError):
    """Multiplicative inverse of zero was requested."""


class SingularMatrix(MdcError):
    """A linear system has no unique solution."""


class DuplicatePoint(MdcError):
    """Evaluation points must be pairwise distinct."""


class ZeroPoint(MdcError):
    """Evaluation points must be nonzero."""


class LengthMismatch(MdcError):
    """A symbol sequence has the wrong length."""


class SelfRepair(MdcError):
    """A node cannot act as its own repair helper."""


class WrongHelperCount(MdcError):
    """Repair needs exactly d distinct helpers."""


class WrongShareCount(MdcError):
    """Recovery of level j needs exactly j distinct shares."""


class IndivisibleFileSize(MdcError):
    """A file size is not a multiple of its per-stripe capacity."""


class UnknownLevel(MdcError):
    """Requested level is outside the range served by the system."""


class EmptySystem(MdcError):
    """Operation requires at least one nonempty level."""


class OverlappingSets(MdcError):
    """Type I and type II node sets must be disjoint."""


class SplitOutOfRegime(MdcError):
    """The storage tradeoff bound is only asserted when l1 <= l2."""


class NotSquareSystem(MdcError):
    """Entropy checks are defined only for systems with n = d + 1."""


class IndexOutOfRange(MdcError):
    """A node or level index is out of range."""


class ShareFormatError(MdcError):
    """A share file is malformed."""
