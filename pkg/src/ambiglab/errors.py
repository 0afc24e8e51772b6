"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary argument validation; the classes
here mark failure modes a caller may want to handle individually.
"""


class AmbigLabError(Exception):
    """Base class for package-specific failures."""


class InfeasibleSpecError(AmbigLabError, ValueError):
    """The requested cone admits no member (e.g. a forced zero endpoint)."""


class NoCertificateFoundError(AmbigLabError, RuntimeError):
    """No admissible certificate exists for the supplied inputs.

    Raised by the mixed generator when every decomposition angle of the
    given right factor falls inside the excluded (measure-zero) set.
    """


class UnsupportedPairTypeError(AmbigLabError, ValueError):
    """The (index set, code) pair falls outside the classified categories."""


class InternalConsistencyError(AmbigLabError, RuntimeError):
    """A generator self-check failed; indicates a bug, never expected."""


class IllConditionedPointError(AmbigLabError, RuntimeError):
    """Parameter point too close to an excluded angle set for probing."""


class InconclusiveProbeError(AmbigLabError, RuntimeError):
    """Dimension probe could not reach a majority verdict."""
