"""Exception types shared across the package.

Each error marks a specific precondition or convergence failure so callers
(and the CLI exit-code mapping) can tell "bad input" apart from "method
cannot proceed" and "numerical process failed".
"""


class ApspecError(Exception):
    """Base class for all package-specific errors."""


class MalformedInput(ApspecError):
    """Input file or value does not match the expected schema."""


class IncommensurableSpectrum(ApspecError):
    """Frequencies do not all lie on a single rational ray."""


class NotNonnegative(ApspecError):
    """Function fails the nonnegativity requirement (detected via roots or grid)."""


class NotBoundedBelow(ApspecError):
    """Function is not bounded below by a positive constant, so log f is unusable."""


class NonConvergence(ApspecError):
    """Iterative or certified numerical process failed to converge."""


class WindowTooSmall(ApspecError):
    """Requested almost-period tolerance needs a longer observation window."""


class SpectraCollision(ApspecError):
    """Dilated block spectra overlap; scale choices were not independent enough."""


class OracleTooSmall(ApspecError):
    """Oracle resolution cannot certify the requested approximation accuracy."""


class OddRealMultiplicity(ApspecError):
    """A real zero of even-multiplicity data appeared with odd multiplicity."""


class ReciprocalApproximationFailed(ApspecError):
    """Reciprocal expansion did not reach the requested boundary accuracy."""
