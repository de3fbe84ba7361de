"""Exception types for numerical-domain failures.

These are distinct from plain ValueError (programming/contract mistakes) so the
CLI can map them to a dedicated exit code.
"""


class NumericalDomainError(Exception):
    """An input is outside the regime where the requested quantity exists."""


class GaplessLatticeError(NumericalDomainError):
    """Operation requires a spectral gap but the lattice has delta = 0."""


class BandEdgeError(NumericalDomainError):
    """Evaluation point is at (or too close to) a band edge, where the
    density of states diverges and the theory is singular."""


class RegimeError(NumericalDomainError):
    """Band-regime quantity requested in the gap, or vice versa."""


class BracketingError(NumericalDomainError):
    """No sign change found for a transcendental root, even after pushing the
    brackets toward the gap edges."""


class ExtrapolationError(NumericalDomainError):
    """A limit extrapolation did not converge to the requested spread."""


class DissipatorError(NumericalDomainError):
    """Dissipation matrix has a significantly negative eigenvalue, which
    signals use of the gap-regime couplings in a master equation."""


class AnalysisError(NumericalDomainError):
    """A trajectory does not contain the feature being measured
    (e.g. no full oscillation in the requested window)."""
