"""Exception types shared across the package.

The CLI maps these onto exit codes: bad input -> 2, numerical trouble -> 3,
refusal near the critical surface -> 4.
"""


class SizeError(ValueError):
    """Lattice size out of the supported range."""


class ConstraintError(ValueError):
    """Input violates a structural constraint (invalid configuration,
    edges not on a common diagonal, malformed path, ...)."""


class ResourceError(RuntimeError):
    """Request would exceed the intended resource envelope
    (e.g. exhaustive enumeration beyond the supported sizes)."""


class StateError(RuntimeError):
    """Operation requires a prior step (e.g. partition evaluation before
    the sign calibration has been attached)."""


class NumericalError(RuntimeError):
    """Numerical validation failed (lost skew symmetry, residual imaginary
    parts, singular quadrature grid, ...)."""


class NearCriticalError(RuntimeError):
    """Parameters too close to the critical surface for the requested
    quadrature to be trustworthy."""


class DegenerateCouplingError(ValueError):
    """Derived Ising couplings are degenerate (one of the signature-weight
    combinations vanishes)."""


class SampleSizeError(ValueError):
    """Not enough post-burnin samples for a meaningful estimate."""
