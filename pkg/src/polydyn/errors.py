"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes; see ``polydyn.cli``.
"""


class PolydynError(Exception):
    """Base class for package-specific failures."""


class PolynomialParseError(PolydynError, ValueError):
    """Malformed polynomial, map or config text."""


class NumericalError(PolydynError):
    """A numerical procedure failed to meet its contract."""


class NonConvergence(NumericalError):
    """Root iteration hit max_iter before reaching the residual target."""

    def __init__(self, message, roots=None, residuals=None):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


class DegreeCapExceeded(PolydynError):
    """Symbolic composition would exceed the configured degree cap."""


class ExceptionalBasepoint(PolydynError):
    """Backward orbits of this point stay inside the exceptional set."""


class NotACycle(NumericalError):
    """Points handed in as a cycle do not close up under the map."""


class AmbiguousGrouping(NumericalError):
    """Two candidate cycles overlap within tolerance."""


class CensusBoundExceeded(NumericalError):
    """More non-repelling orbits found than the 3d-1 bound allows."""


class ResonantMultiplier(PolydynError):
    """A linearization denominator lambda^k - lambda vanished."""


class SmallDenominator(ResonantMultiplier):
    """A denominator |lambda^j - lambda| fell below the hard floor."""


class NotAttracting(PolydynError, ValueError):
    """Multiplier modulus is 0 or too close to 1 for this construction."""


class NotSuperattracting(PolydynError, ValueError):
    """Fixed point is not superattracting."""


class NotTangentToIdentity(PolydynError, ValueError):
    """Petal construction needs multiplier 1 at the fixed point."""


class WrongOrder(PolydynError, ValueError):
    """Leading nonlinearity inconsistent with the requested petal order."""


class OutsideDisc(PolydynError, ValueError):
    """Hyperbolic-geometry input lies outside the open unit disc."""


class NotASelfMap(PolydynError, ValueError):
    """Claimed disc self-map leaves the disc on the validation grid."""


class NotNormalized(PolydynError, ValueError):
    """Series is not normalized to f(0)=0, f'(0)=1."""


class UndefinedAtAtom(PolydynError):
    """Test function has no value at an atom (the point at infinity)."""


class PostcriticalOverlap(PolydynError):
    """Requested disc meets the tracked postcritical set."""
