"""Semantic exception hierarchy shared by all katolab modules."""


class KatolabError(Exception):
    """Base class for every error raised by this package."""


# --- quadrature ---

class NonConvergence(KatolabError):
    """Requested tolerance not reached within the evaluation budget."""


class IntegralDiverges(NonConvergence):
    """Refinement grows without bound; the integral is not finite."""


class NonFiniteIntegrand(KatolabError):
    """Integrand returned inf/nan at a node strictly inside the interval."""


class DiagonalDivergence(KatolabError):
    """Band refinement around the diagonal shows non-integrable growth."""


class NonFiniteSample(KatolabError):
    """A Monte Carlo sample evaluated to a non-finite value."""


class InsufficientData(KatolabError):
    """Not enough points for the requested extrapolation order."""


class Oscillation(KatolabError):
    """Extrapolation residuals are not decreasing; limit looks divergent."""


# --- geometry ---

class OutsideDomain(KatolabError):
    """Point does not belong to the domain."""


class DegenerateJacobian(KatolabError):
    """A map Jacobian eigenvalue is not strictly positive."""


class EmptyGap(KatolabError):
    """Nested pair clearance is numerically <= 0."""


# --- kernels ---

class CoincidentPoints(KatolabError):
    """Kernel evaluated on the diagonal x == y."""


class CoincidentRadii(KatolabError):
    """Reduced radial kernel evaluated at r == s."""


class NonPositiveDistance(KatolabError):
    """Boundary-distance weight needs rho in (0, 1]."""


# --- energy ---

class DivergentNorm(KatolabError):
    """Weighted norm refinement grows without bound."""


# --- lower-bound machinery ---

class ViolationFound(KatolabError):
    """A pointwise inequality check failed; implementation bug or inflated constant."""


class InvalidGrid(KatolabError):
    """Evaluation grid is empty or outside the admissible region."""


# --- verification campaigns ---

class SupportViolation(KatolabError):
    """Function support is not contained in the required subdomain."""


class EmptyFunction(KatolabError):
    """Function is numerically zero; the Rayleigh ratio is undefined."""


class SanityGateViolation(KatolabError):
    """Observed ratio below the chain constant beyond 3 sigma; fails the build."""


# --- spec grammar / CLI ---

class SpecError(KatolabError):
    """Base for function/domain specification errors."""


class SpecSyntaxError(SpecError):
    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at offset {position}{suffix}")


class UnknownFamily(SpecError):
    """Spec name not present in the registered family tables."""


class BadArity(SpecError):
    """Unknown, repeated, or missing keys for a registered family."""
