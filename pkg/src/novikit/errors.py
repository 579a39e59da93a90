"""Exception hierarchy.

Every failure mode named by an operation contract gets its own class so
callers (and the CLI exit-code mapping) can dispatch on type.  ParseError
family maps to exit code 2, precision failures to 3, budget failures to 4.
"""


class NovikitError(Exception):
    """Base class for all library errors."""


# -- input / parsing ---------------------------------------------------------

class ParseError(NovikitError):
    pass


class Unbounded(NovikitError):
    pass


class NotFullDimensional(NovikitError):
    pass


class NotInterior(NovikitError):
    pass


# -- field arithmetic --------------------------------------------------------

class FieldMismatch(NovikitError):
    pass


class DenominatorDivisibleByP(NovikitError):
    pass


class ReduciblePolynomial(NovikitError):
    pass


class FieldBudgetExceeded(NovikitError):
    pass


# -- series ------------------------------------------------------------------

class NotInvertible(NovikitError):
    pass


class IndeterminateValuation(NovikitError):
    pass


class PrecisionInsufficient(NovikitError):
    pass


# -- critical point solving --------------------------------------------------

class JacobianDegenerateAtLeadingOrder(NovikitError):
    pass


class BoundaryCase(NovikitError):
    pass


class SearchExhausted(NovikitError):
    pass


# -- algebra -----------------------------------------------------------------

class RepeatedEigenvalue(NovikitError):
    pass


class ZeroEigenvalue(NovikitError):
    pass


class DiscriminantZeroToPrecision(NovikitError):
    pass


class PrimeTooSmall(NovikitError):
    pass


class IterationDiverged(NovikitError):
    pass


class DegenerateForm(NovikitError):
    pass


# -- filtered complexes ------------------------------------------------------

class ComplexViolation(NovikitError):
    """validate() found a broken axiom; message carries the witness."""


class NotClosed(NovikitError):
    pass


# -- Tate --------------------------------------------------------------------

class WindowTooSmall(NovikitError):
    pass


# -- certificates ------------------------------------------------------------

class CertificateError(NovikitError):
    """An invariant the theory guarantees failed to verify (bug-level)."""
