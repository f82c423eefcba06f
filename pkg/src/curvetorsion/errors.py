"""Exception hierarchy shared by all curvetorsion modules."""


class CurveTorsionError(Exception):
    """Base class for all errors raised by this package."""


# --- power series errors ---

class NotAUnit(CurveTorsionError):
    """Inversion was requested for a series of positive or unknown order."""


class BadConstantTerm(CurveTorsionError):
    """n-th root extraction needs constant coefficient exactly 1."""


class OrderZeroInner(CurveTorsionError):
    """Substitution g must satisfy ord(g) >= 1."""


# --- curve algebra errors ---

class NotACurve(CurveTorsionError):
    """Generator list does not describe a branch with normalization k[[t]]."""


class PrecisionExhausted(CurveTorsionError):
    """No conductor (or no stable answer) was found below the precision cap."""


class NotAMember(CurveTorsionError):
    """Subalgebra / ideal membership reduction left a visible residue."""


class ConstraintInfeasible(CurveTorsionError):
    """A witness with the requested support constraint does not exist."""


# --- differentials errors ---

class RankDeficient(CurveTorsionError):
    """Jacobian matrix rank differs from ambient rank - 1 at this truncation."""


class Unstable(CurveTorsionError):
    """A truncated length kept changing up to the truncation cap."""


class NotMonomial(CurveTorsionError):
    """Operation requires generators that are pure powers of t."""


# --- transform errors ---

class ConductorNotInMSquared(CurveTorsionError):
    """The transform needs the conductor inside the square of the maximal ideal."""


class WitnessNotInConductor(CurveTorsionError):
    """A product witness evaluated below the conductor exponent."""


# --- pullback errors ---

class UnitTRow(CurveTorsionError):
    """A torsion element carries a unit coefficient in an adjoined-generator row."""
