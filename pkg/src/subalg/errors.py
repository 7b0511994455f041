"""Exception hierarchy shared by every module.

Each leaf class carries a ``category`` used by the command line to pick an
exit code, so library code never needs to know about process exit status.
"""

from __future__ import annotations


class SubalgError(Exception):
    """Base class for all library errors."""

    category = "error"


# --- linear algebra -------------------------------------------------------

class Singular(SubalgError):
    category = "solver"


class SingularOnSubspace(Singular):
    pass


class NotDirectSum(SubalgError):
    category = "condition"


# --- solvers --------------------------------------------------------------

class SingularL(Singular):
    pass


class SingularOnJ(Singular):
    pass


class SingularResolvent(Singular):
    pass


class SingularCoupling(Singular):
    pass


class SingularFEJ(Singular):
    pass


class Divergent(SubalgError):
    category = "solver"


# --- algebra and reduction conditions -------------------------------------

class ConditionViolated(SubalgError):
    """A structural assumption of a construction does not hold.

    ``condition`` names the failed requirement in words, e.g.
    ``"H ∩ Ẽ = 0"``.
    """

    category = "condition"

    def __init__(self, message: str, condition: str = ""):
        super().__init__(message)
        self.condition = condition


class DimensionMismatch(ConditionViolated):
    pass


class SingularMap(ConditionViolated):
    pass


class PortMismatch(ConditionViolated):
    pass


class CouplingSingular(ConditionViolated):
    pass


class DegeneratePorts(ConditionViolated):
    pass


class NoInverse(ConditionViolated):
    pass


class SlotOutOfRange(ConditionViolated):
    pass


class PlugNotScalar(ConditionViolated):
    pass


class NotSubspaceOfU(ConditionViolated):
    pass


class SingularT(ConditionViolated):
    pass


class SingularG(ConditionViolated):
    pass


class AssumptionViolated(ConditionViolated):
    pass


class KindMismatch(SubalgError):
    category = "kind"


# --- rational functions ---------------------------------------------------

class ParseError(SubalgError):
    category = "parse"


class ExprSyntaxError(ParseError):
    """Malformed expression text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.expected = expected


class NotHomogenizable(ParseError):
    pass


class NotNormalizable(ParseError):
    pass


class PoleHit(SubalgError):
    category = "solver"


class RealizationFailed(SubalgError):
    category = "realization"


class NotPruned(ConditionViolated):
    pass


class UNotScalar(ConditionViolated):
    pass


class DegreeMismatch(ConditionViolated):
    pass


class NotExpressible(ConditionViolated):
    pass


class DegenerateQuadratic(SubalgError):
    category = "condition"


class DimensionConstraintViolated(ConditionViolated):
    pass


# --- hexagon plots --------------------------------------------------------

class ZeroComponent(SubalgError):
    category = "hexplot"


class HexPreconditionError(SubalgError):
    category = "hexplot"


class NotThreePhase(HexPreconditionError):
    pass


class NotScalarU(HexPreconditionError):
    pass
