"""Exception hierarchy shared by every module in the package."""


class AlphaProdError(ValueError):
    """Base class for contract violations raised by this package."""


# permutation algebra
class DegreeMismatch(AlphaProdError):
    pass


class MalformedPermutation(AlphaProdError):
    pass


class MalformedCycles(AlphaProdError):
    pass


class NotConjugate(AlphaProdError):
    pass


class NotConjugateInA(NotConjugate):
    """Same cycle type, but the class splits in the alternating group."""


class OddPermutation(AlphaProdError):
    pass


class PointOutOfRange(AlphaProdError):
    pass


# cycle rewriting
class OddGamma(OddPermutation):
    pass


class IdentityInput(AlphaProdError):
    pass


class DegreeTooSmall(AlphaProdError):
    pass


class DegreeNotTwoModFour(AlphaProdError):
    pass


class NotTranspositionProduct(AlphaProdError):
    pass


class TargetTooLarge(AlphaProdError):
    pass


class BadTargetShape(AlphaProdError):
    pass


class BadSourceShape(AlphaProdError):
    pass


class NoFreshPoints(AlphaProdError):
    pass


class UnsupportedTarget(AlphaProdError):
    pass


# vectors and maps
class IdentityElement(IdentityInput):
    pass


class LengthMismatch(AlphaProdError):
    pass


# branching programs / reductions
class MalformedProgram(AlphaProdError):
    pass


class BadShape(AlphaProdError):
    pass


# leakage harness
class BudgetExceeded(AlphaProdError):
    pass


class OutputTooWide(AlphaProdError):
    pass
