"""Exception hierarchy shared by every module."""


class ExcmError(Exception):
    """Base class for all library errors."""


class SingularBasisError(ExcmError):
    def __init__(self, msg="singular basis"):
        super().__init__(msg)


class NotSublatticeError(ExcmError):
    def __init__(self, msg="not a sublattice"):
        super().__init__(msg)


class BudgetExceeded(ExcmError):
    """A configured enumeration/iteration/precision budget ran out."""


class EnumerationBudgetExceeded(BudgetExceeded):
    def __init__(self, msg="enumeration budget exceeded"):
        super().__init__(msg)


class HeightBudgetExceeded(BudgetExceeded):
    def __init__(self, msg="height search budget exceeded"):
        super().__init__(msg)


class FormNotIntegralError(ExcmError):
    def __init__(self, msg="form not integral on sublattice"):
        super().__init__(msg)


class DegenerateFormError(ExcmError):
    """Raised for degenerate alternating forms; carries the offending Gram matrix."""

    def __init__(self, msg="degenerate form", gram=None):
        super().__init__(msg)
        self.gram = gram


class GluePreconditionError(ExcmError):
    """A hypothesis of the glue-discriminant lemma failed."""

    def __init__(self, hypothesis):
        super().__init__(hypothesis)
        self.hypothesis = hypothesis


class InternalConsistencyError(ExcmError):
    pass


class CompositumDegenerateError(ExcmError):
    def __init__(self, msg="compositum degenerate"):
        super().__init__(msg)


class PrecisionEscalationError(ExcmError):
    def __init__(self, msg="precision escalation"):
        super().__init__(msg)


class BoundaryAmbiguityError(ExcmError):
    """Reduction decision changed between working precisions."""

    def __init__(self, candidates):
        super().__init__("boundary ambiguity")
        self.candidates = candidates


class ReductionNotConvergedError(BudgetExceeded):
    """Iteration cap hit; ``result`` holds the best point and witness so far."""

    def __init__(self, result):
        super().__init__("reduction did not converge")
        self.result = result


class NotInGroupError(ExcmError):
    def __init__(self, msg="target not in group"):
        super().__init__(msg)


class FamilyTooSmallError(ExcmError):
    def __init__(self, msg="family too small"):
        super().__init__(msg)
