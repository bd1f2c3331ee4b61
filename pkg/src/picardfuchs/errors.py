"""Exception types shared across the package."""


class PicardFuchsError(Exception):
    """Base class for all package errors."""


class FieldMismatch(PicardFuchsError):
    """Operands live over different coefficient fields or rings."""


class DegreeOverflow(PicardFuchsError):
    """An exponent exceeds the packed monomial representation's capacity."""


class DegenerateEvaluation(PicardFuchsError):
    """A coefficient denominator vanishes at the chosen evaluation point."""


class NoDerivation(PicardFuchsError):
    """The coefficient field carries no derivation."""


class NotSquarefree(PicardFuchsError):
    """The univariate polynomial has a repeated root."""


class NotSmooth(PicardFuchsError):
    """The hypersurface is singular, so the smooth-case driver does not apply."""


class InsufficientTerms(PicardFuchsError):
    """Too few series terms to certify that an operator annihilates the series."""


class NoSolution(PicardFuchsError):
    """No rational function matches the given values at the given points."""


class NoReconstruction(PicardFuchsError):
    """Rational reconstruction failed; more primes are needed."""


class BudgetExceeded(PicardFuchsError):
    """A step, time or size budget was exhausted before the computation finished."""


class StepBudgetExceeded(BudgetExceeded):
    """Basis completion exceeded its pair-processing budget."""


class DimensionBudgetExceeded(BudgetExceeded):
    """A diagnostic routine was asked for a space above its dimension threshold."""


class InterpolationDegreeExceeded(PicardFuchsError):
    """Interpolation needs more evaluation points than were provided."""


class ModularDisagreement(PicardFuchsError):
    """Modular snapshots disagree persistently on the support structure."""


class ExpressionSyntaxError(PicardFuchsError):
    """Raised by the expression parser; carries line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownVariable(PicardFuchsError):
    """An expression refers to a variable not declared for this ring."""
