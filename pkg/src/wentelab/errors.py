class ParameterError(ValueError):
    """Invalid sizes, levels or parameters."""


class EvaluationError(ValueError):
    """A sampled expression produced a non-finite value at a grid node."""


class SolverError(RuntimeError):
    """The radial mode system could not be solved."""


class DegenerateInputError(ValueError):
    """A norm quotient has a vanishing denominator."""
