"""Exception and warning types shared across the package."""


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested operation."""


class ContractError(ValueError):
    """A call violated an operation's precondition."""


class ConfigError(ValueError):
    """A configuration value is invalid or inconsistent."""


class NumericalError(ArithmeticError):
    """A computation produced non-finite values."""


class DegenerateBatchError(ValueError):
    """A batch has no usable pairwise structure (all tokens coincide)."""


class PlanError(ValueError):
    """An execution plan is infeasible for the given problem size."""


class StarvationWarning(UserWarning):
    """A superpixel received (numerically) no association mass."""
