"""Exception types shared across the package."""


class DomainError(ValueError):
    """A disc parameter lies outside the allowed radius."""


class DimensionError(ValueError):
    """Operands are sampled on incompatible grids."""


class ContractError(ValueError):
    """An input violates an operation's precondition."""


class SchemaError(ValueError):
    """A persisted file has an unknown or incompatible schema."""
