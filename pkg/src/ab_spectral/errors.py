"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematically supported domain."""


class SeriesDomainError(DomainError):
    """Series argument exceeds the configured |zeta| bound."""


class ConfigurationError(ValueError):
    """A problem description (flux, channels, theta table) is inconsistent."""


class ContractError(TypeError):
    """A required capability (e.g. an analytic derivative) is missing."""
