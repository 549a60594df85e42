class ToolkitError(Exception):
    """Base class for errors raised by the toolkit."""


class DomainError(ToolkitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SpecFormatError(ToolkitError, ValueError):
    """Malformed function-spec document."""


class ConfigError(ToolkitError, ValueError):
    """Invalid run configuration, detected before any work starts."""


class ReplayVersionError(ToolkitError):
    pass


class GeneratorExhaustedError(ToolkitError):
    pass
