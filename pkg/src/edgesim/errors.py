"""Exception types shared across the package."""


class EdgesimError(ValueError):
    """Base class for every validation or configuration failure."""


class SchemaError(EdgesimError):
    """A document does not conform to its schema; the message names the field."""


class StructureError(EdgesimError):
    """A model graph is structurally invalid (cycle, dangling edge, bad order)."""


class ValidationError(EdgesimError):
    """A value violates a domain invariant."""


class ConfigurationError(EdgesimError):
    """A runtime configuration is incomplete or inconsistent."""


class GenerationError(EdgesimError):
    """A synthetic-suite spec cannot be satisfied."""
