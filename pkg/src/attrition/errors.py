"""Exception types shared across the package."""


class AttritionError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(AttritionError):
    """Schema config is invalid or the data does not match it."""


class DataError(AttritionError):
    """Input rows or values could not be used."""


class ModelError(AttritionError):
    """Model artifact is missing, corrupt, or incompatible."""
