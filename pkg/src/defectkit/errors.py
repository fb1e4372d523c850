"""Exception types shared across the package."""


class DefectkitError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(DefectkitError):
    """A dataset schema is malformed or two schemas do not line up."""


class CsvParseError(DefectkitError):
    """A CSV cell could not be parsed; the message names row and column."""


class DegenerateDataError(DefectkitError):
    """The data cannot support the requested operation (single class, no defects, ...)."""


class ConfigError(DefectkitError):
    """An experiment configuration is inconsistent or incomplete."""
