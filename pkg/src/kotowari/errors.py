"""Exception types shared across the package."""


class KotowariError(Exception):
    """Base class for all errors raised by this package."""


class SourceParseError(KotowariError):
    """A dictionary source file could not be parsed.

    Carries the source name (when known) and a 1-based line number so the
    offending line can be reported to the user.
    """

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        prefix = ""
        if source is not None:
            prefix += f"{source}:"
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class ValidationError(KotowariError):
    """Cross-validation between dictionary sources failed."""


class DictionaryFormatError(KotowariError):
    """A compiled dictionary file is missing, malformed, or incompatible."""


class SchemaError(KotowariError):
    """A feature role was requested that the dictionary schema does not define."""


class TemplateError(KotowariError):
    """An output format template contains an unknown or malformed directive."""
