"""Exception hierarchy.

Anything deriving from :class:`DataError` is caused by the input files and
maps to CLI exit status 2.
"""


class ErasmusSNAError(Exception):
    """Base class for all package errors."""


class DataError(ErasmusSNAError):
    """Input data is missing, malformed or inconsistent."""


class SchemaError(DataError):
    """A schema map is invalid or does not match its source file."""


class UnclassifiedFieldError(DataError, ValueError):
    """A field-of-study label is not an ISCED-F 2013 broad field."""


class UnknownInstitutionError(DataError):
    """A flow endpoint is not part of the node universe."""


class ConflictingCountryError(DataError):
    """An institution is attributed to more than one country."""


class MissingYearError(DataError):
    """A year required by an analysis window has no data."""


class CountryNoIncomingSN(DataError):
    """The host country received no special-needs students."""


class UniversityNoIncoming(DataError):
    """The university received no students at all."""


class PopulationTableError(DataError):
    """Population table is malformed or cannot support a share."""


class GeoTableError(DataError):
    """Geographic institution table is malformed."""


class MetricDomainError(ErasmusSNAError, ValueError):
    """A metric was requested outside its domain (too few nodes or arcs)."""
