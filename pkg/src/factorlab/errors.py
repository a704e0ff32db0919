"""Exception hierarchy shared by all factorlab modules."""


class FactorlabError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(FactorlabError):
    pass


class DegreeMismatch(FactorlabError):
    pass


class IndexOutOfRange(FactorlabError):
    pass


class ExpansionTooLarge(FactorlabError):
    pass


class InvalidExponent(FactorlabError):
    pass


class InvalidArgs(FactorlabError):
    pass


class SupportOverlap(FactorlabError):
    pass


class NotNormalized(FactorlabError):
    pass


class ExactFormUnavailable(FactorlabError):
    pass


class DimensionTooSmall(FactorlabError):
    pass
