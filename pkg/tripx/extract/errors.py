class ExtractionError(Exception):
    pass


class OverlappingSpans(ExtractionError, ValueError):
    pass


class SentenceTooLong(ExtractionError, ValueError):
    pass


class DimensionMismatch(ExtractionError, ValueError):
    pass


class LengthMismatch(ExtractionError, ValueError):
    pass


class ShapeMismatch(ExtractionError, ValueError):
    pass


class MissingRelation(ExtractionError, LookupError):
    pass


class DivergedLoss(ExtractionError, RuntimeError):
    pass


class ParseError(ExtractionError, ValueError):
    pass


class UnresolvableEntity(ExtractionError, LookupError):
    pass


class ConfigError(ExtractionError, ValueError):
    pass


class InfeasibleConfig(ConfigError):
    pass


class InfeasibleTagging(ExtractionError, ValueError):
    pass


class IdMismatch(ExtractionError, ValueError):
    pass


class MissingIntermediates(ExtractionError, LookupError):
    pass


class CheckpointError(ExtractionError, RuntimeError):
    pass
