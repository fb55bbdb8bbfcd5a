"""Exception types shared across the toolkit."""


class EmbkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(EmbkitError):
    """Invalid or inconsistent configuration."""


class CorpusDecodeError(EmbkitError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, message: str, path: str | None = None, offset: int | None = None):
        super().__init__(message)
        self.path = path
        self.offset = offset


class ParseError(EmbkitError):
    """A structured file does not match its format."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class SerializationError(EmbkitError):
    """Data cannot be represented in the requested output format."""


class IntegrityError(EmbkitError):
    """An artifact does not match the vocabulary it was built against."""


class TrainingError(EmbkitError):
    """Training preconditions violated (empty corpus, empty store, ...)."""


class DivergenceError(TrainingError):
    """Non-finite parameters detected during training."""

    def __init__(self, message: str, epoch: int | None = None):
        super().__init__(message)
        self.epoch = epoch


class StructureError(EmbkitError):
    """A derived structure (e.g. a binary code tree) cannot be built."""


class DomainError(EmbkitError):
    """A numeric argument is outside the mathematical domain."""


class WordNotFoundError(EmbkitError):
    """A query word has no representable vector."""


class UndefinedSimilarityError(EmbkitError):
    """Cosine similarity is undefined (zero vector)."""


class UndefinedCorrelationError(EmbkitError):
    """Rank correlation is undefined (constant input)."""


class EmptyReportError(EmbkitError):
    """No evaluable items remain after filtering."""
