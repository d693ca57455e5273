class CredscoreError(ValueError):
    """Base class for every hard error raised by the pipeline."""


class ConfigError(CredscoreError):
    pass


class IngestError(CredscoreError):
    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class PriceDataError(CredscoreError):
    def __init__(self, message: str, *, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


class TickerDictionaryError(CredscoreError):
    pass


class EmptyTextError(CredscoreError):
    pass


class VocabularyError(CredscoreError):
    pass


class LexiconError(CredscoreError):
    pass


class ModelError(CredscoreError):
    pass


class ExplanationError(CredscoreError):
    pass
