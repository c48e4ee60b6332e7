"""Shared exception types for the benchmark toolkit."""


class BenchmarkError(Exception):
    """Base class for all toolkit errors."""


class CorpusError(BenchmarkError):
    pass


class RecordParseError(CorpusError):
    """A single on-disk record could not be parsed."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ManifestError(CorpusError):
    """Manifest counts disagree with the files actually present."""


class BenchmarkLoadError(CorpusError):
    """One or more record files failed to load.

    Carries the successfully loaded remainder in ``partial`` so callers can
    inspect or salvage the valid records.
    """

    def __init__(self, file_errors, partial):
        paths = ", ".join(path for path, _ in file_errors)
        super().__init__(f"failed to load {len(file_errors)} record file(s): {paths}")
        self.file_errors = file_errors
        self.partial = partial


class CollectorError(BenchmarkError):
    pass


class SourceError(CollectorError):
    pass


class AuthenticationError(CollectorError):
    pass


class RateLimitError(CollectorError):
    pass


class SpecError(CollectorError):
    """A series/entity spec references something the source does not have."""


class SamplingError(CollectorError):
    pass


class PreprocessError(BenchmarkError):
    pass


class BudgetError(PreprocessError):
    """Token budget unreachable even at minimum density."""


class GenerationError(BenchmarkError):
    def __init__(self, message: str, example_id: str | None = None):
        super().__init__(message if example_id is None else f"{example_id}: {message}")
        self.example_id = example_id


class JudgeError(BenchmarkError):
    pass


class JudgeParseError(JudgeError):
    """Judge response body is not a well-formed document."""


class JudgeSchemaError(JudgeError):
    """Judge response parsed but violates the error-list schema."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"errors[{index}]: {message}")
        self.index = index


class AnnotationError(BenchmarkError):
    pass


class ConfigurationError(AnnotationError):
    pass


class ExhaustionError(AnnotationError):
    """No batch left to assign."""


class SubmissionError(AnnotationError):
    """A submitted annotation failed validation."""


class WorkflowError(AnnotationError):
    """An action attempted out of order, e.g. finalizing an incomplete batch."""


class MetricsError(BenchmarkError):
    pass


class UndefinedStatisticError(MetricsError):
    """A statistic has no defined value for the given input."""
