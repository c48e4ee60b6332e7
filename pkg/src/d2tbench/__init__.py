"""Reference-free benchmarking toolkit for data-to-text generation."""

from .corpus import (
    BenchmarkSet,
    CsvDocument,
    DataFormat,
    DataRecord,
    Domain,
    GenerationResult,
    load_benchmark,
    save_benchmark,
)
from .spans import CATEGORIES, ErrorCategory, ErrorSpan, SpanAnnotation

__version__ = "0.1.0"

__all__ = [
    "BenchmarkSet",
    "CATEGORIES",
    "CsvDocument",
    "DataFormat",
    "DataRecord",
    "Domain",
    "ErrorCategory",
    "ErrorSpan",
    "GenerationResult",
    "SpanAnnotation",
    "__version__",
    "load_benchmark",
    "save_benchmark",
]
