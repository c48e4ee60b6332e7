"""Error statistics and agreement analysis over span annotations.

The unit of analysis is one output text with the spans one source (an
automatic judge or a human annotator) assigned to it. Statistics aggregate
over outputs, words, categories, and domains; correlations compare two
sources on the same outputs at word, example, and domain granularity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import fsum, sqrt

from .corpus import GenerationResult, domain_of_example_id, Domain
from .errors import MetricsError, UndefinedStatisticError
from .spans import CATEGORIES, ErrorCategory, ErrorSpan, SpanAnnotation

_WORD_RE = re.compile(r"\S+")


@dataclass
class AnnotationSet:
    """Spans one source assigned to one output text."""

    example_id: str
    model_id: str
    domain: Domain
    source: str
    output_text: str
    spans: list[ErrorSpan] = field(default_factory=list)

    def count(self, category: ErrorCategory | None = None) -> int:
        if category is None:
            return len(self.spans)
        return sum(1 for span in self.spans if span.category is category)


def annotation_sets_from(
    results: list[GenerationResult],
    annotations: list[SpanAnnotation],
    source: str,
) -> list[AnnotationSet]:
    """Join outputs with their annotations on (example, model).

    Only matched pairs are kept: a judge that failed on some outputs simply
    contributes fewer sets.
    """
    texts = {(r.example_id, r.model_id): r.text for r in results}
    sets = []
    for annotation in annotations:
        key = (annotation.example_id, annotation.model_id)
        if key not in texts:
            continue
        sets.append(
            AnnotationSet(
                example_id=annotation.example_id,
                model_id=annotation.model_id,
                domain=domain_of_example_id(annotation.example_id),
                source=source,
                output_text=texts[key],
                spans=list(annotation.spans),
            )
        )
    return sets


def words_of(text: str) -> list[tuple[int, int]]:
    """Word boundaries as character ranges; words are maximal non-space runs."""
    return [match.span() for match in _WORD_RE.finditer(text)]


def word_flags(aset: AnnotationSet, category: ErrorCategory | None = None) -> list[bool]:
    """Per-word indicator: does any (matching) span overlap the word?"""
    spans = [s for s in aset.spans if category is None or s.category is category]
    return [
        any(span.overlaps(start, end) for span in spans) for start, end in words_of(aset.output_text)
    ]


def avg_errors_per_output(sets: list[AnnotationSet], category: ErrorCategory | None = None) -> float:
    if not sets:
        raise UndefinedStatisticError("no outputs to average over")
    return fsum(aset.count(category) for aset in sets) / len(sets)


def pct_outputs_with_error(
    sets: list[AnnotationSet], category: ErrorCategory | None = None
) -> float:
    if not sets:
        raise UndefinedStatisticError("no outputs to average over")
    return sum(1 for aset in sets if aset.count(category) > 0) / len(sets) * 100.0


def pct_words_erroneous(sets: list[AnnotationSet], category: ErrorCategory | None = None) -> float:
    flagged = 0
    total = 0
    for aset in sets:
        flags = word_flags(aset, category)
        flagged += sum(flags)
        total += len(flags)
    if total == 0:
        raise UndefinedStatisticError("no words to average over")
    return flagged / total * 100.0


def pct_words_erroneous_both(
    pairs: list[tuple[AnnotationSet, AnnotationSet]],
    category: ErrorCategory | None = None,
) -> float:
    """Share of words flagged by both sources of a pair.

    For a specific category both sources must mark the word with that same
    category; without one, any overlap on the word counts.
    """
    flagged = 0
    total = 0
    for a, b in pairs:
        for fa, fb in zip(word_flags(a, category), word_flags(b, category)):
            flagged += fa and fb
            total += 1
    if total == 0:
        raise UndefinedStatisticError("no words to average over")
    return flagged / total * 100.0


def pearson(xs: list[float], ys: list[float]) -> float:
    """Pearson correlation coefficient, computed in plain Python.

    Undefined for fewer than two pairs or when either series is constant.
    """
    if len(xs) != len(ys):
        raise MetricsError(f"paired series differ in length: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise UndefinedStatisticError("need at least two pairs")
    mean_x = fsum(xs) / n
    mean_y = fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    sxx = fsum(d * d for d in dx)
    syy = fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedStatisticError("constant series has no defined correlation")
    return fsum(a * b for a, b in zip(dx, dy)) / sqrt(sxx * syy)


def pair_annotations(
    a_sets: list[AnnotationSet], b_sets: list[AnnotationSet]
) -> list[tuple[AnnotationSet, AnnotationSet]]:
    """Match two sources on (example, model), keeping the intersection.

    Both sides must agree on the output text, otherwise the comparison
    would be between different strings.
    """
    b_by_key = {(aset.example_id, aset.model_id): aset for aset in b_sets}
    pairs = []
    for a in a_sets:
        b = b_by_key.get((a.example_id, a.model_id))
        if b is None:
            continue
        if a.output_text != b.output_text:
            raise MetricsError(
                f"sources disagree on the output text of {a.example_id}/{a.model_id}"
            )
        pairs.append((a, b))
    return pairs


@dataclass(frozen=True)
class CorrelationTriple:
    word: float
    example: float
    domain: float


def correlation_levels(
    pairs: list[tuple[AnnotationSet, AnnotationSet]],
    category: ErrorCategory | None = None,
) -> CorrelationTriple:
    """Correlation between two sources at word, example, and domain level.

    With a category only that category's spans count. Without one, the
    per-category series are concatenated, treating each (observation,
    category) combination as its own paired sample.
    """
    categories = [category] if category is not None else list(CATEGORIES)

    word_a: list[float] = []
    word_b: list[float] = []
    example_a: list[float] = []
    example_b: list[float] = []
    domain_a: list[float] = []
    domain_b: list[float] = []

    for cat in categories:
        per_domain: dict[Domain, tuple[list[int], list[int]]] = {}
        for a, b in pairs:
            word_a.extend(map(float, word_flags(a, cat)))
            word_b.extend(map(float, word_flags(b, cat)))
            example_a.append(float(a.count(cat)))
            example_b.append(float(b.count(cat)))
            counts = per_domain.setdefault(a.domain, ([], []))
            counts[0].append(a.count(cat))
            counts[1].append(b.count(cat))
        for domain in sorted(per_domain, key=lambda d: d.value):
            counts_a, counts_b = per_domain[domain]
            domain_a.append(fsum(counts_a) / len(counts_a))
            domain_b.append(fsum(counts_b) / len(counts_b))

    return CorrelationTriple(
        word=pearson(word_a, word_b),
        example=pearson(example_a, example_b),
        domain=pearson(domain_a, domain_b),
    )


def mean_correlation_levels(
    pairs: list[tuple[AnnotationSet, AnnotationSet]]
) -> CorrelationTriple:
    """Per-category correlations averaged over categories.

    Propagates UndefinedStatisticError when any single category is constant
    for either source; the concatenating variant is the robust default.
    """
    triples = [correlation_levels(pairs, category=cat) for cat in CATEGORIES]
    n = len(triples)
    return CorrelationTriple(
        word=fsum(t.word for t in triples) / n,
        example=fsum(t.example for t in triples) / n,
        domain=fsum(t.domain for t in triples) / n,
    )


def compare_judges(
    candidates: dict[str, list[AnnotationSet]], reference: list[AnnotationSet]
) -> dict[str, CorrelationTriple]:
    """Correlate each candidate source against a reference source."""
    return {
        name: correlation_levels(pair_annotations(sets, reference))
        for name, sets in candidates.items()
    }


def token_count_stats(results: list[GenerationResult]) -> dict:
    counts = [result.token_count for result in results]
    if not counts:
        raise UndefinedStatisticError("no results")
    return {
        "count": len(counts),
        "mean": fsum(counts) / len(counts),
        "min": min(counts),
        "max": max(counts),
    }


def by_model(sets: list[AnnotationSet]) -> dict[str, list[AnnotationSet]]:
    grouped: dict[str, list[AnnotationSet]] = {}
    for aset in sets:
        grouped.setdefault(aset.model_id, []).append(aset)
    return grouped


def by_domain(sets: list[AnnotationSet]) -> dict[Domain, list[AnnotationSet]]:
    grouped: dict[Domain, list[AnnotationSet]] = {}
    for aset in sets:
        grouped.setdefault(aset.domain, []).append(aset)
    return grouped


def format_table(title: str, headers: list[str], rows: list[list]) -> str:
    """Fixed-width text table; floats are shown with two decimals."""

    def cell(value) -> str:
        if isinstance(value, float):
            return f"{value:.2f}"
        return str(value)

    grid = [headers] + [[cell(value) for value in row] for row in rows]
    widths = [max(len(row[i]) for row in grid) for i in range(len(headers))]
    lines = [title, ""]
    for index, row in enumerate(grid):
        lines.append("  ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)


def errors_per_output_table(sets: list[AnnotationSet], title: str = "Errors per output") -> str:
    headers = ["model"] + [cat.display_name for cat in CATEGORIES] + ["Total"]
    rows = []
    for model, model_sets in sorted(by_model(sets).items()):
        row: list = [model]
        row.extend(avg_errors_per_output(model_sets, cat) for cat in CATEGORIES)
        row.append(avg_errors_per_output(model_sets))
        rows.append(row)
    return format_table(title, headers, rows)


def outputs_with_error_table(
    sets: list[AnnotationSet], title: str = "Outputs with at least one error (%)"
) -> str:
    headers = ["model"] + [cat.display_name for cat in CATEGORIES] + ["Total"]
    rows = []
    for model, model_sets in sorted(by_model(sets).items()):
        row: list = [model]
        row.extend(pct_outputs_with_error(model_sets, cat) for cat in CATEGORIES)
        row.append(pct_outputs_with_error(model_sets))
        rows.append(row)
    return format_table(title, headers, rows)


def word_error_table(
    a_sets: list[AnnotationSet],
    b_sets: list[AnnotationSet] | None = None,
    a_label: str = "judge",
    b_label: str = "human",
    title: str = "Words marked erroneous (%)",
) -> str:
    """Word-level error rates per category, with the overlap column when a
    second source is given."""
    if b_sets is None:
        headers = ["category", a_label]
        rows: list[list] = [
            [cat.display_name, pct_words_erroneous(a_sets, cat)] for cat in CATEGORIES
        ]
        rows.append(["Total", pct_words_erroneous(a_sets)])
        return format_table(title, headers, rows)

    pairs = pair_annotations(a_sets, b_sets)
    headers = ["category", a_label, b_label, "both"]
    rows = []
    for cat in CATEGORIES:
        rows.append(
            [
                cat.display_name,
                pct_words_erroneous([a for a, _ in pairs], cat),
                pct_words_erroneous([b for _, b in pairs], cat),
                pct_words_erroneous_both(pairs, cat),
            ]
        )
    rows.append(
        [
            "Total",
            pct_words_erroneous([a for a, _ in pairs]),
            pct_words_erroneous([b for _, b in pairs]),
            pct_words_erroneous_both(pairs),
        ]
    )
    return format_table(title, headers, rows)
