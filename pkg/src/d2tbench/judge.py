"""Automatic span-level error annotation of generated outputs.

A judge model receives the serialized input data and the generated text and
returns error mentions as JSON; the mentions are then aligned back onto the
text as character spans. Judging one output never raises: failures are
recorded on the report so a long run keeps going.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .corpus import BenchmarkSet, DataRecord, GenerationResult, serialize_content
from .errors import GenerationError, JudgeError, JudgeParseError, JudgeSchemaError
from .generator import ChatClient, fill_template
from .spans import ErrorCategory, ErrorSpan, SpanAnnotation, save_annotations

log = logging.getLogger(__name__)

JUDGE_SYSTEM_MESSAGE = (
    "You are an expert data-to-text error annotation system. You undestand "
    "structured data and you can correcly operate with units and numerical "
    "values. You are designed to output token-level annotations in JSON."
)

JUDGE_PROMPT_TEMPLATE = "\n".join(
    [
        "Given the data:",
        "",
        "```",
        "",
        "{data}",
        "",
        "```",
        "",
        "Annotate all the errors in the following text:",
        "",
        "```",
        "",
        "{text}",
        "",
        "```",
        "",
        'Output the errors as a JSON list "errors" in which each object contains fields  '
        '"reason", "text", and "type". The value of "text" is the text of the error. The '
        'value of "reason" is the reason for the error. The value of "type" is one of '
        "{0, 1, 2, 3} based on the following list:",
        "",
        "- 0: Incorrect fact: The fact in the text contradicts the data.",
        "",
        "- 1: Not checkable: The fact in the text cannot be checked in the data.",
        "",
        "- 2: Misleading: The fact in the text is misleading in the given context.",
        "",
        "- 3: Other: The text is problematic for another reason, e.g. grammatically or "
        "stylistically incorrect, irrelevant, or repetitive.",
        "",
        "",
        "",
        "The list should be sorted by the position of the error in the text.",
        "",
        "",
        "",
        "*Example:*",
        "",
        "data:",
        "",
        "```",
        "",
        '[ [ "Aditi Bhagwat", "occupation", "television actor" ], [ "Aditi Bhagwat", '
        '"date of birth", "18 January 1981" ] ]',
        "",
        "```",
        "",
        "text:",
        "",
        "```",
        "",
        "Aditi Bhagwat, born on January 18, 1991, used to be a popular Indian television "
        "actor. The data comes from a knowledge graph.",
        "",
        "```",
        "",
        "output:",
        "",
        '```{ "errors": [{"reason": "The data mentions that the actor was born on 1981", '
        '"text": "1991", "type": 0}, {"reason": "Misleadingly suggests that the actor is '
        'not alive", "text": "used to be", type: 2}, {"reason": "Popularity is not '
        'mentioned in the data", "text": "popular", type: 1}, {"reason", "Nationality is '
        'not mentioned in the data", "text": "Indian", type: 1}, {"reason": "The note is '
        'superfluous", "text": "The data comes from a knowledge graph.", type: 3}] }',
        "",
        "```",
        "",
        "Note that some details may not be mentioned in the text: do not count omissions "
        "as errors. Also do not be too strict: some facts can be less specific than in "
        "the data (rounded values, shortened or abbreviated text, etc.), do not count "
        'these as errors. If there are no errors in the text, "errors" will be an empty list.',
    ]
)


@dataclass(frozen=True)
class JudgeAnnotation:
    """One error mention as reported by the judge, before alignment."""

    reason: str
    text: str
    category: ErrorCategory


@dataclass(frozen=True)
class JudgeConfig:
    temperature: float = 0.0
    top_p: float = 1.0
    max_tokens: int = 1024
    seed: int | None = None
    whitespace_retry: bool = False


def build_judge_prompt(data_text: str, output_text: str) -> tuple[str, str]:
    """Return the (system, user) message pair for judging one output."""
    user = fill_template(JUDGE_PROMPT_TEMPLATE, {"data": data_text, "text": output_text})
    return JUDGE_SYSTEM_MESSAGE, user


def parse_judge_response(payload: str | dict) -> list[JudgeAnnotation]:
    """Parse the judge's JSON reply into annotations, strictly.

    Accepts the raw reply string or an already-decoded object. A missing
    field, wrong type, or unknown category code raises with the offending
    list index named; lenient repair would hide judge drift.
    """
    if isinstance(payload, str):
        try:
            document = json.loads(payload)
        except ValueError as exc:
            raise JudgeParseError(f"reply is not valid JSON: {exc}") from exc
    else:
        document = payload
    if not isinstance(document, dict):
        raise JudgeParseError("reply is not a JSON object")
    if "errors" not in document:
        raise JudgeSchemaError('reply lacks the "errors" list')
    errors = document["errors"]
    if not isinstance(errors, list):
        raise JudgeSchemaError('"errors" is not a list')

    annotations = []
    for index, item in enumerate(errors):
        if not isinstance(item, dict):
            raise JudgeSchemaError("entry is not an object", index=index)
        text = item.get("text")
        if not isinstance(text, str) or not text:
            raise JudgeSchemaError('"text" must be a non-empty string', index=index)
        reason = item.get("reason")
        if not isinstance(reason, str):
            raise JudgeSchemaError('"reason" must be a string', index=index)
        code = item.get("type")
        if isinstance(code, bool) or not isinstance(code, int) or code not in (0, 1, 2, 3):
            raise JudgeSchemaError(f'"type" must be one of 0..3, got {code!r}', index=index)
        annotations.append(JudgeAnnotation(reason=reason, text=text, category=ErrorCategory(code)))
    return annotations


def _locate(text: str, needle: str, cursor: int, whitespace_retry: bool):
    position = text.find(needle, cursor)
    if position >= 0:
        return position, position + len(needle), "monotonic"
    position = text.find(needle)
    if position >= 0:
        return position, position + len(needle), "fallback"
    if whitespace_retry and needle.split():
        pattern = re.compile(r"\s+".join(re.escape(part) for part in needle.split()))
        match = pattern.search(text, cursor) or pattern.search(text)
        if match:
            return match.start(), match.end(), "whitespace"
    return -1, -1, ""


def align_spans(
    text: str, annotations: list[JudgeAnnotation], whitespace_retry: bool = False
) -> tuple[list[ErrorSpan], list[dict]]:
    """Locate each reported error text inside the output.

    Matching is monotonic: the search resumes where the last match ended,
    so a repeated word binds to successive occurrences. A miss falls back
    to one search from the start of the text; when that also misses, the
    annotation lands in the failure list untouched.

    With ``whitespace_retry`` a final attempt matches with whitespace runs
    collapsed. The matched slice then may differ from the reported text in
    whitespace, so the flag is off by default to keep the guarantee that
    every span slices back to exactly what the judge wrote.
    """
    spans: list[ErrorSpan] = []
    failures: list[dict] = []
    cursor = 0
    for annotation in annotations:
        start, end, via = _locate(text, annotation.text, cursor, whitespace_retry)
        if start < 0:
            failures.append(
                {
                    "reason": annotation.reason,
                    "text": annotation.text,
                    "category": annotation.category.code,
                }
            )
            continue
        spans.append(
            ErrorSpan(
                start=start,
                end=end,
                category=annotation.category,
                reason=annotation.reason,
                aligned_via=via,
            )
        )
        cursor = end
    return spans, failures


@dataclass
class JudgeReport:
    """Aligned spans for one output, plus whatever could not be aligned."""

    example_id: str
    model_id: str
    spans: list[ErrorSpan] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    raw_response: str = ""
    judge_failed: bool = False
    error: str | None = None

    def to_annotation(self) -> SpanAnnotation:
        return SpanAnnotation(
            example_id=self.example_id,
            model_id=self.model_id,
            spans=list(self.spans),
            failures=list(self.failures),
        )


def judge_example(
    record: DataRecord,
    result: GenerationResult,
    client: ChatClient,
    config: JudgeConfig = JudgeConfig(),
) -> JudgeReport:
    system, user = build_judge_prompt(
        serialize_content(record.format, record.content), result.text
    )
    messages = [
        {"role": "system", "content": system},
        {"role": "user", "content": user},
    ]
    try:
        response = client.complete(
            messages,
            temperature=config.temperature,
            top_p=config.top_p,
            max_tokens=config.max_tokens,
            seed=config.seed,
            response_format={"type": "json_object"},
        )
        annotations = parse_judge_response(response.content)
    except (GenerationError, JudgeError) as exc:
        log.warning("judging failed for %s: %s", result.example_id, exc)
        return JudgeReport(
            example_id=result.example_id,
            model_id=result.model_id,
            judge_failed=True,
            error=str(exc),
        )
    spans, failures = align_spans(result.text, annotations, config.whitespace_retry)
    spans.sort(key=lambda span: (span.start, span.end))
    return JudgeReport(
        example_id=result.example_id,
        model_id=result.model_id,
        spans=spans,
        failures=failures,
        raw_response=response.content,
    )


def judge_results(
    records,
    results: list[GenerationResult],
    client: ChatClient,
    config: JudgeConfig | None = None,
    max_workers: int = 4,
) -> list[JudgeReport]:
    """Judge every result in parallel, ordered by (model, example)."""
    if isinstance(records, BenchmarkSet):
        records = {record.id: record for record in records.records}
    config = config or JudgeConfig()

    def one(result: GenerationResult) -> JudgeReport:
        return judge_example(records[result.example_id], result, client, config)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        reports = list(pool.map(one, results))
    return sorted(reports, key=lambda report: (report.model_id, report.example_id))


def save_judge_reports(path, reports: list[JudgeReport]) -> int:
    """Write aligned annotations as JSONL, returning how many were written.

    Failed judgings are withheld rather than masquerading as error-free
    outputs.
    """
    good = [report.to_annotation() for report in reports if not report.judge_failed]
    save_annotations(path, good)
    return len(good)
