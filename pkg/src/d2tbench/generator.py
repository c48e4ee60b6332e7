"""Prompt construction and chat-completion generation.

The user prompt embeds the serialized data record; the model is steered into
a plain single-paragraph answer by an assistant prefix ending with an opening
quote, and the parser strips the closing quote from the completion.
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

from .corpus import DataRecord, GenerationResult, serialize_content
from .errors import GenerationError
from .preprocess import estimate_tokens

log = logging.getLogger(__name__)

PROMPT_TEMPLATE = (
    "Based on the given data:\n"
    "\n"
    "```\n"
    "\n"
    "{data}\n"
    "\n"
    "```\n"
    "\n"
    "Your task is to write a brief, fluent, and\n"
    "coherent single-paragraph {output_type} in natural\n"
    "language. The text should be balanced and neutral.\n"
    "Make sure that all the facts mentioned in the text\n"
    "can be derived from the input data, do *not* add\n"
    "any extra information."
)

OUTPUT_PREFIX_TEMPLATE = 'Sure! Here is the {output_type}:\n\n"'

_SLOT_RE = re.compile(r"\{(data|output_type|text)\}")

DETERMINISTIC = "deterministic"
SAMPLING = "sampling"

PREFILL = "prefill"
CONCAT = "concat"

RETRYABLE_STATUSES = (429, 500, 502, 503, 504)


def fill_template(template: str, values: dict[str, str]) -> str:
    """Substitute ``{slot}`` markers in a single pass.

    Substituted values are never rescanned, and braces outside the known
    slot names stay literal.
    """
    return _SLOT_RE.sub(lambda match: values[match.group(1)], template)


def build_prompt(record: DataRecord) -> tuple[str, str]:
    """Return the user prompt and the assistant output prefix for a record."""
    values = {
        "data": serialize_content(record.format, record.content),
        "output_type": record.domain.output_type,
    }
    return fill_template(PROMPT_TEMPLATE, values), fill_template(OUTPUT_PREFIX_TEMPLATE, values)


@dataclass(frozen=True)
class GenerationConfig:
    """Decoding settings; sampling knobs only reach the wire in sampling mode."""

    mode: str = DETERMINISTIC
    temperature: float = 0.7
    top_p: float = 0.9
    top_k: int = 20
    max_new_tokens: int = 512
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in (DETERMINISTIC, SAMPLING):
            raise ValueError(f"unknown decoding mode {self.mode!r}")

    def wire_sampling(self) -> tuple[float, float]:
        if self.mode == DETERMINISTIC:
            return 0.0, 1.0
        return self.temperature, self.top_p


@dataclass
class ModelEndpoint:
    """Where and how to reach one model behind a chat-completions API.

    ``prefix_mode`` selects how the output prefix is applied: "prefill"
    sends it as a partial assistant turn, "concat" folds it into the user
    message for backends that reject assistant prefills.
    """

    base_url: str
    model_id: str
    api_key: str | None = None
    timeout: float = 120.0
    supports_seed: bool = True
    prefix_mode: str = PREFILL

    @property
    def chat_url(self) -> str:
        return self.base_url.rstrip("/") + "/chat/completions"


def decoding_snapshot(config: GenerationConfig, endpoint: ModelEndpoint) -> dict:
    """Record the decoding parameters as actually applied.

    top_k has no slot in the wire schema, so it is snapshot-only and None
    outside sampling mode; a seed the backend cannot honor is recorded as
    "unsupported" rather than silently dropped.
    """
    temperature, top_p = config.wire_sampling()
    snapshot = {
        "mode": config.mode,
        "temperature": temperature,
        "top_p": top_p,
        "top_k": config.top_k if config.mode == SAMPLING else None,
        "max_new_tokens": config.max_new_tokens,
    }
    if config.seed is not None:
        snapshot["seed"] = config.seed if endpoint.supports_seed else "unsupported"
    return snapshot


@dataclass
class ChatResponse:
    content: str
    finish_reason: str | None
    usage: dict


def http_transport(url: str, headers: dict, payload: dict, timeout: float):
    response = requests.post(url, headers=headers, json=payload, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = response.text
    return response.status_code, body


class ChatClient:
    """Chat-completions client with bounded retry and an injectable transport.

    The transport is a callable ``(url, headers, payload, timeout) ->
    (status, body)``, which keeps tests offline and deterministic.
    """

    def __init__(
        self,
        endpoint: ModelEndpoint,
        transport=http_transport,
        sleep=time.sleep,
        max_attempts: int = 3,
        backoff: float = 1.0,
    ):
        self.endpoint = endpoint
        self.transport = transport
        self.sleep = sleep
        self.max_attempts = max_attempts
        self.backoff = backoff

    def complete(
        self,
        messages: list[dict],
        *,
        temperature: float,
        top_p: float,
        max_tokens: int,
        seed: int | None = None,
        response_format: dict | None = None,
    ) -> ChatResponse:
        payload = {
            "model": self.endpoint.model_id,
            "messages": messages,
            "temperature": temperature,
            "top_p": top_p,
            "max_tokens": max_tokens,
        }
        if seed is not None and self.endpoint.supports_seed:
            payload["seed"] = seed
        if response_format is not None:
            payload["response_format"] = response_format
        headers = {"Content-Type": "application/json"}
        if self.endpoint.api_key:
            headers["Authorization"] = f"Bearer {self.endpoint.api_key}"

        last_error = "no attempt made"
        for attempt in range(self.max_attempts):
            if attempt:
                self.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                status, body = self.transport(
                    self.endpoint.chat_url, headers, payload, self.endpoint.timeout
                )
            except (requests.RequestException, OSError) as exc:
                last_error = f"transport failure: {exc}"
                continue
            if status in (401, 403):
                raise GenerationError(
                    f"authentication rejected ({status}) by {self.endpoint.base_url}"
                )
            if status in RETRYABLE_STATUSES:
                last_error = f"status {status}"
                continue
            if status != 200:
                raise GenerationError(f"unexpected status {status}: {str(body)[:200]}")
            return self._parse_body(body)
        raise GenerationError(f"gave up after {self.max_attempts} attempts: {last_error}")

    @staticmethod
    def _parse_body(body) -> ChatResponse:
        if not isinstance(body, dict) or not body.get("choices"):
            raise GenerationError(f"malformed completion body: {str(body)[:200]}")
        choice = body["choices"][0]
        content = choice.get("message", {}).get("content")
        if not isinstance(content, str):
            raise GenerationError("completion has no text content")
        return ChatResponse(
            content=content,
            finish_reason=choice.get("finish_reason"),
            usage=body.get("usage", {}) or {},
        )


def parse_output(raw: str) -> tuple[str, list[str]]:
    """Recover the output text from a completion that should close the
    quote opened by the prefix.

    Strips exactly one trailing double quote, then surrounding whitespace.
    A completion that does not end on the quote is kept but flagged.
    """
    flags = []
    if raw.endswith('"'):
        raw = raw[:-1]
    else:
        flags.append("no_closing_quote")
    text = raw.strip()
    if not text:
        flags.append("empty")
    return text, flags


def generate_example(
    record: DataRecord, client: ChatClient, config: GenerationConfig
) -> GenerationResult:
    endpoint = client.endpoint
    prompt, prefix = build_prompt(record)
    if endpoint.prefix_mode == PREFILL:
        messages = [
            {"role": "user", "content": prompt},
            {"role": "assistant", "content": prefix},
        ]
    else:
        messages = [{"role": "user", "content": f"{prompt}\n\nBegin your reply with: {prefix}"}]

    temperature, top_p = config.wire_sampling()
    response = client.complete(
        messages,
        temperature=temperature,
        top_p=top_p,
        max_tokens=config.max_new_tokens,
        seed=config.seed,
    )

    completion = response.content
    meta = {"prefix_mode": endpoint.prefix_mode, "finish_reason": response.finish_reason}
    if endpoint.prefix_mode == CONCAT:
        echoed = completion.startswith(prefix)
        meta["prefix_echoed"] = echoed
        if echoed:
            completion = completion[len(prefix) :]

    text, flags = parse_output(completion)
    if response.finish_reason == "length":
        flags.append("truncated")
    token_count = response.usage.get("completion_tokens") or estimate_tokens(text)
    return GenerationResult(
        example_id=record.id,
        model_id=endpoint.model_id,
        prompt=prompt,
        raw_completion=response.content,
        text=text,
        decoding=decoding_snapshot(config, endpoint),
        token_count=token_count,
        flags=flags,
        meta=meta,
    )


def generate_benchmark(
    records: list[DataRecord],
    client: ChatClient,
    config: GenerationConfig,
    max_workers: int = 4,
) -> list[GenerationResult]:
    """Generate for every record in parallel, ordered by example id.

    A failed example yields an empty result flagged "failed" so a long run
    survives individual outages; callers filter on the flag.
    """

    def one(record: DataRecord) -> GenerationResult:
        try:
            return generate_example(record, client, config)
        except GenerationError as exc:
            log.warning("generation failed for %s: %s", record.id, exc)
            return GenerationResult(
                example_id=record.id,
                model_id=client.endpoint.model_id,
                prompt="",
                raw_completion="",
                text="",
                decoding=decoding_snapshot(config, client.endpoint),
                token_count=0,
                flags=["failed"],
                meta={"error": str(exc)},
            )

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(one, records))
    return sorted(results, key=lambda result: result.example_id)
