from pathlib import Path

import pytest
import requests
from hypothesis import given
from hypothesis import strategies as st

from d2tbench.corpus import Domain, serialize_content
from d2tbench.errors import GenerationError
from d2tbench.generator import (
    CONCAT,
    OUTPUT_PREFIX_TEMPLATE,
    PROMPT_TEMPLATE,
    SAMPLING,
    ChatClient,
    GenerationConfig,
    ModelEndpoint,
    build_prompt,
    decoding_snapshot,
    fill_template,
    generate_benchmark,
    generate_example,
    parse_output,
)
from helpers import RoutingTransport, ScriptedTransport, completion, make_record

GOLDEN = Path(__file__).parent / "golden"


def make_client(transport, sleeps=None, **endpoint_kwargs):
    endpoint_kwargs.setdefault("base_url", "http://llm.test/v1")
    endpoint_kwargs.setdefault("model_id", "test-model")
    endpoint = ModelEndpoint(**endpoint_kwargs)
    return ChatClient(
        endpoint,
        transport=transport,
        sleep=(sleeps.append if sleeps is not None else lambda _: None),
    )


def test_prompt_template_matches_golden():
    assert PROMPT_TEMPLATE == (GOLDEN / "generation_prompt.txt").read_text(encoding="utf-8")
    assert OUTPUT_PREFIX_TEMPLATE == (GOLDEN / "output_prefix.txt").read_text(encoding="utf-8")


def test_build_prompt_embeds_data_and_output_type():
    record = make_record(Domain.WIKIDATA)
    prompt, prefix = build_prompt(record)
    data_text = serialize_content(record.format, record.content)
    assert f"```\n\n{data_text}\n\n```" in prompt
    assert "single-paragraph entity description in natural" in prompt
    assert prefix == 'Sure! Here is the entity description:\n\n"'
    assert "{data}" not in prompt and "{output_type}" not in prompt


def test_fill_template_is_single_pass():
    filled = fill_template("{data} and {text}", {"data": "{text}", "text": "T"})
    assert filled == "{text} and T"


def test_parse_output_examples():
    assert parse_output('Cloudy skies ahead."') == ("Cloudy skies ahead.", [])
    assert parse_output("no quote at the end") == ("no quote at the end", ["no_closing_quote"])
    assert parse_output("") == ("", ["no_closing_quote", "empty"])
    assert parse_output('"') == ("", ["empty"])
    assert parse_output('  padded text."  ') == ('padded text."', ["no_closing_quote"])
    # only one quote is stripped
    assert parse_output('He said "hi.""') == ('He said "hi."', [])


@given(st.text(max_size=80))
def test_parse_output_closed_quote_round_trip(text):
    parsed, flags = parse_output(text + '"')
    assert parsed == text.strip()
    assert flags == (["empty"] if not text.strip() else [])


def test_chat_client_success_payload():
    transport = ScriptedTransport([completion('A text."')])
    client = make_client(transport, api_key="sekrit")
    response = client.complete(
        [{"role": "user", "content": "hi"}], temperature=0.0, top_p=1.0, max_tokens=512
    )
    assert response.content == 'A text."'
    assert response.finish_reason == "stop"

    call = transport.calls[0]
    assert call["url"] == "http://llm.test/v1/chat/completions"
    assert call["headers"]["Authorization"] == "Bearer sekrit"
    assert call["payload"] == {
        "model": "test-model",
        "messages": [{"role": "user", "content": "hi"}],
        "temperature": 0.0,
        "top_p": 1.0,
        "max_tokens": 512,
    }


def test_chat_client_seed_handling():
    transport = ScriptedTransport([completion("x"), completion("x")])
    client = make_client(transport)
    client.complete([], temperature=0.0, top_p=1.0, max_tokens=8, seed=7)
    assert transport.calls[0]["payload"]["seed"] == 7

    unsupported = make_client(transport, supports_seed=False)
    unsupported.complete([], temperature=0.0, top_p=1.0, max_tokens=8, seed=7)
    assert "seed" not in transport.calls[1]["payload"]


def test_chat_client_retries_then_succeeds():
    sleeps = []
    transport = ScriptedTransport(
        [(503, "busy"), requests.ConnectionError("reset"), completion("ok")]
    )
    client = make_client(transport, sleeps=sleeps)
    response = client.complete([], temperature=0.0, top_p=1.0, max_tokens=8)
    assert response.content == "ok"
    assert len(transport.calls) == 3
    assert sleeps == [1.0, 2.0]


def test_chat_client_gives_up_after_attempts():
    transport = ScriptedTransport([(500, "a"), (502, "b"), (429, "c")])
    client = make_client(transport, sleeps=[])
    with pytest.raises(GenerationError, match="gave up"):
        client.complete([], temperature=0.0, top_p=1.0, max_tokens=8)
    assert len(transport.calls) == 3


def test_chat_client_auth_failure_does_not_retry():
    transport = ScriptedTransport([(401, {"error": "who are you"})])
    client = make_client(transport)
    with pytest.raises(GenerationError, match="authentication"):
        client.complete([], temperature=0.0, top_p=1.0, max_tokens=8)
    assert len(transport.calls) == 1


def test_chat_client_rejects_malformed_body():
    transport = ScriptedTransport([(200, {"nope": True})])
    client = make_client(transport)
    with pytest.raises(GenerationError, match="malformed"):
        client.complete([], temperature=0.0, top_p=1.0, max_tokens=8)


def test_generate_example_prefill():
    transport = ScriptedTransport([completion('Overcast all week."', tokens=11)])
    client = make_client(transport)
    record = make_record(Domain.OPENWEATHER, entries=2)
    result = generate_example(record, client, GenerationConfig())

    prompt, prefix = build_prompt(record)
    messages = transport.calls[0]["payload"]["messages"]
    assert messages == [
        {"role": "user", "content": prompt},
        {"role": "assistant", "content": prefix},
    ]
    assert result.text == "Overcast all week."
    assert result.flags == []
    assert result.token_count == 11
    assert result.model_id == "test-model"
    assert result.meta["prefix_mode"] == "prefill"
    assert result.decoding == {
        "mode": "deterministic",
        "temperature": 0.0,
        "top_p": 1.0,
        "top_k": None,
        "max_new_tokens": 512,
    }


def test_generate_example_concat_strips_echoed_prefix():
    record = make_record(Domain.GSMARENA)
    _, prefix = build_prompt(record)
    transport = ScriptedTransport([completion(prefix + 'A solid phone."')])
    client = make_client(transport, prefix_mode=CONCAT)
    result = generate_example(record, client, GenerationConfig())

    messages = transport.calls[0]["payload"]["messages"]
    assert len(messages) == 1 and messages[0]["role"] == "user"
    assert "Begin your reply with: " + prefix in messages[0]["content"]
    assert result.text == "A solid phone."
    assert result.meta["prefix_echoed"] is True


def test_generate_example_flags_truncation():
    transport = ScriptedTransport([completion("cut off mid sen", finish_reason="length")])
    client = make_client(transport)
    result = generate_example(make_record(Domain.WIKIDATA), client, GenerationConfig())
    assert "truncated" in result.flags
    assert "no_closing_quote" in result.flags


def test_sampling_snapshot_and_wire():
    transport = ScriptedTransport([completion('ok."')])
    client = make_client(transport, supports_seed=False)
    config = GenerationConfig(mode=SAMPLING, seed=42)
    result = generate_example(make_record(Domain.OWID), client, config)

    payload = transport.calls[0]["payload"]
    assert payload["temperature"] == 0.7
    assert payload["top_p"] == 0.9
    assert "top_k" not in payload
    assert "seed" not in payload
    assert result.decoding["top_k"] == 20
    assert result.decoding["seed"] == "unsupported"


def test_generation_config_rejects_unknown_mode():
    with pytest.raises(ValueError):
        GenerationConfig(mode="greedy")


def test_generate_benchmark_orders_and_survives_failures():
    records = [make_record(Domain.GSMARENA, ordinal=i) for i in (2, 0, 1)]

    def route(payload):
        if "Acme Phone 11" in payload["messages"][0]["content"]:
            return 400, {"error": "bad request"}
        return completion('Fine phone."')

    transport = RoutingTransport(route)
    client = make_client(transport)
    results = generate_benchmark(records, client, GenerationConfig(), max_workers=2)

    assert [r.example_id for r in results] == [
        "gsmarena-dev-0000",
        "gsmarena-dev-0001",
        "gsmarena-dev-0002",
    ]
    by_id = {r.example_id: r for r in results}
    assert by_id["gsmarena-dev-0001"].flags == ["failed"]
    assert "error" in by_id["gsmarena-dev-0001"].meta
    assert by_id["gsmarena-dev-0000"].text == "Fine phone."
    assert by_id["gsmarena-dev-0002"].text == "Fine phone."
