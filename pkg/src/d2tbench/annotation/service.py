"""HTTP endpoints the browser annotation UI talks to.

The service owns nothing: campaign, benchmark, generation results, and
store are handed in, so tests and the CLI wire them the same way.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse

from ..corpus import BenchmarkSet, GenerationResult, serialize_content
from ..errors import ConfigurationError, ExhaustionError, SubmissionError, WorkflowError
from ..spans import CATEGORIES, SpanAnnotation
from .campaign import Campaign, assign_batch
from .store import AnnotationStore
from .visualization import render_visualization_spec


def texts_from_results(results: list[GenerationResult]) -> dict[tuple[str, str], str]:
    return {(result.example_id, result.model_id): result.text for result in results}


def create_app(
    campaign: Campaign,
    benchmark: BenchmarkSet,
    results: list[GenerationResult],
    store: AnnotationStore | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    records = {record.id: record for record in benchmark.records}
    outputs = {(result.example_id, result.model_id): result for result in results}
    if store is None:
        store = AnnotationStore(texts_from_results(results))

    app = FastAPI(title="span annotation service")
    app.state.campaign = campaign
    app.state.store = store

    def need_campaign(campaign_id: str) -> None:
        if campaign_id != campaign.id:
            raise HTTPException(status_code=404, detail=f"unknown campaign {campaign_id!r}")

    @app.get("/campaign/{campaign_id}/batch")
    def next_batch(campaign_id: str, annotator: str = Query(...)):
        need_campaign(campaign_id)
        try:
            batch = assign_batch(campaign, annotator)
        except ExhaustionError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ConfigurationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"batch": batch.to_dict(), "progress": store.progress(campaign, batch.id)}

    @app.get("/example/{example_id}")
    def example(example_id: str, model: str = Query(...)):
        record = records.get(example_id)
        result = outputs.get((example_id, model))
        if record is None or result is None:
            raise HTTPException(status_code=404, detail=f"unknown output {example_id}/{model}")
        return {
            "example_id": example_id,
            "model_id": model,
            "domain": record.domain.value,
            "output_type": record.domain.output_type,
            "data": serialize_content(record.format, record.content),
            "visualization": render_visualization_spec(record),
            "output_text": result.text,
            "categories": [
                {"code": category.code, "name": category.display_name}
                for category in CATEGORIES
            ],
        }

    @app.post("/annotation")
    def submit(payload: dict):
        try:
            batch_id = payload["batch_id"]
            annotation = SpanAnnotation.from_dict(payload["annotation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=f"malformed annotation payload: {exc}")
        try:
            store.submit(campaign, batch_id, annotation)
        except ConfigurationError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except SubmissionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"stored": True, "progress": store.progress(campaign, batch_id)}

    @app.post("/campaign/{campaign_id}/batch/{batch_id}/finalize")
    def finalize(campaign_id: str, batch_id: str, annotator: str = Query(...)):
        need_campaign(campaign_id)
        try:
            store.finalize(campaign, batch_id, annotator)
        except ConfigurationError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except WorkflowError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"finalized": True, "progress": store.progress(campaign, batch_id)}

    @app.get("/campaign/{campaign_id}/export")
    def export(campaign_id: str):
        need_campaign(campaign_id)
        return PlainTextResponse(
            store.export_jsonl(campaign), media_type="application/x-ndjson"
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so API routes keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
