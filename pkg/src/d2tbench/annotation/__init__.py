"""Human annotation campaigns: planning, storage, and the UI service."""

from __future__ import annotations

from .campaign import (
    OVERLAP,
    PRIMARY,
    Batch,
    Campaign,
    OutputRef,
    assign_batch,
    build_campaign,
)
from .store import AnnotationExport, AnnotationStore, load_export
from .visualization import render_visualization_spec

__all__ = [
    "AnnotationExport",
    "AnnotationStore",
    "Batch",
    "Campaign",
    "OVERLAP",
    "OutputRef",
    "PRIMARY",
    "assign_batch",
    "build_campaign",
    "load_export",
    "render_visualization_spec",
]
