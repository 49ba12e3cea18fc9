"""Error detection, annotation placement and SVG rendering for handwritten pages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..docmodel import Page
from ..ordering import ReadingOrder, heuristic_reading_order
from .detection import (
    ErrorFlag,
    ErrorKind,
    char_highlights,
    check_spelling,
    detect_segmentation_errors,
    find_errors,
    split_token,
)
from .layout import (
    BELOW_WORD,
    MARGIN,
    OVERLAY_MARKER,
    AnnotationPlan,
    FeedbackConfig,
    Footnote,
    Placement,
    measure_interline_gaps,
    page_interline_gaps,
    plan_annotations,
    plan_violations,
)
from .lexicon import Lexicon, load_lexicon
from .render import RenderConfig, render_svg


@dataclass(frozen=True)
class FeedbackResult:
    order: ReadingOrder
    flags: tuple[ErrorFlag, ...]
    plan: AnnotationPlan


def generate_feedback(page: Page, lexicon: Lexicon, config: FeedbackConfig | None = None) -> FeedbackResult:
    """Reading order, error flags and annotation plan for one recognized page.

    A complete order stored on the page wins over the line heuristic.
    """
    cfg = config or FeedbackConfig()
    if page.has_order:
        order = ReadingOrder(tuple(w.id for w in page.reading_sequence()))
    else:
        order = heuristic_reading_order(page.words, cfg.line_alpha)
    by_id = {w.id: w for w in page.words}
    tokens = [(wid, by_id[wid].text) for wid in order.sequence]
    flags = tuple(find_errors(tokens, lexicon))
    return FeedbackResult(order, flags, plan_annotations(page, flags, cfg))


def feedback_report(page: Page, result: FeedbackResult) -> dict[str, Any]:
    """JSON-ready record of flags and the placement chosen for each."""
    by_flag = {p.flag_index: p for p in result.plan.placements}
    flags = []
    for i, f in enumerate(result.flags):
        p = by_flag.get(i)
        flags.append(
            {
                "word_ids": list(f.word_ids),
                "kind": f.kind.value,
                "original": f.original,
                "suggestion": f.suggestion,
                "unknown_word": f.unknown,
                "highlights": list(f.highlights),
                "strategy": p.strategy if p else None,
                "rect": [p.rect.x_min, p.rect.y_min, p.rect.x_max, p.rect.y_max] if p else None,
                "leader": [list(pt) for pt in p.leader] if p and p.leader else None,
                "marker": p.marker if p else None,
            }
        )
    return {
        "page_id": page.page_id,
        "reading_order": list(result.order.sequence),
        "flags": flags,
        "footnotes": [{"number": n.number, "text": n.text} for n in result.plan.footnotes],
    }


__all__ = [
    "BELOW_WORD",
    "MARGIN",
    "OVERLAY_MARKER",
    "AnnotationPlan",
    "ErrorFlag",
    "ErrorKind",
    "FeedbackConfig",
    "FeedbackResult",
    "Footnote",
    "Lexicon",
    "Placement",
    "RenderConfig",
    "char_highlights",
    "check_spelling",
    "detect_segmentation_errors",
    "feedback_report",
    "find_errors",
    "generate_feedback",
    "load_lexicon",
    "measure_interline_gaps",
    "page_interline_gaps",
    "plan_annotations",
    "plan_violations",
    "render_svg",
    "split_token",
]
