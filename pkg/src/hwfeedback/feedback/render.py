"""Deterministic SVG 1.1 rendering of feedback plans and sampler overlays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence
from xml.sax.saxutils import escape, quoteattr

from ..docmodel import Page
from ..geometry import Point, Quad, enclosing_axis_box
from .detection import ErrorFlag, ErrorKind
from .layout import AnnotationPlan


@dataclass(frozen=True)
class RenderConfig:
    show_image: bool = True
    show_words: bool = False
    highlight_color: str = "#e53935"
    text_color: str = "#c62828"
    word_color: str = "#1e88e5"
    highlight_opacity: float = 0.35


def fmt(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def points_attr(points: Iterable[Point]) -> str:
    return " ".join(f"{fmt(x)},{fmt(y)}" for x, y in points)


def svg_open(width: float, height: float, origin: Point = (0.0, 0.0)) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            '<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
            f'version="1.1" width="{fmt(width)}" height="{fmt(height)}" '
            f'viewBox="{fmt(origin[0])} {fmt(origin[1])} {fmt(width)} {fmt(height)}">'
        ),
    ]


def quad_polygon(q: Quad, stroke: str, fill: str = "none", extra: str = "") -> str:
    return f'<polygon points="{points_attr(q.vertices)}" fill="{fill}" stroke="{stroke}"{extra}/>'


def char_cells(page: Page, flag: ErrorFlag) -> list[tuple[float, float, float, float]]:
    """Rectangles for highlighted characters, dividing each word box evenly per character.

    Word detectors only give word-level boxes, so a character's position is
    approximated by a uniform cell of the word's enclosing box.
    """
    words = [page.word(wid) for wid in flag.word_ids]
    spans = []  # (offset into original, word)
    offset = 0
    for w in words:
        spans.append((offset, w))
        offset += len(w.text) + 1
    cells = []
    for idx in flag.highlights:
        for start, w in spans:
            k = idx - start
            if 0 <= k < len(w.text):
                box = w.box
                cw = box.width / len(w.text)
                cells.append((box.x_min + k * cw, box.y_min, cw, box.height))
                break
    return cells


def render_svg(
    page: Page,
    flags: Sequence[ErrorFlag],
    plan: AnnotationPlan,
    config: RenderConfig | None = None,
) -> str:
    """Render the page's feedback layer; identical inputs give identical bytes."""
    cfg = config or RenderConfig()
    height = max(float(page.height), plan.canvas_height)
    out = svg_open(page.width, height)
    if cfg.show_image and page.image_ref:
        out.append(
            f'<image xlink:href={quoteattr(page.image_ref)} x="0" y="0" '
            f'width="{page.width}" height="{page.height}"/>'
        )
    if cfg.show_words:
        out.append('<g id="words">')
        for w in page.words:
            out.append(quad_polygon(w.quad, cfg.word_color, extra=' stroke-width="1"'))
        out.append("</g>")

    if flags:
        out.append('<g id="annotations">')
        out.append(f'<g id="highlights" fill="{cfg.highlight_color}" fill-opacity="{fmt(cfg.highlight_opacity)}">')
        for flag in flags:
            for x, y, w, h in char_cells(page, flag):
                out.append(f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(w)}" height="{fmt(h)}"/>')
        out.append("</g>")
        for p in plan.placements:
            flag = flags[p.flag_index]
            r = p.rect
            size = r.height
            if p.leader:
                out.append(
                    f'<polyline points="{points_attr(p.leader)}" fill="none" '
                    f'stroke="{cfg.text_color}" stroke-width="1"/>'
                )
            css_class = flag.kind.value if isinstance(flag.kind, ErrorKind) else str(flag.kind)
            out.append(
                f'<text class="{css_class} {p.strategy}" x="{fmt(r.x_min)}" y="{fmt(r.y_max - 0.2 * size)}" '
                f'font-family="sans-serif" font-size="{fmt(size)}" fill="{cfg.text_color}">'
                f"{escape(p.label)}</text>"
            )
        if plan.footnotes:
            out.append('<g id="footnotes">')
            for note in plan.footnotes:
                r = note.rect
                out.append(
                    f'<text x="{fmt(r.x_min)}" y="{fmt(r.y_max - 0.2 * r.height)}" font-family="sans-serif" '
                    f'font-size="{fmt(r.height * 0.8)}" fill="{cfg.text_color}">{escape(note.text)}</text>'
                )
            out.append("</g>")
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"



SAMPLER_PALETTE = ("#d32f2f", "#f57c00", "#fbc02d", "#388e3c", "#1976d2", "#7b1fa2", "#5d4037", "#455a64")


def sampler_svg(gt: Quad, samples: Sequence[tuple[float, Quad]], targets: Sequence[float]) -> str:
    """Sampled boxes over the ground-truth box, one colour per target IoU."""
    box = enclosing_axis_box(gt)
    out = svg_open(3 * box.width, 3 * box.height, (box.x_min - box.width, box.y_min - box.height))
    for i, t in enumerate(targets):
        colour = SAMPLER_PALETTE[i % len(SAMPLER_PALETTE)]
        out.append(f'<g class="target" data-iou="{t:g}" stroke="{colour}" fill="none" stroke-width="0.5">')
        out.extend(f'<polygon points="{points_attr(q.vertices)}"/>' for target, q in samples if target == t)
        out.append("</g>")
    out.append(
        f'<polygon id="ground-truth" points="{points_attr(gt.vertices)}" fill="none" stroke="black" stroke-width="1.5"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
