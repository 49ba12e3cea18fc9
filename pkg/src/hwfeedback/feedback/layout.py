"""Placement of feedback annotations around handwritten words.

Each flag tries three strategies in turn:

1. ``below_word``: text in the gap under the word's line, used only when the
   gap is at least ``min_gap_ratio`` times the line's median word height;
2. ``margin``: text in the right margin at the word's height, joined to the
   word by a leader line;
3. ``overlay_marker``: a small numbered marker at the word's top-right
   corner, resolved by a footnote list drawn below the page.

Candidates that collide with earlier placements are shifted horizontally by
up to half the word width before escalating.  ``below_word`` and ``margin``
rectangles never overlap handwriting.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from ..docmodel import Page, Word
from ..geometry import AREA_EPS, AxisBox, intersection_area
from ..ordering import DEFAULT_LINE_ALPHA, group_lines
from .detection import ErrorFlag

BELOW_WORD = "below_word"
MARGIN = "margin"
OVERLAY_MARKER = "overlay_marker"
STRATEGIES = (BELOW_WORD, MARGIN, OVERLAY_MARKER)


@dataclass(frozen=True)
class FeedbackConfig:
    min_gap_ratio: float = 0.6
    margin_ratio: float = 0.15
    line_alpha: float = DEFAULT_LINE_ALPHA
    gap_text_ratio: float = 0.8
    word_text_ratio: float = 0.7
    glyph_width_ratio: float = 0.55
    marker_ratio: float = 0.4
    shift_steps: int = 4
    marker_stack: int = 6
    #: smallest footnote row height, px
    min_footnote_row: float = 12.0


@dataclass(frozen=True)
class Placement:
    flag_index: int
    word_ids: tuple[str, ...]
    strategy: str
    rect: AxisBox
    label: str
    leader: tuple[tuple[float, float], ...] | None = None
    marker: int | None = None


@dataclass(frozen=True)
class Footnote:
    number: int
    text: str
    rect: AxisBox


@dataclass(frozen=True)
class AnnotationPlan:
    placements: tuple[Placement, ...]
    footnotes: tuple[Footnote, ...] = ()
    canvas_height: float = 0.0


def _line_extent(line: Sequence[Word]) -> tuple[float, float]:
    return min(w.box.y_min for w in line), max(w.box.y_max for w in line)


def measure_interline_gaps(lines: Sequence[Sequence[Word]]) -> list[float]:
    """Vertical gap between consecutive lines: next line's top minus this line's bottom.

    Negative values mean the lines overlap.  ``lines`` come from
    :func:`hwfeedback.ordering.group_lines`.
    """
    out = []
    for upper, lower in zip(lines, lines[1:]):
        out.append(_line_extent(lower)[0] - _line_extent(upper)[1])
    return out


def page_interline_gaps(page: Page, alpha: float = DEFAULT_LINE_ALPHA) -> list[float]:
    return measure_interline_gaps(group_lines(page.words, alpha))


def _shift_offsets(span: float, steps: int) -> list[float]:
    if span <= 0 or steps <= 0:
        return [0.0]
    step = span / steps
    out = [0.0]
    for k in range(1, steps + 1):
        out += [k * step, -k * step]
    return out


class _Planner:
    def __init__(self, page: Page, config: FeedbackConfig):
        self.page = page
        self.cfg = config
        self.lines = group_lines(page.words, config.line_alpha)
        self.line_of = {w.id: i for i, line in enumerate(self.lines) for w in line}
        self.taken: list[AxisBox] = []
        self.word_boxes = [(w.box, w) for w in page.words]

    def gap_below(self, line_idx: int) -> float:
        bottom = _line_extent(self.lines[line_idx])[1]
        if line_idx + 1 < len(self.lines):
            return _line_extent(self.lines[line_idx + 1])[0] - bottom
        return self.page.height - bottom

    def median_height(self, line_idx: int) -> float:
        return statistics.median(w.box.height for w in self.lines[line_idx])

    def hits_words(self, rect: AxisBox) -> bool:
        quad = None
        for box, word in self.word_boxes:
            if box.overlap_area(rect) <= 0.0:
                continue
            quad = quad or rect.to_quad()
            if intersection_area(quad, word.quad) > AREA_EPS:
                return True
        return False

    def hits_taken(self, rect: AxisBox) -> bool:
        return any(rect.overlap_area(t) > 0.0 for t in self.taken)

    def on_page(self, rect: AxisBox) -> bool:
        return rect.x_min >= 0 and rect.y_min >= 0 and rect.x_max <= self.page.width and rect.y_max <= self.page.height

    def first_free(self, candidates: Sequence[AxisBox], avoid_words: bool) -> AxisBox | None:
        for rect in candidates:
            if not self.on_page(rect) or self.hits_taken(rect):
                continue
            if avoid_words and self.hits_words(rect):
                continue
            return rect
        return None

    def below_word(self, anchor: AxisBox, line_idx: int, label: str) -> AxisBox | None:
        gap = self.gap_below(line_idx)
        word_h = self.median_height(line_idx)
        if gap < self.cfg.min_gap_ratio * word_h or gap <= 0:
            return None
        text_h = min(self.cfg.gap_text_ratio * gap, self.cfg.word_text_ratio * word_h)
        text_w = self.cfg.glyph_width_ratio * text_h * max(len(label), 1)
        top = _line_extent(self.lines[line_idx])[1] + (gap - text_h) / 2.0
        left = min(anchor.x_min, self.page.width - text_w)
        cands = [
            AxisBox(left + dx, top, left + dx + text_w, top + text_h)
            for dx in _shift_offsets(anchor.width / 2.0, self.cfg.shift_steps)
        ]
        return self.first_free(cands, avoid_words=True)

    def margin(self, anchor: AxisBox, label: str) -> AxisBox | None:
        m_left = self.page.width * (1.0 - self.cfg.margin_ratio)
        m_width = self.page.width - m_left
        if m_width <= 0:
            return None
        text_h = min(
            self.cfg.word_text_ratio * anchor.height,
            m_width / (self.cfg.glyph_width_ratio * max(len(label), 1)),
        )
        text_w = self.cfg.glyph_width_ratio * text_h * max(len(label), 1)
        yc = (anchor.y_min + anchor.y_max) / 2.0
        top = min(max(yc - text_h / 2.0, 0.0), self.page.height - text_h)
        # the margin is flush right, so only rightward shifts make sense
        cands = [
            AxisBox(m_left + dx, top, m_left + dx + text_w, top + text_h)
            for dx in _shift_offsets(anchor.width / 2.0, self.cfg.shift_steps)
            if dx >= 0
        ]
        return self.first_free(cands, avoid_words=True)

    def marker(self, anchor: AxisBox) -> AxisBox | None:
        size = max(self.cfg.marker_ratio * anchor.height, 1.0)
        cands = []
        for k in range(self.cfg.marker_stack):
            y1 = anchor.y_min - k * size
            for dx in _shift_offsets(anchor.width / 2.0, self.cfg.shift_steps):
                x0 = anchor.x_max + dx
                cands.append(AxisBox(x0, y1 - size, x0 + size, y1))
        return self.first_free(cands, avoid_words=False)


def _anchor(page: Page, flag: ErrorFlag) -> tuple[AxisBox, str]:
    words = [page.word(wid) for wid in flag.word_ids]
    boxes = [w.box for w in words]
    box = AxisBox(
        min(b.x_min for b in boxes),
        min(b.y_min for b in boxes),
        max(b.x_max for b in boxes),
        max(b.y_max for b in boxes),
    )
    return box, words[0].id


def plan_annotations(page: Page, flags: Sequence[ErrorFlag], config: FeedbackConfig | None = None) -> AnnotationPlan:
    """Choose a non-overlapping position for every flag's annotation."""
    cfg = config or FeedbackConfig()
    if not page.words or not flags:
        return AnnotationPlan((), (), float(page.height))
    planner = _Planner(page, cfg)
    placements: list[Placement] = []
    pending_markers: list[tuple[int, ErrorFlag, AxisBox, AxisBox | None]] = []

    for idx, flag in enumerate(flags):
        anchor, first_id = _anchor(page, flag)
        line_idx = planner.line_of[first_id]
        label = flag.label

        rect = planner.below_word(anchor, line_idx, label)
        if rect is not None:
            planner.taken.append(rect)
            placements.append(Placement(idx, flag.word_ids, BELOW_WORD, rect, label))
            continue
        rect = planner.margin(anchor, label)
        if rect is not None:
            planner.taken.append(rect)
            yc = (anchor.y_min + anchor.y_max) / 2.0
            leader = ((anchor.x_max, yc), (rect.x_min, (rect.y_min + rect.y_max) / 2.0))
            placements.append(Placement(idx, flag.word_ids, MARGIN, rect, label, leader=leader))
            continue
        rect = planner.marker(anchor)
        if rect is not None:
            planner.taken.append(rect)
        pending_markers.append((idx, flag, anchor, rect))

    footnotes: list[Footnote] = []
    canvas_h = float(page.height)
    if pending_markers:
        heights = [w.box.height for w in page.words]
        row_h = max(cfg.min_footnote_row, cfg.word_text_ratio * statistics.median(heights))
        pad = row_h * 0.5
        for number, (idx, flag, anchor, rect) in enumerate(pending_markers, start=1):
            top = page.height + pad + (number - 1) * row_h
            bottom = page.height + pad + number * row_h  # same formula as the next row's top
            text = f"{number}: {flag.label}"
            x0 = pad
            if rect is None:
                # no room on the page: the marker sits in its own footnote row
                rect = AxisBox(x0, top, x0 + row_h * 0.8, top + row_h * 0.8)
                x0 = rect.x_max + pad
            note_w = cfg.glyph_width_ratio * row_h * len(text)
            footnotes.append(Footnote(number, text, AxisBox(x0, top, x0 + note_w, bottom)))
            placements.append(Placement(idx, flag.word_ids, OVERLAY_MARKER, rect, str(number), marker=number))
        canvas_h = page.height + 2 * pad + len(pending_markers) * row_h

    placements.sort(key=lambda p: p.flag_index)
    return AnnotationPlan(tuple(placements), tuple(footnotes), canvas_h)


def plan_violations(page: Page, plan: AnnotationPlan) -> list[str]:
    """Problems with a plan: text over handwriting or overlapping placements."""
    problems = []
    for p in plan.placements:
        if p.strategy in (BELOW_WORD, MARGIN):
            for w in page.words:
                if intersection_area(p.rect.to_quad(), w.quad) > AREA_EPS:
                    problems.append(f"flag {p.flag_index}: {p.strategy} rect overlaps word {w.id}")
    rects = [p.rect for p in plan.placements] + [f.rect for f in plan.footnotes]
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            if rects[i].overlap_area(rects[j]) > 0.0:
                problems.append(f"placements {i} and {j} overlap")
    return problems
