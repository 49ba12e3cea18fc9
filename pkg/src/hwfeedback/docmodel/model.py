from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from ..errors import InvalidArgumentError, InvalidGeometryError, ProtocolError
from ..geometry import AxisBox, Quad, enclosing_axis_box, scale_quad


def normalize_text(text: str) -> str:
    """NFC-normalize and trim a transcription."""
    return unicodedata.normalize("NFC", text).strip()


@dataclass(frozen=True)
class IngestWarning:
    """A non-fatal problem met while reading data (skipped or repaired record)."""

    source: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        where = f"{self.source}:{self.location}" if self.location else self.source
        return f"{where}: {self.message}"


@dataclass(frozen=True)
class Word:
    id: str
    quad: Quad
    text: str
    order: int | None = None
    confidence: float | None = None

    def __post_init__(self) -> None:
        if self.order is not None and self.order < 0:
            raise InvalidArgumentError(f"word {self.id}: negative order {self.order}")
        if self.confidence is not None and not (0.0 <= self.confidence <= 1.0):
            raise InvalidArgumentError(f"word {self.id}: confidence {self.confidence} not in [0, 1]")

    @property
    def box(self) -> AxisBox:
        return enclosing_axis_box(self.quad)


@dataclass(frozen=True)
class Page:
    page_id: str
    width: int
    height: int
    words: tuple[Word, ...] = ()
    image_ref: str | None = None

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise InvalidArgumentError(f"page {self.page_id}: non-positive size {self.width}x{self.height}")
        object.__setattr__(self, "words", tuple(self.words))
        ids = [w.id for w in self.words]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidArgumentError(f"page {self.page_id}: duplicate word ids {dupes}")

    def word(self, word_id: str) -> Word:
        for w in self.words:
            if w.id == word_id:
                return w
        raise KeyError(word_id)

    @property
    def has_order(self) -> bool:
        return bool(self.words) and all(w.order is not None for w in self.words)

    def reading_sequence(self) -> list[Word]:
        """Words in their stated order, or file order when order is incomplete."""
        if self.has_order:
            return sorted(self.words, key=lambda w: w.order)  # type: ignore[arg-type, return-value]
        return list(self.words)


def check_ground_truth_order(page: Page) -> None:
    """Raise :class:`ProtocolError` unless every word carries a 0-based contiguous order."""
    orders = [w.order for w in page.words]
    if not page.words:
        return
    if any(o is None for o in orders):
        raise ProtocolError(f"page {page.page_id}: ground truth lacks reading-order indices")
    if sorted(orders) != list(range(len(orders))):  # type: ignore[type-var]
        raise ProtocolError(f"page {page.page_id}: order indices are not a 0-based permutation")


@dataclass(frozen=True)
class Corpus:
    pages: tuple[Page, ...] = ()
    source_tag: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "pages", tuple(self.pages))
        ids = [p.page_id for p in self.pages]
        if len(set(ids)) != len(ids):
            raise InvalidArgumentError("duplicate page ids in corpus")

    def page(self, page_id: str) -> Page:
        for p in self.pages:
            if p.page_id == page_id:
                return p
        raise KeyError(page_id)

    def __len__(self) -> int:
        return len(self.pages)


def resize_page(page: Page, target_w: int, target_h: int) -> Page:
    """Rescale every quad so the page measures ``target_w`` x ``target_h``."""
    if target_w <= 0 or target_h <= 0:
        raise InvalidArgumentError(f"resize target must be positive, got {target_w}x{target_h}")
    if (target_w, target_h) == (page.width, page.height):
        return page
    sx = target_w / page.width
    sy = target_h / page.height
    words = tuple(replace(w, quad=scale_quad(w.quad, sx, sy)) for w in page.words)
    return replace(page, width=target_w, height=target_h, words=words)


def clamp_quad(
    points: Sequence[tuple[float, float]],
    width: float,
    height: float,
) -> tuple[list[tuple[float, float]], bool]:
    """Clamp raw vertices into the page rectangle; report whether anything moved."""
    out = []
    moved = False
    for x, y in points:
        cx = min(max(x, 0.0), float(width))
        cy = min(max(y, 0.0), float(height))
        moved = moved or cx != x or cy != y
        out.append((cx, cy))
    return out, moved


def build_word(
    raw_points: Sequence[tuple[float, float]],
    *,
    word_id: str,
    text: str,
    page_w: float,
    page_h: float,
    source: str,
    warnings: list[IngestWarning] | None,
    order: int | None = None,
) -> Word | None:
    """Shared ingestion step: clamp, validate and wrap one record (None if skipped)."""
    sink = warnings if warnings is not None else []
    if not all(math.isfinite(c) for p in raw_points for c in p):
        sink.append(IngestWarning(source, "non-finite coordinates, word skipped", word_id))
        return None
    points, moved = clamp_quad(raw_points, page_w, page_h)
    try:
        quad = Quad(tuple(points))
    except InvalidGeometryError as exc:
        sink.append(IngestWarning(source, f"degenerate region skipped ({exc})", word_id))
        return None
    if moved:
        sink.append(IngestWarning(source, "coordinates clamped to page bounds", word_id))
    return Word(id=word_id, quad=quad, text=normalize_text(text), order=order)


def pages_by_id(pages: Iterable[Page]) -> dict[str, Page]:
    return {p.page_id: p for p in pages}


__all__ = [
    "Corpus",
    "IngestWarning",
    "Page",
    "Word",
    "build_word",
    "check_ground_truth_order",
    "clamp_quad",
    "normalize_text",
    "pages_by_id",
    "resize_page",
]
