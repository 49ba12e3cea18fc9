"""Reader for Imgur5K annotation JSON.

The dataset file has three top-level maps::

    index_id:         image_id -> {"image_path": ..., ...}
    index_to_ann_map: image_id -> [ann_id, ...]
    ann_id:           ann_id   -> {"word": str, "bounding_box": "[xc, yc, w, h, angle]"}

Image sizes are not part of the release.  They are taken from ``width`` /
``height`` keys of the ``index_id`` entry when present, from the ``sizes``
argument otherwise, and as a last resort from the annotation extents (with a
warning).  Imgur5K carries no reading order, so ``Word.order`` stays empty.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

from ..errors import InvalidArgumentError, ParseError
from ..geometry import Quad
from .model import Corpus, IngestWarning, Page, Word, build_word


def _corners(xc: float, yc: float, w: float, h: float, angle: float, degrees: bool, ccw: bool) -> list[tuple[float, float]]:
    a = math.radians(angle) if degrees else angle
    if not ccw:
        a = -a
    c, s = math.cos(a), math.sin(a)
    out = []
    for dx, dy in ((-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)):
        # counter-clockwise on the page when y points down
        out.append((xc + dx * c + dy * s, yc - dx * s + dy * c))
    return out


def rotated_box_to_quad(
    xc: float,
    yc: float,
    w: float,
    h: float,
    angle: float,
    *,
    degrees: bool = True,
    ccw: bool = True,
) -> Quad:
    """Corners of a ``w`` x ``h`` rectangle centred at ``(xc, yc)`` turned by ``angle``."""
    if not (w > 0 and h > 0):
        raise InvalidArgumentError(f"box extents must be positive, got w={w}, h={h}")
    return Quad(tuple(_corners(xc, yc, w, h, angle, degrees, ccw)))


def _parse_bbox(raw: Any) -> list[float]:
    if isinstance(raw, str):
        raw = json.loads(raw)
    vals = [float(v) for v in raw]
    if len(vals) != 5:
        raise ValueError(f"expected 5 numbers, got {len(vals)}")
    return vals


def parse_imgur5k_json(
    document: bytes | str,
    warnings: list[IngestWarning] | None = None,
    *,
    sizes: Mapping[str, tuple[int, int]] | None = None,
    degrees: bool = True,
    ccw: bool = True,
    source: str = "imgur5k",
) -> Corpus:
    """Parse an Imgur5K annotation file into a :class:`Corpus` (one page per image)."""
    sink = warnings if warnings is not None else []
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    index = data.get("index_id", {})
    ann_map = data.get("index_to_ann_map", {})
    anns = data.get("ann_id", {})
    if not all(isinstance(m, dict) for m in (index, ann_map, anns)):
        raise ParseError("index_id, index_to_ann_map and ann_id must be objects")

    image_ids = list(index) + [i for i in ann_map if i not in index]
    pages = []
    for image_id in image_ids:
        meta = index.get(image_id) or {}
        records = []
        for ann_id in ann_map.get(image_id, []):
            ann = anns.get(ann_id)
            if not isinstance(ann, dict):
                sink.append(IngestWarning(source, "annotation id without record, skipped", str(ann_id)))
                continue
            try:
                xc, yc, w, h, angle = _parse_bbox(ann.get("bounding_box"))
            except (TypeError, ValueError) as exc:
                sink.append(IngestWarning(source, f"unreadable bounding_box ({exc}), skipped", str(ann_id)))
                continue
            if not (w > 0 and h > 0):
                sink.append(IngestWarning(source, "zero-area box, skipped", str(ann_id)))
                continue
            records.append((str(ann_id), ann.get("word") or "", _corners(xc, yc, w, h, angle, degrees, ccw)))

        width, height = _page_size(image_id, meta, sizes, records, sink, source)
        words: list[Word] = []
        for ann_id, text, corners in records:
            word = build_word(
                corners,
                word_id=ann_id,
                text=text,
                page_w=width,
                page_h=height,
                source=source,
                warnings=sink,
            )
            if word is None:
                continue
            if not word.text:
                sink.append(IngestWarning(source, "empty transcription retained", ann_id))
            words.append(word)
        image_ref = meta.get("image_path") if isinstance(meta, dict) else None
        pages.append(Page(page_id=str(image_id), width=width, height=height, words=tuple(words), image_ref=image_ref))
    return Corpus(pages=tuple(pages), source_tag=source)


def _page_size(image_id, meta, sizes, records, sink, source) -> tuple[int, int]:
    if isinstance(meta, dict) and "width" in meta and "height" in meta:
        return int(meta["width"]), int(meta["height"])
    if sizes and image_id in sizes:
        return sizes[image_id]
    xs = [x for _, _, pts in records for x, _ in pts]
    ys = [y for _, _, pts in records for _, y in pts]
    sink.append(IngestWarning(source, "image size unknown, derived from annotation extents", str(image_id)))
    return max(1, math.ceil(max(xs, default=1.0))), max(1, math.ceil(max(ys, default=1.0)))
