"""Canonical page files: one JSON object per line, UTF-8.

Each line holds one page::

    {"page_id": str, "width": int, "height": int, "image": str | null,
     "words": [{"id": str, "quad": [[x, y] x4], "text": str,
                "order": int | null, "confidence": float | null}]}

This is both the ground-truth store and the format external recognizers
write their predictions in.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Any, Iterable

from ..errors import HwFeedbackError, SchemaError
from ..geometry import Quad
from .model import Corpus, Page, Word


def page_to_record(page: Page) -> dict[str, Any]:
    return {
        "page_id": page.page_id,
        "width": page.width,
        "height": page.height,
        "image": page.image_ref,
        "words": [
            {
                "id": w.id,
                "quad": [[float(x), float(y)] for x, y in w.quad.vertices],
                "text": w.text,
                "order": w.order,
                "confidence": w.confidence,
            }
            for w in page.words
        ],
    }


def dumps_page(page: Page) -> str:
    return json.dumps(page_to_record(page), ensure_ascii=False, allow_nan=False)


def dumps_canonical(corpus: Corpus | Iterable[Page]) -> str:
    """One page per line; identical corpora give identical text."""
    pages = corpus.pages if isinstance(corpus, Corpus) else tuple(corpus)
    return "".join(dumps_page(p) + "\n" for p in pages)


def write_canonical(corpus: Corpus | Iterable[Page], path: str | os.PathLike) -> None:
    Path(path).write_bytes(dumps_canonical(corpus).encode("utf-8"))


def _require(rec: dict, key: str, types: tuple[type, ...], path: str, line: int, nullable: bool = False):
    if key not in rec:
        raise SchemaError("missing", f"{path}{key}", line)
    value = rec[key]
    if value is None and nullable:
        return None
    if isinstance(value, bool) or not isinstance(value, types):
        names = "/".join(t.__name__ for t in types)
        raise SchemaError(f"expected {names}, got {type(value).__name__}", f"{path}{key}", line)
    return value


def _number(value: Any, field: str, line: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(f"expected finite number, got {value!r}", field, line)
    return float(value)


def _parse_word(rec: Any, idx: int, line: int) -> Word:
    base = f"words[{idx}]"
    if not isinstance(rec, dict):
        raise SchemaError("expected object", base, line)
    p = base + "."
    word_id = _require(rec, "id", (str,), p, line)
    raw_quad = _require(rec, "quad", (list,), p, line)
    if len(raw_quad) != 4:
        raise SchemaError(f"expected 4 vertices, got {len(raw_quad)}", f"{p}quad", line)
    pts = []
    for k, v in enumerate(raw_quad):
        if not isinstance(v, list) or len(v) != 2:
            raise SchemaError("expected [x, y]", f"{p}quad[{k}]", line)
        pts.append((_number(v[0], f"{p}quad[{k}][0]", line), _number(v[1], f"{p}quad[{k}][1]", line)))
    text = _require(rec, "text", (str,), p, line)
    order = rec.get("order")
    if order is not None and (isinstance(order, bool) or not isinstance(order, int) or order < 0):
        raise SchemaError(f"expected non-negative int or null, got {order!r}", f"{p}order", line)
    conf = rec.get("confidence")
    if conf is not None:
        conf = _number(conf, f"{p}confidence", line)
        if not 0.0 <= conf <= 1.0:
            raise SchemaError(f"confidence {conf} outside [0, 1]", f"{p}confidence", line)
    try:
        quad = Quad(tuple(pts))
    except HwFeedbackError as exc:
        raise SchemaError(str(exc), f"{p}quad", line) from exc
    return Word(id=word_id, quad=quad, text=text, order=order, confidence=conf)


def parse_page_record(rec: Any, line: int = 1) -> Page:
    """Validate one decoded record; :class:`SchemaError` names the offending field."""
    if not isinstance(rec, dict):
        raise SchemaError("expected object", "<record>", line)
    page_id = _require(rec, "page_id", (str,), "", line)
    width = _require(rec, "width", (int,), "", line)
    height = _require(rec, "height", (int,), "", line)
    if width <= 0 or height <= 0:
        raise SchemaError("page size must be positive", "width" if width <= 0 else "height", line)
    image = rec.get("image")
    if image is not None and not isinstance(image, str):
        raise SchemaError("expected string or null", "image", line)
    raw_words = _require(rec, "words", (list,), "", line)
    words = [_parse_word(w, i, line) for i, w in enumerate(raw_words)]
    ids = [w.id for w in words]
    if len(set(ids)) != len(ids):
        raise SchemaError("duplicate word id", "words", line)
    return Page(page_id=page_id, width=width, height=height, words=tuple(words), image_ref=image)


def loads_canonical(text: str, source_tag: str = "") -> Corpus:
    pages = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON ({exc.msg})", "<record>", lineno) from exc
        page = parse_page_record(rec, lineno)
        if page.page_id in seen:
            raise SchemaError(f"duplicate page id {page.page_id!r}", "page_id", lineno)
        seen.add(page.page_id)
        pages.append(page)
    return Corpus(pages=tuple(pages), source_tag=source_tag)


def read_canonical(path: str | os.PathLike, source_tag: str | None = None) -> Corpus:
    p = Path(path)
    try:
        text = p.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaError("file is not valid UTF-8", "<file>") from exc
    return loads_canonical(text, source_tag if source_tag is not None else f"canonical:{p.name}")
