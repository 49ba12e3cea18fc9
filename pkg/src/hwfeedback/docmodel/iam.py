"""Reader for IAM handwriting form XML.

Only ``<word>`` elements below ``<handwritten-part>`` are used, so the
machine-printed copy of the text in the form header never enters the page.
Reading order is the document order of words inside lines, lines taken in
document order.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..errors import ParseError
from .model import IngestWarning, Page, Word, build_word

_BOX_ATTRS = ("x", "y", "width", "height")


def _box_from(attrib: dict[str, str]) -> tuple[float, float, float, float] | None:
    if not all(k in attrib for k in _BOX_ATTRS):
        return None
    x, y, w, h = (float(attrib[k]) for k in _BOX_ATTRS)
    return x, y, x + w, y + h


def _word_extent(elem: ET.Element) -> tuple[float, float, float, float] | None:
    boxes = [b for b in (_box_from(c.attrib) for c in elem.iter("cmp")) if b is not None]
    if not boxes:
        return _box_from(elem.attrib)
    return (
        min(b[0] for b in boxes),
        min(b[1] for b in boxes),
        max(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def parse_iam_xml(
    document: bytes | str,
    warnings: list[IngestWarning] | None = None,
    source: str = "iam",
) -> Page:
    """Parse one IAM form into a :class:`Page`.

    Each word becomes the axis-aligned union of its ``<cmp>`` component boxes
    (falling back to ``x/y/width/height`` attributes on the word itself).
    Words with neither are skipped and reported through ``warnings``.
    """
    sink = warnings if warnings is not None else []
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        reason = str(exc).split(":")[0]
        raise ParseError(f"malformed XML ({reason})", line, col + 1) from exc

    form = root if root.tag == "form" else root.find(".//form")
    if form is None:
        raise ParseError("no <form> element")
    page_id = form.get("id", "")
    try:
        width = int(form.get("width", ""))
        height = int(form.get("height", ""))
    except ValueError as exc:
        raise ParseError(f"form {page_id!r}: missing or non-integer width/height") from exc
    if width <= 0 or height <= 0:
        raise ParseError(f"form {page_id!r}: non-positive size {width}x{height}")

    part = form.find("handwritten-part")
    lines = part.findall("line") if part is not None else list(form.iter("line"))

    words: list[Word] = []
    for line in lines:
        for elem in line.findall("word"):
            word_id = elem.get("id") or f"{page_id}-w{len(words)}"
            try:
                extent = _word_extent(elem)
            except ValueError:
                sink.append(IngestWarning(source, "non-numeric box attribute, word skipped", word_id))
                continue
            if extent is None:
                sink.append(IngestWarning(source, "word has no component or explicit box, skipped", word_id))
                continue
            x0, y0, x1, y1 = extent
            word = build_word(
                [(x0, y0), (x1, y0), (x1, y1), (x0, y1)],
                word_id=word_id,
                text=elem.get("text", ""),
                page_w=width,
                page_h=height,
                source=source,
                warnings=sink,
                order=len(words),
            )
            if word is not None:
                words.append(word)
    return Page(page_id=page_id, width=width, height=height, words=tuple(words))
