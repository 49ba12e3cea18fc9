"""Document model, dataset readers and the canonical page file."""

from .canonical import dumps_canonical, dumps_page, loads_canonical, parse_page_record, read_canonical, write_canonical
from .iam import parse_iam_xml
from .imgur5k import parse_imgur5k_json, rotated_box_to_quad
from .model import (
    Corpus,
    IngestWarning,
    Page,
    Word,
    check_ground_truth_order,
    normalize_text,
    resize_page,
)

__all__ = [
    "Corpus",
    "IngestWarning",
    "Page",
    "Word",
    "check_ground_truth_order",
    "dumps_page",
    "dumps_canonical",
    "loads_canonical",
    "normalize_text",
    "parse_iam_xml",
    "parse_imgur5k_json",
    "parse_page_record",
    "read_canonical",
    "resize_page",
    "rotated_box_to_quad",
    "write_canonical",
]
