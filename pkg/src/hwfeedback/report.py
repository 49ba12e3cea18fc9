"""Run configuration, per-page evaluation, corpus aggregation and report files."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .detect_eval import (
    DetectionMetrics,
    IoUHistogram,
    detection_metrics,
    empty_histogram,
    histogram_from_values,
    match_words,
    pairwise_ious,
)
from .docmodel import Corpus, Page, check_ground_truth_order
from .errors import InvalidArgumentError, ProtocolError
from .feedback.render import fmt, svg_open
from .ordering import OrderingComparison, compare_ordering, corpus_bleu
from .recog_eval import NO_DATA, CerTally, cer_tally

CONFIG_ENV = "HWFEEDBACK_CONFIG"
TASKS = ("detect", "order", "recog")

CONVENTIONS = {
    "matching": "greedy one-to-one by descending IoU, pairs with IoU >= threshold",
    "histogram_population": "per ground-truth word, max IoU over all predictions (0 when none overlaps)",
    "nsfd_scope": "matched words only, ranks compressed; normalizer floor(n^2/2)",
    "bleu_reference": "full ground-truth page text",
    "bleu_smoothing": "add-one on zero n-gram matches for n >= 2",
    "corpus_nsfd": "mean over evaluated pages",
    "corpus_bleu": "pooled n-gram counts over pages",
    "cer_average": "micro (edits / reference characters) over matched words",
}


@dataclass(frozen=True)
class RunConfig:
    iou_threshold: float = 0.5
    histogram_bin_width: float = 0.05
    line_group_alpha: float = 0.7
    min_gap_ratio: float = 0.6
    bleu_max_n: int = 4
    resize_target: tuple[int, int] | None = None
    seed: int = 42
    cer_macro: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.iou_threshold <= 1.0:
            raise InvalidArgumentError(f"iou_threshold must be in (0, 1], got {self.iou_threshold}")
        if not 0.0 < self.histogram_bin_width <= 1.0:
            raise InvalidArgumentError("histogram_bin_width must be in (0, 1]")
        if self.line_group_alpha <= 0:
            raise InvalidArgumentError("line_group_alpha must be positive")
        if self.min_gap_ratio < 0:
            raise InvalidArgumentError("min_gap_ratio must be non-negative")
        if self.bleu_max_n < 1:
            raise InvalidArgumentError("bleu_max_n must be >= 1")
        if self.resize_target is not None and min(self.resize_target) <= 0:
            raise InvalidArgumentError("resize_target must be positive")

    def header(self) -> dict[str, str]:
        out = {"tool": "hwfeedback", "version": __version__}
        for f in fields(self):
            out[f.name] = format_value(getattr(self, f.name))
        return out

    def with_updates(self, **values: Any) -> RunConfig:
        return replace(self, **{k: v for k, v in values.items() if v is not None})


def format_value(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "x".join(str(x) for x in v)
    return str(v)


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        size = int(w), int(h)
    except ValueError as exc:
        raise InvalidArgumentError(f"expected WxH, got {text!r}") from exc
    if min(size) <= 0:
        raise InvalidArgumentError(f"size must be positive, got {text!r}")
    return size


def _convert(name: str, raw: str) -> Any:
    raw = raw.strip()
    if name == "resize_target":
        return None if raw.lower() in ("", "none") else parse_size(raw)
    if name in ("bleu_max_n", "seed"):
        return int(raw)
    if name == "cer_macro":
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(raw)
        return raw.lower() in ("true", "1", "yes")
    return float(raw)


def load_config(path: str | os.PathLike | None = None, base: RunConfig | None = None) -> RunConfig:
    """Read ``key=value`` lines (``#`` comments allowed) over ``base``.

    Without ``path`` the file named by ``$HWFEEDBACK_CONFIG`` is used, if any.
    """
    cfg = base or RunConfig()
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return cfg
    known = {f.name for f in fields(RunConfig)}
    updates: dict[str, Any] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in known:
            raise InvalidArgumentError(f"{path}:{lineno}: unknown config entry {line!r}")
        try:
            updates[key] = _convert(key, value)
        except ValueError as exc:
            raise InvalidArgumentError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from exc
    return replace(cfg, **updates)


@dataclass(frozen=True)
class PageEvaluation:
    page_id: str
    n_gt: int
    n_pred: int
    detection: DetectionMetrics
    best_ious: tuple[float, ...]
    matched_texts: tuple[tuple[str, str], ...]
    cer: CerTally
    ordering: OrderingComparison | None = None

    @property
    def recall(self) -> float:
        return self.detection.recall


def evaluate_page(gt: Page, pred: Page | None, cfg: RunConfig, tasks: Sequence[str] = TASKS) -> PageEvaluation:
    """Every metric for one ground-truth page; ``pred=None`` means no predictions."""
    if pred is None:
        pred = Page(gt.page_id, gt.width, gt.height, ())
    table = pairwise_ious(gt.words, pred.words)
    matches = match_words(gt.words, pred.words, cfg.iou_threshold, ious=table)
    best = [0.0] * len(gt.words)
    for (i, _), v in table.items():
        best[i] = max(best[i], v)
    gt_text = {w.id: w.text for w in gt.words}
    pred_text = {w.id: w.text for w in pred.words}
    pairs = tuple((gt_text[g], pred_text[p]) for g, p, _ in matches.pairs)
    ordering = None
    if "order" in tasks and gt.words:
        ordering = compare_ordering(gt, pred, matches, cfg.bleu_max_n)
    return PageEvaluation(
        page_id=gt.page_id,
        n_gt=len(gt.words),
        n_pred=len(pred.words),
        detection=detection_metrics(matches),
        best_ious=tuple(best),
        matched_texts=pairs,
        cer=cer_tally(pairs) if "recog" in tasks else CerTally(),
        ordering=ordering,
    )


def _evaluate_star(args: tuple[Page, Page | None, RunConfig, tuple[str, ...]]) -> PageEvaluation:
    return evaluate_page(*args)


@dataclass
class ReportBundle:
    config: RunConfig
    tasks: tuple[str, ...]
    pages: list[PageEvaluation]
    warnings: list[str] = field(default_factory=list)

    @property
    def detection(self) -> DetectionMetrics:
        total = DetectionMetrics(0, 0, 0)
        for p in self.pages:
            total = total + p.detection
        return total

    @property
    def histogram(self) -> IoUHistogram:
        hist = empty_histogram(self.config.histogram_bin_width)
        for p in self.pages:
            hist = hist + histogram_from_values(p.best_ious, self.config.histogram_bin_width)
        return hist

    @property
    def cer(self) -> CerTally:
        total = CerTally()
        for p in self.pages:
            total = total + p.cer
        return total

    @property
    def ordered_pages(self) -> list[PageEvaluation]:
        return [p for p in self.pages if p.ordering is not None]

    @property
    def mean_nsfd(self) -> float | None:
        pages = self.ordered_pages
        return sum(p.ordering.metrics.nsfd for p in pages) / len(pages) if pages else None  # type: ignore[union-attr]

    @property
    def corpus_bleu(self) -> float | None:
        pages = self.ordered_pages
        if not pages:
            return None
        pairs = [(p.ordering.reference_tokens, p.ordering.hypothesis_tokens) for p in pages]  # type: ignore[union-attr]
        return corpus_bleu(pairs, self.config.bleu_max_n)


def evaluate_corpus(
    gt: Corpus,
    pred: Corpus,
    cfg: RunConfig | None = None,
    tasks: Iterable[str] = TASKS,
    workers: int = 1,
) -> ReportBundle:
    """Evaluate every ground-truth page against the prediction page with the same id.

    Raises :class:`ProtocolError` when ordering is requested for a page
    without ground-truth reading order.
    """
    cfg = cfg or RunConfig()
    tasks = tuple(t for t in TASKS if t in set(tasks))
    warnings = []
    if "order" in tasks:
        for page in gt.pages:
            check_ground_truth_order(page)
    preds = {p.page_id: p for p in pred.pages}
    gt_ids = {p.page_id for p in gt.pages}
    for pid in sorted(set(preds) - gt_ids):
        warnings.append(f"prediction page {pid!r} has no ground truth, ignored")
    jobs = []
    for page in gt.pages:
        if page.page_id not in preds:
            warnings.append(f"no predictions for page {page.page_id!r}, treated as empty")
        jobs.append((page, preds.get(page.page_id), cfg, tasks))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_evaluate_star(j) for j in jobs]
    return ReportBundle(cfg, tasks, results, warnings)


def ordering_ready(gt: Corpus) -> bool:
    try:
        for page in gt.pages:
            check_ground_truth_order(page)
    except ProtocolError:
        return False
    return True


def cer_percent(value: float | None) -> str:
    return NO_DATA if value is None else f"{100.0 * value:.1f}"


def _csv(rows: Iterable[Sequence[Any]], header_lines: dict[str, str]) -> str:
    buf = io.StringIO()
    for k, v in header_lines.items():
        buf.write(f"# {k}={v}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(["" if x is None else x for x in row])
    return buf.getvalue()


def _num(v: float | None) -> Any:
    return NO_DATA if v is None else repr(float(v))


def bundle_to_json(bundle: ReportBundle) -> dict[str, Any]:
    det = bundle.detection
    hist = bundle.histogram
    out: dict[str, Any] = {
        "header": bundle.config.header(),
        "tasks": list(bundle.tasks),
        "conventions": CONVENTIONS,
        "corpus": {
            "detection": {"tp": det.tp, "fp": det.fp, "fn": det.fn, "precision": det.precision,
                          "recall": det.recall, "f1": det.f1},
            "histogram": {"bin_width": hist.bin_width, "counts": list(hist.counts), "total": hist.total},
        },
        "pages": [],
        "warnings": list(bundle.warnings),
    }
    if "order" in bundle.tasks:
        out["corpus"]["ordering"] = {
            "mean_nsfd": bundle.mean_nsfd,
            "corpus_bleu": bundle.corpus_bleu,
            "pages": len(bundle.ordered_pages),
        }
    if "recog" in bundle.tasks:
        tally = bundle.cer
        out["corpus"]["recognition"] = {
            "matched_words": tally.words,
            "edits": tally.edits,
            "reference_chars": tally.chars,
            "cer": tally.micro if tally.micro is not None else NO_DATA,
            "cer_percent": cer_percent(tally.micro),
        }
        if bundle.config.cer_macro:
            out["corpus"]["recognition"]["cer_macro"] = tally.macro if tally.macro is not None else NO_DATA
    for p in bundle.pages:
        d = p.detection
        rec: dict[str, Any] = {
            "page_id": p.page_id,
            "detection": {"tp": d.tp, "fp": d.fp, "fn": d.fn, "precision": d.precision,
                          "recall": d.recall, "f1": d.f1},
        }
        if p.ordering is not None:
            m = p.ordering.metrics
            rec["ordering"] = {"nsfd": m.nsfd, "bleu": m.bleu, "n_evaluated": m.n_evaluated}
        if "recog" in bundle.tasks:
            rec["recognition"] = {
                "matched_words": p.cer.words,
                "edits": p.cer.edits,
                "reference_chars": p.cer.chars,
                "cer_percent": cer_percent(p.cer.micro),
            }
        out["pages"].append(rec)
    return out


def ordered_text_dump(bundle: ReportBundle) -> str:
    """Side-by-side ground-truth and reordered text per page (recall, NSFD, BLEU, text)."""
    lines = []
    for p in bundle.ordered_pages:
        o = p.ordering
        assert o is not None
        lines.append(f"== {p.page_id}")
        lines.append(f"Original\t-\t-\t-\t{' '.join(o.reference_tokens)}")
        lines.append(
            f"System\t{p.recall:.2f}\t{o.metrics.nsfd:.2f}\t{o.metrics.bleu:.2f}\t{' '.join(o.hypothesis_tokens)}"
        )
        lines.append("")
    return "\n".join(lines)


def histogram_svg(hist: IoUHistogram, width: int = 600, height: int = 300) -> str:
    out = svg_open(width, height)
    pad = 30.0
    n = len(hist.counts)
    top = max(hist.counts) or 1
    bar_w = (width - 2 * pad) / n
    out.append(f'<line x1="{fmt(pad)}" y1="{fmt(height - pad)}" x2="{fmt(width - pad)}" y2="{fmt(height - pad)}" stroke="black"/>')
    for k, c in enumerate(hist.counts):
        h = (height - 2 * pad) * c / top
        out.append(
            f'<rect x="{fmt(pad + k * bar_w)}" y="{fmt(height - pad - h)}" width="{fmt(bar_w * 0.9)}" '
            f'height="{fmt(h)}" fill="#1e88e5"><title>{c}</title></rect>'
        )
    for k in range(0, n + 1, max(1, n // 5)):
        x = pad + k * bar_w
        out.append(f'<text x="{fmt(x)}" y="{fmt(height - pad / 3)}" font-size="10" font-family="sans-serif">{fmt(k * hist.bin_width)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_report(bundle: ReportBundle, out_dir: str | os.PathLike) -> list[Path]:
    """Write JSON, CSV tables, histogram data and text dumps; returns the paths written."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    header = bundle.config.header()
    written = []

    def put(name: str, text: str) -> None:
        path = d / name
        path.write_bytes(text.encode("utf-8"))
        written.append(path)

    put("report.json", json.dumps(bundle_to_json(bundle), indent=2, ensure_ascii=False) + "\n")

    det_rows: list[Sequence[Any]] = [("page_id", "tp", "fp", "fn", "precision", "recall", "f1")]
    for p in bundle.pages:
        m = p.detection
        det_rows.append((p.page_id, m.tp, m.fp, m.fn, _num(m.precision), _num(m.recall), _num(m.f1)))
    m = bundle.detection
    det_rows.append(("__corpus__", m.tp, m.fp, m.fn, _num(m.precision), _num(m.recall), _num(m.f1)))
    put("detection.csv", _csv(det_rows, header))

    hist = bundle.histogram
    hist_rows: list[Sequence[Any]] = [("bin_start", "bin_end", "count")]
    hist_rows += [(s, e, c) for (s, e), c in zip(hist.edges, hist.counts)]
    put("histogram.csv", _csv(hist_rows, {**header, "population": CONVENTIONS["histogram_population"]}))
    put("histogram.svg", histogram_svg(hist))

    if "order" in bundle.tasks:
        rows: list[Sequence[Any]] = [("page_id", "n_evaluated", "recall", "nsfd", "bleu")]
        for p in bundle.ordered_pages:
            o = p.ordering.metrics  # type: ignore[union-attr]
            rows.append((p.page_id, o.n_evaluated, _num(p.recall), _num(o.nsfd), _num(o.bleu)))
        rows.append(("__corpus__", sum(p.ordering.metrics.n_evaluated for p in bundle.ordered_pages),  # type: ignore[union-attr]
                     _num(bundle.detection.recall), _num(bundle.mean_nsfd), _num(bundle.corpus_bleu)))
        put("ordering.csv", _csv(rows, {**header, "bleu_reference": CONVENTIONS["bleu_reference"]}))
        put("ordered_text.txt", ordered_text_dump(bundle))

    if "recog" in bundle.tasks:
        rows = [("page_id", "matched_words", "edits", "reference_chars", "cer_percent")]
        for p in bundle.pages:
            rows.append((p.page_id, p.cer.words, p.cer.edits, p.cer.chars, cer_percent(p.cer.micro)))
        t = bundle.cer
        rows.append(("__corpus__", t.words, t.edits, t.chars, cer_percent(t.micro)))
        put("recognition.csv", _csv(rows, {**header, "cer_average": CONVENTIONS["cer_average"]}))
    return written


__all__ = [
    "CONFIG_ENV",
    "PageEvaluation",
    "ReportBundle",
    "RunConfig",
    "bundle_to_json",
    "evaluate_corpus",
    "evaluate_page",
    "load_config",
    "ordering_ready",
    "parse_size",
    "write_report",
]
