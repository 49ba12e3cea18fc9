"""Command-line entry point: ``hwfeedback {ingest,eval,sample-iou,feedback}``.

Exit codes: 0 success, 1 fatal error, 2 success with warnings,
3 protocol error (e.g. infeasible or undefined evaluation), 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .docmodel import (
    Corpus,
    IngestWarning,
    parse_iam_xml,
    parse_imgur5k_json,
    read_canonical,
    resize_page,
    write_canonical,
)
from .errors import HwFeedbackError, InfeasibleTargetError, InvalidArgumentError, ProtocolError
from .feedback import FeedbackConfig, feedback_report, generate_feedback, load_lexicon, render_svg
from .feedback.render import sampler_svg
from .geometry import iou, sample_quad_at_iou
from .report import CONFIG_ENV, TASKS, evaluate_corpus, load_config, ordering_ready, parse_size, write_report

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_WARNINGS = 2
EXIT_PROTOCOL = 3
EXIT_USAGE = 64

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _report_warnings(warnings: Sequence[IngestWarning | str]) -> int:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_WARNINGS if warnings else EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    warnings: list[IngestWarning] = []
    src = Path(args.input)
    if args.format == "iam":
        files = sorted(src.glob("*.xml")) if src.is_dir() else [src]
        pages = []
        for f in files:
            pages.append(parse_iam_xml(f.read_bytes(), warnings, source=f.name))
        corpus = Corpus(tuple(pages), source_tag=f"iam:{src.name}")
    elif args.format == "imgur5k":
        corpus = parse_imgur5k_json(src.read_bytes(), warnings, source=src.name)
    else:
        corpus = read_canonical(src)
    if args.resize:
        w, h = parse_size(args.resize)
        corpus = replace(corpus, pages=tuple(resize_page(p, w, h) for p in corpus.pages))
    write_canonical(corpus, args.output)
    print(f"wrote {len(corpus.pages)} page(s), {sum(len(p.words) for p in corpus.pages)} word(s) to {args.output}")
    return _report_warnings(warnings)


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    cfg = cfg.with_updates(iou_threshold=args.iou_threshold, histogram_bin_width=args.bin_width)
    gt = read_canonical(args.gt)
    pred = read_canonical(args.pred)
    tasks = TASKS if args.task == "all" else (args.task,)
    extra: list[str] = []
    if args.task == "all" and not ordering_ready(gt):
        tasks = tuple(t for t in tasks if t != "order")
        extra.append("ground truth lacks reading order, ordering evaluation skipped")
    bundle = evaluate_corpus(gt, pred, cfg, tasks, workers=args.workers)
    bundle.warnings[:0] = extra
    write_report(bundle, args.report)
    det = bundle.detection
    print(f"detection  P={det.precision:.3f} R={det.recall:.3f} F={det.f1:.3f} (tp={det.tp} fp={det.fp} fn={det.fn})")
    if "order" in bundle.tasks and bundle.mean_nsfd is not None:
        print(f"ordering   NSFD={bundle.mean_nsfd:.3f} BLEU={bundle.corpus_bleu:.3f}")
    if "recog" in bundle.tasks:
        micro = bundle.cer.micro
        print("recognition CER=" + ("no data" if micro is None else f"{100 * micro:.1f}%"))
    return _report_warnings(bundle.warnings)


def _parse_targets(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise UsageError(f"bad --targets {text!r}") from exc


def cmd_sample_iou(args: argparse.Namespace) -> int:
    corpus = read_canonical(args.gt)
    try:
        page = corpus.page(args.page)
        word = page.word(args.word)
    except KeyError as exc:
        raise InvalidArgumentError(f"unknown page or word {exc}") from exc
    targets = _parse_targets(args.targets)
    if not targets:
        raise UsageError("--targets is empty")
    rng = random.Random(args.seed)
    gx, gy = word.quad.centroid
    samples = []
    rows = [("target", "sample", "achieved_iou", "dx", "dy")]
    for t in targets:
        for k in range(args.samples):
            q = sample_quad_at_iou(word.quad, t, args.epsilon, rng, scale_jitter=args.scale_jitter)
            cx, cy = q.centroid
            samples.append((t, q))
            rows.append((f"{t:g}", k, repr(iou(word.quad, q)), repr(cx - gx), repr(cy - gy)))
    out = Path(args.output)
    out.write_text(sampler_svg(word.quad, samples, targets), encoding="utf-8")
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    out.with_suffix(".csv").write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {len(samples)} sampled boxes to {out} (+ {out.with_suffix('.csv').name})")
    return EXIT_OK


def cmd_feedback(args: argparse.Namespace) -> int:
    corpus = read_canonical(args.page)
    if not corpus.pages:
        raise InvalidArgumentError(f"{args.page} contains no page")
    if args.page_id is not None:
        try:
            page = corpus.page(args.page_id)
        except KeyError as exc:
            raise InvalidArgumentError(f"page {args.page_id!r} not found") from exc
    elif len(corpus.pages) > 1:
        raise UsageError(f"{args.page} holds {len(corpus.pages)} pages; choose one with --page-id")
    else:
        page = corpus.pages[0]
    warnings: list[IngestWarning] = []
    lex = load_lexicon(Path(args.lexicon).read_bytes(), warnings, source=Path(args.lexicon).name)
    run = load_config(args.config)
    cfg = FeedbackConfig(
        min_gap_ratio=args.min_gap_ratio if args.min_gap_ratio is not None else run.min_gap_ratio,
        line_alpha=run.line_group_alpha,
    )
    result = generate_feedback(page, lex, cfg)
    out = Path(args.output)
    out.write_text(render_svg(page, result.flags, result.plan), encoding="utf-8")
    report = feedback_report(page, result)
    report["header"] = {"tool": "hwfeedback", "version": __version__,
                        "min_gap_ratio": str(cfg.min_gap_ratio), "line_group_alpha": str(cfg.line_alpha)}
    report_path = Path(args.report) if args.report else out.with_suffix(".json")
    report_path.write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"{len(result.flags)} flag(s) on page {page.page_id}; wrote {out} and {report_path}")
    return _report_warnings(warnings)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hwfeedback", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hwfeedback {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="convert IAM / Imgur5K / canonical input to a canonical page file")
    p.add_argument("--format", required=True, choices=("iam", "imgur5k", "canonical"))
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--resize", metavar="WxH")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eval", help="evaluate predictions against ground truth")
    p.add_argument("task", choices=("detect", "order", "recog", "all"))
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--report", required=True, help="output directory")
    p.add_argument("--iou-threshold", type=float)
    p.add_argument("--bin-width", type=float)
    p.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample-iou", help="draw random boxes at prescribed IoUs around one word")
    p.add_argument("--gt", required=True)
    p.add_argument("--page", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--targets", default="0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--scale-jitter", action="store_true")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_sample_iou)

    p = sub.add_parser("feedback", help="flag errors on a recognized page and render annotations")
    p.add_argument("--page", required=True, help="canonical page file")
    p.add_argument("--page-id")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--output", required=True, help="SVG path; the JSON report goes next to it")
    p.add_argument("--report", help="feedback JSON path")
    p.add_argument("--min-gap-ratio", type=float)
    p.add_argument("--config")
    p.set_defaults(func=cmd_feedback)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hwfeedback: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProtocolError, InfeasibleTargetError) as exc:
        print(f"hwfeedback: protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (HwFeedbackError, OSError, UnicodeDecodeError) as exc:
        print(f"hwfeedback: error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
