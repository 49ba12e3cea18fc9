"""Word-detection evaluation: one-to-one matching, P/R/F1 and IoU histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .docmodel import Word
from .errors import InvalidArgumentError
from .geometry import iou

DEFAULT_IOU_THRESHOLD = 0.5


@dataclass(frozen=True)
class MatchSet:
    pairs: tuple[tuple[str, str, float], ...]
    unmatched_gt: tuple[str, ...]
    unmatched_pred: tuple[str, ...]
    threshold: float

    def gt_to_pred(self) -> dict[str, str]:
        return {g: p for g, p, _ in self.pairs}


@dataclass(frozen=True)
class DetectionMetrics:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: DetectionMetrics) -> DetectionMetrics:
        return DetectionMetrics(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def _overlapping(a: Word, b: Word) -> bool:
    ba, bb = a.box, b.box
    return ba.x_min < bb.x_max and bb.x_min < ba.x_max and ba.y_min < bb.y_max and bb.y_min < ba.y_max


def pairwise_ious(gt: Sequence[Word], pred: Sequence[Word]) -> dict[tuple[int, int], float]:
    """Non-zero IoUs keyed by (gt index, pred index)."""
    out = {}
    for i, g in enumerate(gt):
        for j, p in enumerate(pred):
            if _overlapping(g, p):
                v = iou(g.quad, p.quad)
                if v > 0.0:
                    out[i, j] = v
    return out


def match_words(
    gt: Sequence[Word],
    pred: Sequence[Word],
    theta: float = DEFAULT_IOU_THRESHOLD,
    ious: dict[tuple[int, int], float] | None = None,
) -> MatchSet:
    """Greedy one-to-one assignment by descending IoU among pairs with IoU >= theta.

    Ties are broken by lower ground-truth order index (list position when the
    word has no order), then by larger ground-truth area, then by ids.
    ``ious`` may carry a precomputed :func:`pairwise_ious` table.
    """
    if not (0.0 < theta <= 1.0):
        raise InvalidArgumentError(f"theta must be in (0, 1], got {theta}")
    table = pairwise_ious(gt, pred) if ious is None else ious
    candidates = []
    for (i, j), v in table.items():
        if v >= theta:
            g = gt[i]
            rank = g.order if g.order is not None else i
            candidates.append((-v, rank, -g.quad.area, g.id, pred[j].id, i, j))
    candidates.sort()

    used_gt: set[int] = set()
    used_pred: set[int] = set()
    pairs = []
    for neg_v, _, _, gid, pid, i, j in candidates:
        if i in used_gt or j in used_pred:
            continue
        used_gt.add(i)
        used_pred.add(j)
        pairs.append((gid, pid, -neg_v))
    return MatchSet(
        pairs=tuple(pairs),
        unmatched_gt=tuple(g.id for i, g in enumerate(gt) if i not in used_gt),
        unmatched_pred=tuple(p.id for j, p in enumerate(pred) if j not in used_pred),
        threshold=theta,
    )


def detection_metrics(m: MatchSet) -> DetectionMetrics:
    return DetectionMetrics(tp=len(m.pairs), fp=len(m.unmatched_pred), fn=len(m.unmatched_gt))


@dataclass(frozen=True)
class IoUHistogram:
    bin_width: float
    counts: tuple[int, ...]
    total: int = field(default=0)

    @property
    def edges(self) -> list[tuple[float, float]]:
        n = len(self.counts)
        return [(round(k * self.bin_width, 10), round(min(1.0, (k + 1) * self.bin_width), 10)) for k in range(n)]

    def __add__(self, other: IoUHistogram) -> IoUHistogram:
        if len(self.counts) != len(other.counts):
            raise InvalidArgumentError("cannot merge histograms with different binning")
        counts = tuple(a + b for a, b in zip(self.counts, other.counts))
        return IoUHistogram(self.bin_width, counts, self.total + other.total)


def bin_count(bin_width: float) -> int:
    if not (0.0 < bin_width <= 1.0):
        raise InvalidArgumentError(f"bin width must be in (0, 1], got {bin_width}")
    n = round(1.0 / bin_width)
    if abs(n * bin_width - 1.0) > 1e-9:
        raise InvalidArgumentError(f"bin width {bin_width} does not divide [0, 1] evenly")
    return n


def empty_histogram(bin_width: float = 0.05) -> IoUHistogram:
    return IoUHistogram(bin_width, (0,) * bin_count(bin_width), 0)


def histogram_from_values(values: Sequence[float], bin_width: float = 0.05) -> IoUHistogram:
    """Bin values into ``[k*bw, (k+1)*bw)``; the top bin also holds 1.0."""
    n = bin_count(bin_width)
    counts = [0] * n
    for v in values:
        k = min(n - 1, max(0, math.floor(v / bin_width + 1e-9)))
        counts[k] += 1
    return IoUHistogram(bin_width, tuple(counts), len(values))


def max_ious(gt: Sequence[Word], pred: Sequence[Word]) -> list[float]:
    best = [0.0] * len(gt)
    for (i, _), v in pairwise_ious(gt, pred).items():
        best[i] = max(best[i], v)
    return best


def iou_histogram(gt: Sequence[Word], pred: Sequence[Word], bin_width: float = 0.05) -> IoUHistogram:
    """Histogram of each ground-truth word's best IoU over all predictions (0 if none)."""
    return histogram_from_values(max_ious(gt, pred), bin_width)
