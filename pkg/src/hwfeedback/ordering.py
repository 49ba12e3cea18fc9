"""Heuristic reading order and ordering metrics (footrule distance, BLEU)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

from .detect_eval import MatchSet
from .docmodel import Page, Word, check_ground_truth_order
from .errors import InvalidArgumentError

DEFAULT_LINE_ALPHA = 0.7


@dataclass(frozen=True)
class ReadingOrder:
    sequence: tuple[str, ...]

    def positions(self) -> dict[str, int]:
        return {wid: i for i, wid in enumerate(self.sequence)}

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class OrderingMetrics:
    nsfd: float
    bleu: float
    n_evaluated: int


def _y_center(w: Word) -> float:
    b = w.box
    return (b.y_min + b.y_max) / 2.0


def group_lines(words: Sequence[Word], alpha: float = DEFAULT_LINE_ALPHA) -> list[list[Word]]:
    """Cluster words into text lines by vertical proximity.

    Words are scanned by ascending y-centre; a new line starts whenever a
    word's centre lies more than ``alpha`` times the mean box height away from
    the running mean centre of the current line.  Lines come back top to
    bottom (by mean centre), each sorted left to right.
    """
    if not words:
        return []
    mean_h = sum(w.box.height for w in words) / len(words)
    limit = alpha * mean_h
    scan = sorted(words, key=lambda w: (_y_center(w), w.box.x_min, w.id))

    groups: list[list[Word]] = []
    total = 0.0
    for w in scan:
        yc = _y_center(w)
        if groups and abs(yc - total / len(groups[-1])) <= limit:
            groups[-1].append(w)
            total += yc
        else:
            groups.append([w])
            total = yc

    def mean_center(g: list[Word]) -> float:
        return sum(_y_center(w) for w in g) / len(g)

    groups.sort(key=lambda g: (mean_center(g), min(w.box.x_min for w in g)))
    return [sorted(g, key=lambda w: (w.box.x_min, _y_center(w), w.id)) for g in groups]


def heuristic_reading_order(words: Sequence[Word], alpha: float = DEFAULT_LINE_ALPHA) -> ReadingOrder:
    return ReadingOrder(tuple(w.id for line in group_lines(words, alpha) for w in line))


def footrule(reference: Sequence[Hashable], predicted: Sequence[Hashable]) -> int:
    ref_pos = {x: i for i, x in enumerate(reference)}
    pred_pos = {x: i for i, x in enumerate(predicted)}
    if len(ref_pos) != len(reference) or len(pred_pos) != len(predicted) or ref_pos.keys() != pred_pos.keys():
        raise InvalidArgumentError("orders must be permutations of the same id set")
    return sum(abs(ref_pos[x] - pred_pos[x]) for x in ref_pos)


def nsfd(reference: ReadingOrder | Sequence[str], predicted: ReadingOrder | Sequence[str]) -> float:
    """Spearman footrule distance divided by its maximum ``floor(n²/2)``; 0 for n <= 1."""
    ref = reference.sequence if isinstance(reference, ReadingOrder) else tuple(reference)
    pred = predicted.sequence if isinstance(predicted, ReadingOrder) else tuple(predicted)
    f = footrule(ref, pred)
    n = len(ref)
    if n <= 1:
        return 0.0
    return f / (n * n // 2)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _bleu_stats(reference: Sequence[str], hypothesis: Sequence[str], max_n: int) -> list[tuple[int, int]]:
    stats = []
    for n in range(1, max_n + 1):
        hyp = _ngrams(hypothesis, n)
        ref = _ngrams(reference, n)
        matched = sum(min(c, ref[g]) for g, c in hyp.items())
        stats.append((matched, max(0, len(hypothesis) - n + 1)))
    return stats


def _combine(stats: list[tuple[int, int]], hyp_len: int, ref_len: int, max_n: int) -> float:
    if hyp_len == 0:
        return 0.0
    order = min(max_n, hyp_len)
    log_sum = 0.0
    for n in range(1, order + 1):
        matched, total = stats[n - 1]
        if matched == 0:
            if n == 1 or total == 0:
                return 0.0
            matched, total = 1, total + 1
        log_sum += math.log(matched / total)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return min(1.0, bp * math.exp(log_sum / order))


def bleu(reference: Sequence[str], hypothesis: Sequence[str], max_n: int = 4) -> float:
    """Sentence BLEU with uniform weights over n = 1..min(max_n, |hyp|).

    Zero match counts for n >= 2 get add-one smoothing; a zero unigram match
    or an empty hypothesis gives 0.
    """
    if max_n < 1:
        raise InvalidArgumentError("max_n must be >= 1")
    return _combine(_bleu_stats(reference, hypothesis, max_n), len(hypothesis), len(reference), max_n)


def corpus_bleu(pairs: Sequence[tuple[Sequence[str], Sequence[str]]], max_n: int = 4) -> float:
    """Corpus BLEU over (reference, hypothesis) pairs: counts pooled before combining."""
    pooled = [(0, 0)] * max_n
    hyp_len = ref_len = 0
    for ref, hyp in pairs:
        for n, (m, t) in enumerate(_bleu_stats(ref, hyp, max_n)):
            pooled[n] = (pooled[n][0] + m, pooled[n][1] + t)
        hyp_len += len(hyp)
        ref_len += len(ref)
    return _combine(pooled, hyp_len, ref_len, max_n)


@dataclass(frozen=True)
class OrderingComparison:
    """Everything the ordering evaluation derives from one page pair."""

    metrics: OrderingMetrics
    reference_tokens: tuple[str, ...]
    hypothesis_tokens: tuple[str, ...]


def compare_ordering(gt_page: Page, pred_page: Page, matches: MatchSet, max_n: int = 4) -> OrderingComparison:
    """Ordering evaluation with recognition errors removed.

    The predicted order of the matched words is kept, but every predicted
    word is replaced by its ground-truth partner.  The footrule distance runs
    over matched words only; the BLEU reference is the full ground-truth text,
    so missed words cost brevity penalty.
    """
    check_ground_truth_order(gt_page)
    pred_to_gt = {p: g for g, p, _ in matches.pairs}
    gt_by_id = {w.id: w for w in gt_page.words}

    hyp_ids = [pred_to_gt[w.id] for w in pred_page.reading_sequence() if w.id in pred_to_gt]
    ref_ids = sorted(hyp_ids, key=lambda gid: gt_by_id[gid].order)  # type: ignore[arg-type, return-value]
    distance = nsfd(ref_ids, hyp_ids)

    ref_tokens = tuple(w.text for w in gt_page.reading_sequence() if w.text)
    hyp_tokens = tuple(gt_by_id[g].text for g in hyp_ids if gt_by_id[g].text)
    score = bleu(ref_tokens, hyp_tokens, max_n)
    return OrderingComparison(OrderingMetrics(distance, score, len(hyp_ids)), ref_tokens, hyp_tokens)


def ordering_eval(gt_page: Page, pred_page: Page, matches: MatchSet, max_n: int = 4) -> OrderingMetrics:
    return compare_ordering(gt_page, pred_page, matches, max_n).metrics
