"""Independent reference implementations used to check the package.

None of these import the code under test; they are deliberately slow and
structured differently (pixel counting, suffix recursion, exhaustive search).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np


# -- geometry ---------------------------------------------------------------

def _row_spans(ys: np.ndarray, poly: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    """Per scanline, the x-interval a convex polygon covers (empty rows get lo > hi)."""
    lo = np.full(ys.shape, np.inf)
    hi = np.full(ys.shape, -np.inf)
    for (x0, y0), (x1, y1) in zip(poly, list(poly[1:]) + [poly[0]]):
        if y0 == y1:
            continue
        hit = (ys >= min(y0, y1)) & (ys <= max(y0, y1))
        xs = x0 + (ys[hit] - y0) * (x1 - x0) / (y1 - y0)
        lo[hit] = np.minimum(lo[hit], xs)
        hi[hit] = np.maximum(hi[hit], xs)
    return lo, hi


def _centres_between(lo: np.ndarray, hi: np.ndarray, x0: float, step: float, resolution: int) -> int:
    """How many pixel centres x0 + (k + 0.5) * step fall in each [lo, hi], summed over rows."""
    ok = lo <= hi
    first = np.clip(np.ceil((lo[ok] - x0) / step - 0.5), 0, resolution)
    last = np.clip(np.floor((hi[ok] - x0) / step - 0.5), -1, resolution - 1)
    return int(np.maximum(last - first + 1, 0).sum())


def raster_iou(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]], resolution: int = 1000) -> float:
    """IoU by counting pixel centres on a grid spanning both polygons' union box.

    Counting goes one scanline at a time: a convex polygon covers a single
    interval of each row, so the count per row is a pair of floor/ceil calls.
    """
    pts = list(a) + list(b)
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    step = (x1 - x0) / resolution
    ys = y0 + (np.arange(resolution) + 0.5) * (y1 - y0) / resolution
    lo_a, hi_a = _row_spans(ys, a)
    lo_b, hi_b = _row_spans(ys, b)
    n_a = _centres_between(lo_a, hi_a, x0, step, resolution)
    n_b = _centres_between(lo_b, hi_b, x0, step, resolution)
    both = _centres_between(np.maximum(lo_a, lo_b), np.minimum(hi_a, hi_b), x0, step, resolution)
    union = n_a + n_b - both
    return both / union if union else 0.0


def rotation_corners(xc: float, yc: float, w: float, h: float, degrees: float) -> set[tuple[float, float]]:
    """Corners of a rotated rectangle via an explicit rotation matrix (y axis down, CCW on screen)."""
    t = math.radians(degrees)
    # counter-clockwise on screen with y down is a clockwise rotation in math axes
    rot = np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])
    half = np.array([[-w, -h], [w, -h], [w, h], [-w, h]]) / 2.0
    pts = half @ rot.T + np.array([xc, yc])
    return {(round(float(x), 9), round(float(y), 9)) for x, y in pts}


# -- edit distance ----------------------------------------------------------

@lru_cache(maxsize=None)
def levenshtein_recursive(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        levenshtein_recursive(a[1:], b) + 1,
        levenshtein_recursive(a, b[1:]) + 1,
        levenshtein_recursive(a[1:], b[1:]) + (a[0] != b[0]),
    )


def all_strings(alphabet: str, max_len: int) -> list[str]:
    out = [""]
    for n in range(1, max_len + 1):
        out += ["".join(p) for p in itertools.product(alphabet, repeat=n)]
    return out


def edit_distance_table(strings: list[str]) -> np.ndarray:
    """Distances between all pairs of a suffix-closed string set.

    Same recursion as :func:`levenshtein_recursive` (on heads and tails),
    evaluated bottom-up with numpy so millions of pairs stay cheap.
    """
    index = {s: i for i, s in enumerate(strings)}
    n = len(strings)
    lengths = np.array([len(s) for s in strings])
    tail = np.array([index[s[1:]] if s else 0 for s in strings])
    head = np.array([ord(s[0]) if s else -1 for s in strings])
    table = np.zeros((n, n), dtype=np.int16)
    max_len = int(lengths.max())
    groups = [np.flatnonzero(lengths == k) for k in range(max_len + 1)]
    for la in range(max_len + 1):
        for lb in range(max_len + 1):
            ia, ib = groups[la], groups[lb]
            if la == 0 or lb == 0:
                table[np.ix_(ia, ib)] = max(la, lb)
                continue
            ta, tb = tail[ia], tail[ib]
            drop_a = table[np.ix_(ta, ib)] + 1
            drop_b = table[np.ix_(ia, tb)] + 1
            both = table[np.ix_(ta, tb)] + (head[ia][:, None] != head[ib][None, :])
            table[np.ix_(ia, ib)] = np.minimum(np.minimum(drop_a, drop_b), both)
    return table


# -- ranking and BLEU -------------------------------------------------------

def footrule_brute(reference: Sequence, hypothesis: Sequence) -> int:
    return sum(abs(i - list(hypothesis).index(x)) for i, x in enumerate(reference))


@lru_cache(maxsize=None)
def max_footrule(n: int) -> int:
    ident = tuple(range(n))
    return max(footrule_brute(ident, p) for p in itertools.permutations(ident))


def nsfd_brute(reference: Sequence, hypothesis: Sequence) -> float:
    n = len(reference)
    if n <= 1:
        return 0.0
    return footrule_brute(reference, hypothesis) / max_footrule(n)


def _count_ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def bleu_oracle(reference: Sequence[str], hypothesis: Sequence[str], max_n: int = 4) -> float:
    """Sentence BLEU written from the definition with exact fractions.

    Clipped n-gram precision for n = 1..min(max_n, |hyp|), add-one smoothing
    for zero counts at n >= 2, zero when no unigram matches, brevity penalty
    exp(1 - r/c) when the hypothesis is shorter.
    """
    c, r = len(hypothesis), len(reference)
    if c == 0:
        return 0.0
    order = min(max_n, c)
    precisions = []
    for n in range(1, order + 1):
        hyp_grams = _count_ngrams(hypothesis, n)
        ref_grams = _count_ngrams(reference, n)
        remaining = list(ref_grams)
        matched = 0
        for g in hyp_grams:
            if g in remaining:
                remaining.remove(g)
                matched += 1
        total = len(hyp_grams)
        if matched == 0:
            if n == 1:
                return 0.0
            precisions.append(Fraction(1, total + 1))
        else:
            precisions.append(Fraction(matched, total))
    log_mean = sum(math.log(p) for p in precisions) / order
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * math.exp(log_mean)


# -- matching ---------------------------------------------------------------

def max_matching_size(ious: dict[tuple[int, int], float], theta: float, n_gt: int, n_pred: int) -> int:
    """Largest one-to-one assignment using only pairs with IoU >= theta, by exhaustive search."""
    best = 0

    def extend(i: int, used: frozenset, size: int) -> None:
        nonlocal best
        if size + (n_gt - i) <= best:
            return
        if i == n_gt:
            best = max(best, size)
            return
        for j in range(n_pred):
            if j not in used and ious.get((i, j), 0.0) >= theta:
                extend(i + 1, used | {j}, size + 1)
        extend(i + 1, used, size)

    extend(0, frozenset(), 0)
    return best
