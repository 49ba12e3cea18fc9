from __future__ import annotations

import math
import random
from pathlib import Path

from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry import box as shapely_box

from hwfeedback.docmodel import Page, Word
from hwfeedback.feedback import BELOW_WORD, MARGIN
from hwfeedback.geometry import Quad, iou

FIXTURES = Path(__file__).parent / "fixtures"


def box_word(wid: str, x0: float, y0: float, x1: float, y1: float, text: str = "", order: int | None = None) -> Word:
    return Word(wid, Quad.from_box(x0, y0, x1, y1), text or wid, order)


def random_quad(rng: random.Random, size: float = 100.0, rotated: bool = False) -> Quad:
    w = rng.uniform(0.05, 0.5) * size
    h = rng.uniform(0.05, 0.5) * size
    xc = rng.uniform(0.2, 0.8) * size
    yc = rng.uniform(0.2, 0.8) * size
    if not rotated:
        return Quad.from_box(xc - w / 2, yc - h / 2, xc + w / 2, yc + h / 2)
    a = rng.uniform(0, math.pi)
    c, s = math.cos(a), math.sin(a)
    pts = [(xc + dx * c - dy * s, yc + dx * s + dy * c) for dx, dy in ((-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2))]
    return Quad(tuple(pts))


def near_quad(rng: random.Random, q: Quad, rotated: bool = False) -> Quad:
    """A quad of similar size placed so it usually overlaps ``q``."""
    xs = [p[0] for p in q.vertices]
    ys = [p[1] for p in q.vertices]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    cx, cy = q.centroid
    cx += rng.uniform(-0.8, 0.8) * w
    cy += rng.uniform(-0.8, 0.8) * h
    w2, h2 = w * rng.uniform(0.5, 1.5), h * rng.uniform(0.5, 1.5)
    if not rotated:
        return Quad.from_box(cx - w2 / 2, cy - h2 / 2, cx + w2 / 2, cy + h2 / 2)
    a = rng.uniform(0, math.pi)
    c, s = math.cos(a), math.sin(a)
    pts = [(cx + dx * c - dy * s, cy + dx * s + dy * c) for dx, dy in ((-w2 / 2, -h2 / 2), (w2 / 2, -h2 / 2), (w2 / 2, h2 / 2), (-w2 / 2, h2 / 2))]
    return Quad(tuple(pts))


def grid_page(
    rng: random.Random,
    page_id: str = "p",
    n_lines: int | None = None,
    words_per_line: int | None = None,
    line_gap: float | None = None,
    vocabulary: list[str] | None = None,
) -> Page:
    """A page of non-overlapping word boxes laid out in roughly horizontal lines."""
    n_lines = n_lines or rng.randint(1, 5)
    height = rng.uniform(20, 50)
    gap = line_gap if line_gap is not None else rng.uniform(0.1, 2.0) * height
    words = []
    y = rng.uniform(10, 60)
    for li in range(n_lines):
        x = rng.uniform(10, 40)
        for k in range(words_per_line or rng.randint(1, 6)):
            w = rng.uniform(30, 120)
            h = height * rng.uniform(0.85, 1.0)
            text = rng.choice(vocabulary) if vocabulary else f"w{len(words)}"
            words.append(Word(f"w{len(words)}", Quad.from_box(x, y, x + w, y + h), text, len(words)))
            x += w + rng.uniform(8, 30)
        y += height + gap
    width = max(w.box.x_max for w in words) / 0.8 + 10 if words else 100
    page_h = y + rng.uniform(0, 2 * height)
    return Page(page_id, int(math.ceil(width)), int(math.ceil(page_h)), tuple(words))


def flat(points) -> list[float]:
    """Vertex list (or Quad) flattened to [x0, y0, x1, y1, ...] for approx comparisons."""
    pts = points.vertices if hasattr(points, "vertices") else points
    return [float(c) for p in pts for c in p]


def perturbed_predictions(rng: random.Random, gt: Page) -> Page:
    """Predictions for ``gt`` with jitter, merges, splits, dropped and spurious boxes."""
    preds: list[Word] = []
    words = list(gt.words)
    i = 0
    while i < len(words):
        b = words[i].box
        roll = rng.random()
        if roll < 0.1:
            i += 1  # missed word
            continue
        if roll < 0.2 and i + 1 < len(words) and abs(words[i + 1].box.y_min - b.y_min) < b.height:
            nb = words[i + 1].box
            preds.append(Word(f"d{len(preds)}", Quad.from_box(b.x_min, min(b.y_min, nb.y_min), nb.x_max, max(b.y_max, nb.y_max)), "merged"))
            i += 2
            continue
        if roll < 0.3:
            cut = b.x_min + b.width * rng.uniform(0.3, 0.7)
            preds.append(Word(f"d{len(preds)}", Quad.from_box(b.x_min, b.y_min, cut - 1, b.y_max), "left"))
            preds.append(Word(f"d{len(preds)}", Quad.from_box(cut + 1, b.y_min, b.x_max, b.y_max), "right"))
            i += 1
            continue
        dx = rng.gauss(0, 0.15) * b.width
        dy = rng.gauss(0, 0.15) * b.height
        sx, sy = rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2)
        cx, cy = b.center
        w, h = b.width * sx / 2, b.height * sy / 2
        preds.append(Word(f"d{len(preds)}", Quad.from_box(cx + dx - w, cy + dy - h, cx + dx + w, cy + dy + h), words[i].text))
        i += 1
    for _ in range(rng.randint(0, 2)):
        x, y = rng.uniform(0, gt.width - 40), rng.uniform(0, gt.height - 20)
        preds.append(Word(f"d{len(preds)}", Quad.from_box(x, y, x + rng.uniform(10, 40), y + rng.uniform(5, 20)), "noise"))
    rng.shuffle(preds)
    return Page(gt.page_id, gt.width, gt.height, tuple(preds))


def small_page_pair(rng: random.Random) -> tuple[Page, Page]:
    gt = grid_page(rng, n_lines=rng.randint(1, 3), words_per_line=rng.randint(1, 3))
    return gt, perturbed_predictions(rng, gt)


def degraded_quad(rng: random.Random, gt_words, matched_gt: Word, quad: Quad, tries: int = 50) -> Quad | None:
    """A replacement for ``quad`` with strictly lower IoU against ``matched_gt``.

    The replacement must not gain overlap with any other ground-truth word;
    ``None`` when no such candidate turns up.
    """
    base = iou(matched_gt.quad, quad)
    others = [(g, iou(g.quad, quad)) for g in gt_words if g.id != matched_gt.id]
    b = matched_gt.box
    for _ in range(tries):
        a = rng.uniform(0, 2 * math.pi)
        step = rng.uniform(0.02, 0.8)
        cand = quad.translated(math.cos(a) * step * b.width, math.sin(a) * step * b.height)
        if rng.random() < 0.5:
            cx, cy = cand.centroid
            s = rng.uniform(0.5, 0.98)
            cand = Quad(tuple((cx + (x - cx) * s, cy + (y - cy) * s) for x, y in cand.vertices))
        if iou(matched_gt.quad, cand) < base and all(iou(g.quad, cand) <= v for g, v in others):
            return cand
    return None


def matchset_problems(ms, gt, pred) -> list[str]:
    problems = []
    gt_ids = [g.id for g in gt]
    pred_ids = [p.id for p in pred]
    paired_gt = [g for g, _, _ in ms.pairs]
    paired_pred = [p for _, p, _ in ms.pairs]
    if len(set(paired_gt)) != len(paired_gt) or len(set(paired_pred)) != len(paired_pred):
        problems.append("pairs are not one-to-one")
    if sorted(paired_gt + list(ms.unmatched_gt)) != sorted(gt_ids):
        problems.append("ground-truth ids not partitioned")
    if sorted(paired_pred + list(ms.unmatched_pred)) != sorted(pred_ids):
        problems.append("prediction ids not partitioned")
    if any(v < ms.threshold for _, _, v in ms.pairs):
        problems.append("pair below threshold")
    return problems


def shapely_problems(page, plan):
    """Overlap check that uses shapely instead of the package's own geometry."""
    problems = []
    word_polys = [ShapelyPolygon(w.quad.vertices) for w in page.words]
    rects = [(p.strategy, shapely_box(p.rect.x_min, p.rect.y_min, p.rect.x_max, p.rect.y_max)) for p in plan.placements]
    rects += [("footnote", shapely_box(f.rect.x_min, f.rect.y_min, f.rect.x_max, f.rect.y_max)) for f in plan.footnotes]
    for strategy, r in rects:
        if strategy in (BELOW_WORD, MARGIN) and any(r.intersection(w).area > 1e-9 for w in word_polys):
            problems.append(f"{strategy} text over handwriting")
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            if rects[i][1].intersection(rects[j][1]).area > 1e-9:
                problems.append(f"annotations {i} and {j} overlap")
    return problems
