"""Planar geometry for word regions.

Word regions are convex quadrilaterals in page pixel coordinates (y grows
downwards).  A :class:`Quad` is always stored in canonical form: vertices run
clockwise as seen on the page, starting at the vertex with the smallest
``(y, x)``.  Intersections are computed exactly by clipping one convex
polygon against the half-planes of the other.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InfeasibleTargetError, InvalidArgumentError, InvalidGeometryError

Point = tuple[float, float]
Polygon = tuple[Point, ...]

#: intersections smaller than this (px²) are treated as empty
AREA_EPS = 1e-9
#: lowest IoU the sampler accepts
MIN_SAMPLE_TARGET = 0.05
#: per-axis relative size change allowed by the scale-jitter sampler
SCALE_JITTER = 0.10
MAX_BISECTION_STEPS = 64


def _signed_area(points: Sequence[Point]) -> float:
    s = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2.0


def polygon_area(points: Sequence[Point]) -> float:
    """Shoelace area of a simple polygon (orientation ignored)."""
    if len(points) < 3:
        return 0.0
    return abs(_signed_area(points))


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class AxisBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        vals = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidGeometryError(f"non-finite box {vals}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise InvalidGeometryError(f"empty box {vals}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def to_quad(self) -> Quad:
        return Quad(
            (
                (self.x_min, self.y_min),
                (self.x_max, self.y_min),
                (self.x_max, self.y_max),
                (self.x_min, self.y_max),
            )
        )

    def overlap_area(self, other: AxisBox) -> float:
        w = min(self.x_max, other.x_max) - max(self.x_min, other.x_min)
        h = min(self.y_max, other.y_max) - max(self.y_min, other.y_min)
        if w <= 0 or h <= 0:
            return 0.0
        return w * h

    def translated(self, dx: float, dy: float) -> AxisBox:
        return AxisBox(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)


@dataclass(frozen=True)
class Quad:
    """Convex, non-degenerate quadrilateral in canonical vertex order.

    Any ordering of the four corners is accepted; the constructor sorts them
    clockwise (on-page) from the minimal ``(y, x)`` vertex and rejects
    degenerate or non-convex input with :class:`InvalidGeometryError`.
    """

    vertices: tuple[Point, Point, Point, Point]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", _canonicalize(self.vertices))

    @classmethod
    def from_box(cls, x_min: float, y_min: float, x_max: float, y_max: float) -> Quad:
        return AxisBox(x_min, y_min, x_max, y_max).to_quad()

    @classmethod
    def from_xywh(cls, x: float, y: float, w: float, h: float) -> Quad:
        return cls.from_box(x, y, x + w, y + h)

    @property
    def area(self) -> float:
        return quad_area(self)

    @property
    def centroid(self) -> Point:
        return _centroid(self.vertices)

    def is_axis_aligned(self) -> bool:
        (x0, y0), (x1, y1), (x2, y2), (x3, y3) = self.vertices
        return y0 == y1 and x1 == x2 and y2 == y3 and x3 == x0

    def translated(self, dx: float, dy: float) -> Quad:
        return Quad(tuple((x + dx, y + dy) for x, y in self.vertices))

    def to_list(self) -> list[list[float]]:
        return [[x, y] for x, y in self.vertices]


def _centroid(points: Iterable[Point]) -> Point:
    pts = list(points)
    return (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))


def _canonicalize(points: Sequence[Sequence[float]]) -> tuple[Point, Point, Point, Point]:
    try:
        pts = [(float(p[0]), float(p[1])) for p in points]
    except (TypeError, ValueError, IndexError) as exc:
        raise InvalidGeometryError(f"quad vertices must be (x, y) pairs: {points!r}") from exc
    if len(pts) != 4 or any(len(p) != 2 for p in points):
        raise InvalidGeometryError(f"quad needs exactly 4 vertices, got {len(pts)}")
    if not all(math.isfinite(c) for p in pts for c in p):
        raise InvalidGeometryError(f"non-finite quad vertex in {pts}")
    cx, cy = _centroid(pts)
    # ascending atan2 in a y-down frame is clockwise on the page
    pts.sort(key=lambda p: (math.atan2(p[1] - cy, p[0] - cx), p[1], p[0]))
    start = min(range(4), key=lambda i: (pts[i][1], pts[i][0]))
    pts = pts[start:] + pts[:start]
    area = _signed_area(pts)
    if area <= AREA_EPS:
        raise InvalidGeometryError(f"degenerate quad {pts}")
    scale = max(abs(c) for p in pts for c in p) or 1.0
    for i in range(4):
        if _cross(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]) < -1e-12 * scale * scale:
            raise InvalidGeometryError(f"non-convex quad {pts}")
    return tuple(pts)  # type: ignore[return-value]


def quad_area(q: Quad) -> float:
    """Area of ``q`` in px² (always > 0 for a constructed Quad)."""
    if q.is_axis_aligned():
        (x0, y0), _, (x1, y1), _ = q.vertices
        area = (x1 - x0) * (y1 - y0)
    else:
        area = polygon_area(q.vertices)
    if area <= AREA_EPS:
        raise InvalidGeometryError(f"degenerate quad {q.vertices}")
    return area


def _clip(subject: list[Point], clip_poly: Sequence[Point]) -> list[Point]:
    # clip_poly is positively oriented (clockwise on the page), so "inside" is
    # the non-negative side of every directed edge.
    output = subject
    n = len(clip_poly)
    for i in range(n):
        if not output:
            break
        a = clip_poly[i]
        b = clip_poly[(i + 1) % n]
        inputs = output
        output = []
        prev = inputs[-1]
        prev_side = _cross(a, b, prev)
        for cur in inputs:
            cur_side = _cross(a, b, cur)
            if cur_side >= 0:
                if prev_side < 0:
                    output.append(_edge_cut(prev, cur, prev_side, cur_side))
                output.append(cur)
            elif prev_side >= 0:
                output.append(_edge_cut(prev, cur, prev_side, cur_side))
            prev, prev_side = cur, cur_side
    return output


def _edge_cut(p: Point, q: Point, sp: float, sq: float) -> Point:
    t = sp / (sp - sq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _dedupe(points: list[Point]) -> list[Point]:
    out: list[Point] = []
    for p in points:
        if not out or abs(p[0] - out[-1][0]) > 1e-12 or abs(p[1] - out[-1][1]) > 1e-12:
            out.append(p)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) <= 1e-12 and abs(out[0][1] - out[-1][1]) <= 1e-12:
        out.pop()
    return out


def _ordered(a: Quad, b: Quad) -> tuple[Quad, Quad]:
    # fixed operand order makes every pairwise result exactly symmetric
    return (a, b) if a.vertices <= b.vertices else (b, a)


def convex_intersection(a: Quad, b: Quad) -> Polygon:
    """Intersection of two quads as a convex polygon (empty tuple if none)."""
    first, second = _ordered(a, b)
    poly = _dedupe(_clip(list(first.vertices), second.vertices))
    if len(poly) < 3 or polygon_area(poly) <= AREA_EPS:
        return ()
    return tuple(poly)


def intersection_area(a: Quad, b: Quad) -> float:
    if a.is_axis_aligned() and b.is_axis_aligned():
        (ax0, ay0), _, (ax1, ay1), _ = a.vertices
        (bx0, by0), _, (bx1, by1), _ = b.vertices
        w = min(ax1, bx1) - max(ax0, bx0)
        h = min(ay1, by1) - max(ay0, by0)
        area = w * h if w > 0 and h > 0 else 0.0
        return area if area > AREA_EPS else 0.0
    return polygon_area(convex_intersection(a, b))


def iou(a: Quad, b: Quad) -> float:
    """Intersection over union of two quads, in [0, 1]."""
    if a.vertices == b.vertices:
        return 1.0
    area_a = quad_area(a)
    area_b = quad_area(b)
    inter = intersection_area(a, b)
    if inter <= 0.0:
        return 0.0
    inter = min(inter, area_a, area_b)
    return min(1.0, inter / (area_a + area_b - inter))


def scale_quad(q: Quad, sx: float, sy: float) -> Quad:
    """Scale every vertex about the origin: ``(x, y) -> (sx*x, sy*y)``."""
    if not (sx > 0 and sy > 0) or not (math.isfinite(sx) and math.isfinite(sy)):
        raise InvalidArgumentError(f"scale factors must be positive, got ({sx}, {sy})")
    return Quad(tuple((x * sx, y * sy) for x, y in q.vertices))


def enclosing_axis_box(q: Quad) -> AxisBox:
    xs = [p[0] for p in q.vertices]
    ys = [p[1] for p in q.vertices]
    return AxisBox(min(xs), min(ys), max(xs), max(ys))


def max_axis_offsets(width: float, height: float, target: float) -> tuple[float, float]:
    """Largest pure-x and pure-y shifts of a ``width`` x ``height`` box that keep
    IoU at ``target`` against the unshifted box.

    With overlap ``(w - dx) * h`` and union ``2wh - overlap`` the shift solving
    IoU = t is ``w (1 - t) / (1 + t)``, likewise for y.
    """
    k = (1.0 - target) / (1.0 + target)
    return width * k, height * k


def _scaled_about(q: Quad, sx: float, sy: float, center: Point) -> Quad:
    cx, cy = center
    return Quad(tuple((cx + (x - cx) * sx, cy + (y - cy) * sy) for x, y in q.vertices))


def sample_quad_at_iou(
    gt: Quad,
    target: float,
    epsilon: float = 1e-3,
    rng: random.Random | None = None,
    *,
    scale_jitter: bool = False,
    direction: float | None = None,
) -> Quad:
    """Draw a quad whose IoU with ``gt`` is within ``epsilon`` of ``target``.

    The default mode only translates ``gt``: a direction is drawn uniformly on
    the circle (or given as ``direction`` in radians) and the distance along it
    is found by bisection.  With ``scale_jitter`` each axis is first rescaled
    by up to ±10% about the centroid; the jitter is shrunk towards zero when
    the rescaled box alone already falls below ``target``.
    """
    if not epsilon > 0:
        raise InvalidArgumentError(f"epsilon must be positive, got {epsilon}")
    if not (MIN_SAMPLE_TARGET <= target <= 1.0):
        raise InfeasibleTargetError(
            f"target IoU {target} outside feasible range [{MIN_SAMPLE_TARGET}, 1.0]"
        )
    rng = rng if rng is not None else random.Random()
    theta = rng.uniform(0.0, 2.0 * math.pi) if direction is None else direction
    ux, uy = math.cos(theta), math.sin(theta)

    base = gt
    if scale_jitter:
        sx = 1.0 + rng.uniform(-SCALE_JITTER, SCALE_JITTER)
        sy = 1.0 + rng.uniform(-SCALE_JITTER, SCALE_JITTER)
        center = gt.centroid
        lam = 1.0
        for _ in range(MAX_BISECTION_STEPS):
            base = _scaled_about(gt, 1.0 + lam * (sx - 1.0), 1.0 + lam * (sy - 1.0), center)
            if iou(gt, base) >= target - epsilon / 2:
                break
            lam /= 2.0
        else:
            base = gt

    at_zero = iou(gt, base)
    if abs(at_zero - target) <= epsilon / 2 or target == 1.0:
        if abs(at_zero - target) > epsilon:
            raise InfeasibleTargetError(f"cannot reach IoU {target} (best {at_zero})")
        return base

    box = enclosing_axis_box(gt)
    hi = 2.0 * math.hypot(box.width, box.height) + 1.0
    lo = 0.0
    best = base
    best_err = abs(at_zero - target)
    # iou(lo) >= target > iou(hi); continuity guarantees a crossing in between
    for _ in range(MAX_BISECTION_STEPS):
        mid = (lo + hi) / 2.0
        cand = base.translated(ux * mid, uy * mid)
        value = iou(gt, cand)
        err = abs(value - target)
        if err < best_err:
            best, best_err = cand, err
        if err <= 1e-12:
            break
        if value > target:
            lo = mid
        else:
            hi = mid
    if best_err > epsilon:
        raise InfeasibleTargetError(f"bisection did not reach IoU {target} (error {best_err:.3g})")
    return best
