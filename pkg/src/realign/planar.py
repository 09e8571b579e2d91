"""2D primitives shared by the split heuristic and the hull reports:
monotone-chain convex hulls and convex-region disjointness tests."""

from __future__ import annotations

from typing import Sequence

Point = tuple[float, float]


def cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Counterclockwise hull via Andrew's monotone chain.  Returns the input
    (deduplicated, sorted) when there are fewer than 3 distinct points."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) > 1 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) > 1 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _segments(hull: list[Point]) -> list[tuple[Point, Point]]:
    if len(hull) == 1:
        return []
    if len(hull) == 2:
        return [(hull[0], hull[1])]
    return [(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))]


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    if cross(a, b, p) != 0.0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    return (
        _on_segment(a, c, d)
        or _on_segment(b, c, d)
        or _on_segment(c, a, b)
        or _on_segment(d, a, b)
    )


def point_in_hull(p: Point, hull: list[Point]) -> bool:
    """True if p is inside or on the boundary of the hull."""
    if len(hull) == 1:
        return p == hull[0]
    if len(hull) == 2:
        return _on_segment(p, hull[0], hull[1])
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        if cross(a, b, p) < 0:
            return False
    return True


def prepared_hulls_disjoint(ha: list[Point], hb: list[Point]) -> bool:
    """Disjointness test on hulls already in monotone-chain form."""
    if any(point_in_hull(p, hb) for p in ha):
        return False
    if any(point_in_hull(p, ha) for p in hb):
        return False
    for sa in _segments(ha):
        for sb in _segments(hb):
            if _segments_intersect(sa[0], sa[1], sb[0], sb[1]):
                return False
    return True


def hulls_disjoint(points_a: Sequence[Point], points_b: Sequence[Point]) -> bool:
    """True if the convex hulls of the two point sets share no point
    (boundary contact counts as overlap)."""
    return prepared_hulls_disjoint(convex_hull(points_a), convex_hull(points_b))
