"""Planar geometry: Delaunay triangulation and piecewise-linear interpolation.

The triangulation is built with the incremental Bowyer-Watson algorithm and
then canonicalized so that cocircular point sets (where the Delaunay
triangulation is not unique) always resolve the same way: of the two legal
diagonals of a cocircular quad, the one whose (lexicographically sorted)
endpoint pair is smaller is kept.  This makes the triangulation a pure
function of the input point set, which the replay and file-format contracts
rely on.

Interpolation over a triangulation is barycentric inside the convex hull;
exterior queries are first projected to the nearest point of the hull
boundary, which keeps every interpolated map total over the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Point = tuple[float, float]

# Relative tolerance for the incircle/orientation predicates.  Inputs are
# field coordinates (tens of meters), well inside double precision.
_EPS = 1e-9


class DegenerateGeometryError(ValueError):
    """Raised for point sets that admit no triangulation."""

    def __init__(self, message: str, points: list[Point]):
        super().__init__(f"{message}: {points}")
        self.points = points


def orient(a: Point, b: Point, c: Point) -> float:
    """Twice the signed area of triangle abc (>0 when counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def circumcircle(a: Point, b: Point, c: Point) -> tuple[Point, float]:
    """Circumcenter and squared circumradius of triangle abc."""
    d = 2.0 * orient(a, b, c)
    if d == 0.0:
        raise DegenerateGeometryError("collinear triangle", [a, b, c])
    aa = a[0] * a[0] + a[1] * a[1]
    bb = b[0] * b[0] + b[1] * b[1]
    cc = c[0] * c[0] + c[1] * c[1]
    ux = (aa * (b[1] - c[1]) + bb * (c[1] - a[1]) + cc * (a[1] - b[1])) / d
    uy = (aa * (c[0] - b[0]) + bb * (a[0] - c[0]) + cc * (b[0] - a[0])) / d
    r2 = (a[0] - ux) ** 2 + (a[1] - uy) ** 2
    return (ux, uy), r2


def _incircle(a: Point, b: Point, c: Point, p: Point) -> float:
    """Incircle determinant, positive when p is strictly inside the
    circumcircle of ccw triangle abc."""
    adx, ady = a[0] - p[0], a[1] - p[1]
    bdx, bdy = b[0] - p[0], b[1] - p[1]
    cdx, cdy = c[0] - p[0], c[1] - p[1]
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd - bd * cdy)
        - ady * (bdx * cd - bd * cdx)
        + ad * (bdx * cdy - bdy * cdx)
    )


@dataclass(frozen=True)
class Triangulation:
    points: list[Point]
    triangles: list[tuple[int, int, int]]  # vertex indices, each sorted ascending
    hull: list[int]  # convex hull indices, counterclockwise
    scale: float = 1.0  # squared span, precomputed for predicate tolerances

    def triangle_points(self, tri: tuple[int, int, int]) -> tuple[Point, Point, Point]:
        return self.points[tri[0]], self.points[tri[1]], self.points[tri[2]]


def _convex_hull(points: list[Point]) -> list[int]:
    """Andrew's monotone chain; returns ccw hull as indices into points."""
    order = sorted(range(len(points)), key=lambda i: points[i])

    def build(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and orient(points[out[-2]], points[out[-1]], points[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = build(order)
    upper = build(reversed(order))
    return lower[:-1] + upper[:-1]


def build_triangulation(points: list[Point]) -> Triangulation:
    """Delaunay triangulation of ``points`` with the canonical tie-break.

    Raises DegenerateGeometryError for fewer than 3 points, duplicates, or
    an all-collinear input, naming the offending points.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise DegenerateGeometryError("need at least 3 points", pts)

    seen: dict[Point, int] = {}
    for i, p in enumerate(pts):
        j = seen.get(p)
        if j is not None:
            raise DegenerateGeometryError("duplicate points", [pts[j], p])
        seen[p] = i

    if all(abs(orient(pts[0], pts[1], p)) <= _EPS * _scale(pts) for p in pts[2:]):
        raise DegenerateGeometryError("all points collinear", pts)

    tris = _bowyer_watson(pts)
    tris = _canonicalize_cocircular(pts, tris)
    tris = sorted(tuple(sorted(t)) for t in tris)
    return Triangulation(
        points=pts, triangles=tris, hull=_convex_hull(pts), scale=_scale(pts)
    )


def _scale(pts: list[Point]) -> float:
    span = max(
        max(p[0] for p in pts) - min(p[0] for p in pts),
        max(p[1] for p in pts) - min(p[1] for p in pts),
    )
    return max(span * span, 1.0)


def _bowyer_watson(pts: list[Point]) -> list[tuple[int, int, int]]:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cx, cy = (min(xs) + max(xs)) / 2.0, (min(ys) + max(ys)) / 2.0
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    big = 50.0 * span
    # Super-triangle vertices get indices n, n+1, n+2.
    n = len(pts)
    verts = pts + [(cx - big, cy - big), (cx + big, cy - big), (cx, cy + big)]
    eps = _EPS * _scale(pts)

    triangles: list[tuple[int, int, int]] = [(n, n + 1, n + 2)]
    for pi in range(n):
        p = verts[pi]
        bad: list[tuple[int, int, int]] = []
        kept: list[tuple[int, int, int]] = []
        for tri in triangles:
            a, b, c = verts[tri[0]], verts[tri[1]], verts[tri[2]]
            if orient(a, b, c) < 0:
                tri = (tri[0], tri[2], tri[1])
                a, c = c, a
            if _incircle(a, b, c, p) > eps:
                bad.append(tri)
            else:
                kept.append(tri)
        # Boundary of the cavity: edges that belong to exactly one bad triangle.
        edge_count: dict[tuple[int, int], tuple[int, int]] = {}
        for tri in bad:
            for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(e), max(e))
                if key in edge_count:
                    del edge_count[key]
                else:
                    edge_count[key] = e
        triangles = kept
        for e in edge_count.values():
            triangles.append((e[0], e[1], pi))

    return [t for t in triangles if all(v < n for v in t)]


def _edge_map(tris: list[tuple[int, int, int]]):
    edges: dict[tuple[int, int], list[int]] = {}
    for ti, tri in enumerate(tris):
        for i in range(3):
            e = (tri[i], tri[(i + 1) % 3])
            key = (min(e), max(e))
            edges.setdefault(key, []).append(ti)
    return edges


def _canonicalize_cocircular(
    pts: list[Point], tris: list[tuple[int, int, int]]
) -> list[tuple[int, int, int]]:
    """Flip cocircular quads so the lexicographically smaller diagonal wins."""
    tris = [tuple(sorted(t)) for t in tris]
    eps = _EPS * _scale(pts)
    changed = True
    passes = 0
    while changed and passes < len(tris) + 4:
        changed = False
        passes += 1
        edges = _edge_map(tris)
        for (u, v), owners in edges.items():
            if len(owners) != 2:
                continue
            t1, t2 = tris[owners[0]], tris[owners[1]]
            w1 = next(x for x in t1 if x not in (u, v))
            w2 = next(x for x in t2 if x not in (u, v))
            a, b, c = pts[u], pts[v], pts[w1]
            if orient(a, b, c) < 0:
                a, b = b, a
            if abs(_incircle(a, b, c, pts[w2])) > eps:
                continue  # not cocircular; Delaunay already unique here
            cur = tuple(sorted((pts[u], pts[v])))
            alt = tuple(sorted((pts[w1], pts[w2])))
            if alt < cur and _strictly_convex(pts[u], pts[w1], pts[v], pts[w2]):
                keep = [t for i, t in enumerate(tris) if i not in owners]
                keep.append(tuple(sorted((w1, w2, u))))
                keep.append(tuple(sorted((w1, w2, v))))
                tris = keep
                changed = True
                break
    return tris


def _strictly_convex(a: Point, b: Point, c: Point, d: Point) -> bool:
    quad = [a, b, c, d]
    signs = [
        orient(quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]) for i in range(4)
    ]
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def barycentric(a: Point, b: Point, c: Point, p: Point) -> tuple[float, float, float]:
    den = orient(a, b, c)
    wa = orient(p, b, c) / den
    wb = orient(a, p, c) / den
    return wa, wb, 1.0 - wa - wb


def locate(tri: Triangulation, p: Point):
    """Containing triangle and barycentric weights for an interior point.

    Returns ``(triangle, weights)`` or None when p lies outside the hull.
    Edge and vertex queries land in the first containing triangle in the
    canonical triangle order; the interpolated value does not depend on
    that choice because PL interpolation is continuous across edges.
    """
    tol = -1e-12 * tri.scale
    for t in tri.triangles:
        a, b, c = tri.triangle_points(t)
        w = barycentric(a, b, c, p)
        if min(w) >= tol:
            total = w[0] + w[1] + w[2]
            clipped = tuple(max(0.0, x) for x in w)
            s = sum(clipped)
            return t, (clipped[0] / s, clipped[1] / s, clipped[2] / s) if s else w
    return None


def project_to_hull(tri: Triangulation, p: Point) -> Point:
    """Nearest point on the convex hull boundary to an exterior query."""
    best: Point | None = None
    best_d2 = math.inf
    hull = tri.hull
    for i in range(len(hull)):
        a = tri.points[hull[i]]
        b = tri.points[hull[(i + 1) % len(hull)]]
        q = closest_point_on_segment(p, a, b)
        d2 = (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best = q
    assert best is not None
    return best


def interpolate(tri: Triangulation, values, p: Point):
    """Barycentric interpolation of per-vertex ``values`` at ``p``.

    ``values[i]`` may be a scalar or a sequence of scalars (interpolated
    componentwise).  Exterior queries are evaluated at the nearest hull
    projection.
    """
    hit = locate(tri, p)
    if hit is None:
        hit = locate(tri, project_to_hull(tri, p))
        assert hit is not None, "hull projection must land inside the triangulation"
    (i, j, k), (wi, wj, wk) = hit
    vi, vj, vk = values[i], values[j], values[k]
    if isinstance(vi, (int, float)):
        return wi * vi + wj * vj + wk * vk
    return tuple(
        wi * a + wj * b + wk * c for a, b, c in zip(vi, vj, vk)
    )


def closest_point_on_segment(p: Point, a: Point, b: Point) -> Point:
    abx, aby = b[0] - a[0], b[1] - a[1]
    den = abx * abx + aby * aby
    if den == 0.0:
        return a
    t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / den
    t = min(1.0, max(0.0, t))
    return (a[0] + t * abx, a[1] + t * aby)


def segment_distance(p: Point, a: Point, b: Point) -> float:
    q = closest_point_on_segment(p, a, b)
    return math.hypot(p[0] - q[0], p[1] - q[1])


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi
