"""Exact geometry kernels for quantized rectilinear floor plans.

All predicates (intersection, containment, area) run in integer arithmetic;
floating point only appears in distance outputs. Vertex loops are sequences
of (x, y) integer tuples; the closing edge is implicit.
"""

import math

import numpy as np

from .errors import DegenerateArea, NotRectilinear, SelfIntersecting


def _loop(obj):
    """Extract a vertex loop from a polygon-like object or bare sequence."""
    verts = getattr(obj, "vertices", obj)
    return [(int(x), int(y)) for x, y in verts]


def _edges_of(obj):
    """Edge list of a polygon loop, a segment object, or a bare sequence.

    Bare 2-point sequences are treated as a single open segment; longer
    sequences as closed loops.
    """
    if hasattr(obj, "vertices"):
        pts = _loop(obj.vertices)
        return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
    if hasattr(obj, "a") and hasattr(obj, "b"):
        a, b = obj.a, obj.b
        return [((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))]
    pts = _loop(obj)
    if len(pts) == 2:
        return [(pts[0], pts[1])]
    return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]


def signed_area2(loop):
    """Twice the signed shoelace area (positive for CCW), exact integer."""
    pts = _loop(loop)
    total = 0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        total += x0 * y1 - x1 * y0
    return total


def _is_rectilinear(pts):
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        if (x0 == x1) == (y0 == y1):  # both equal: zero edge; both differ: diagonal
            return False
    return True


def _direction(p, q):
    return ((q[0] > p[0]) - (q[0] < p[0]), (q[1] > p[1]) - (q[1] < p[1]))


def _segments_intersect(p1, p2, q1, q2):
    """Exact closed-segment intersection test (integer cross products)."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    def on_segment(a, b, c):
        return (
            min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    o1 = orient(p1, p2, q1)
    o2 = orient(p1, p2, q2)
    o3 = orient(q1, q2, p1)
    o4 = orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_segment(p1, p2, q1):
        return True
    if o2 == 0 and on_segment(p1, p2, q2):
        return True
    if o3 == 0 and on_segment(q1, q2, p1):
        return True
    if o4 == 0 and on_segment(q1, q2, p2):
        return True
    return False


def is_simple_loop(loop):
    """True if the closed loop has no repeated vertices and no two
    non-adjacent edges touch or cross."""
    pts = _loop(loop)
    n = len(pts)
    if n < 3 or len(set(pts)) != n:
        return False
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                return False
    return True


def normalize_loop(loop):
    """Canonical form of a rectilinear simple loop.

    Returns the loop CCW-oriented, with collinear midpoints removed, starting
    at the lexicographically smallest vertex. Raises NotRectilinear,
    SelfIntersecting, or DegenerateArea.
    """
    pts = _loop(loop)
    # drop consecutive duplicates (including the wraparound)
    dedup = []
    for p in pts:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    if len(dedup) < 4:
        raise DegenerateArea(f"loop collapses to {len(dedup)} vertices")
    if not _is_rectilinear(dedup):
        raise NotRectilinear(f"loop has a non-axis-aligned edge: {dedup}")

    # remove midpoints of straight runs; a 180-degree reversal is a spur
    changed = True
    while changed:
        changed = False
        n = len(dedup)
        for i in range(n):
            d_in = _direction(dedup[(i - 1) % n], dedup[i])
            d_out = _direction(dedup[i], dedup[(i + 1) % n])
            if d_in == d_out:
                dedup.pop(i)
                changed = True
                break
            if d_in == (-d_out[0], -d_out[1]):
                raise SelfIntersecting(f"boundary reverses onto itself at {dedup[i]}")
    if len(dedup) < 4:
        raise DegenerateArea("loop collapses below 4 vertices")

    if not is_simple_loop(dedup):
        raise SelfIntersecting("non-adjacent edges touch or cross")

    area2 = signed_area2(dedup)
    if area2 == 0:
        raise DegenerateArea("loop encloses zero area")
    if area2 < 0:
        dedup.reverse()

    start = min(range(len(dedup)), key=lambda i: dedup[i])
    return tuple(dedup[start:] + dedup[:start])


def polygon_area(poly):
    """Exact enclosed area in cells^2 of a simple rectilinear loop."""
    pts = normalize_loop(poly)
    return abs(signed_area2(pts)) // 2


def rect_decompose(poly):
    """Split a simple rectilinear polygon into disjoint axis-aligned
    rectangles (x0, y0, x1, y1) whose union is exactly its interior.

    Horizontal slab sweep: cut at every distinct vertex y; inside each slab
    the interior is bounded by vertical edges spanning the slab, paired left
    to right.
    """
    pts = normalize_loop(poly)
    n = len(pts)
    verticals = []
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        if x0 == x1:
            verticals.append((x0, min(y0, y1), max(y0, y1)))
    ys = sorted({p[1] for p in pts})
    rects = []
    for y0, y1 in zip(ys, ys[1:]):
        xs = sorted(x for x, lo, hi in verticals if lo <= y0 and hi >= y1)
        for xa, xb in zip(xs[0::2], xs[1::2]):
            rects.append((xa, y0, xb, y1))
    return rects


def union_area(rooms):
    """Exact area in cells^2 covered by at least one room polygon."""
    rects = []
    for room in rooms:
        rects.extend(rect_decompose(room))
    if not rects:
        return 0
    xs = np.array(sorted({r[0] for r in rects} | {r[2] for r in rects}), dtype=np.int64)
    ys = np.array(sorted({r[1] for r in rects} | {r[3] for r in rects}), dtype=np.int64)
    covered = np.zeros((len(xs) - 1, len(ys) - 1), dtype=bool)
    for x0, y0, x1, y1 in rects:
        i0, i1 = np.searchsorted(xs, (x0, x1))
        j0, j1 = np.searchsorted(ys, (y0, y1))
        covered[i0:i1, j0:j1] = True
    cell = np.outer(np.diff(xs), np.diff(ys))
    return int(cell[covered].sum())


def pairwise_overlap_area(rooms):
    """Total multiplicity-counted overlap: sum of areas minus union area."""
    total = sum(polygon_area(r) for r in rooms)
    return total - union_area(rooms)


def point_strictly_inside(point, loop):
    """Strict interior test for a rectilinear loop (half-open crossing rule).

    Indeterminate for points exactly on the boundary; callers resolve that
    case through edge distances first.
    """
    px, py = point
    pts = _loop(loop)
    crossings = 0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        if x0 != x1:
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        if lo <= py < hi and x0 > px:
            crossings += 1
    return crossings % 2 == 1


def _point_segment_distance(p, a, b):
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = p[0] - a[0], p[1] - a[1]
    denom = abx * abx + aby * aby
    if denom == 0:
        return math.hypot(apx, apy)
    t = (apx * abx + apy * aby) / denom
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(apx - t * abx, apy - t * aby)


def segment_distance(p1, p2, q1, q2):
    """Minimum Euclidean distance between two closed segments, in cells."""
    if _segments_intersect(p1, p2, q1, q2):
        return 0.0
    return min(
        _point_segment_distance(q1, p1, p2),
        _point_segment_distance(q2, p1, p2),
        _point_segment_distance(p1, q1, q2),
        _point_segment_distance(p2, q1, q2),
    )


def min_distance(a, b, scale=None):
    """Minimum distance between the boundary point sets of two operands
    (polygons, door segments, or bare loops), converted to meters.

    Zero whenever the operands touch, cross, or one encloses the other.
    `scale` is a ScaleConfig (or bare meters-per-cell factor); omit it for
    plain cell units.
    """
    edges_a = _edges_of(a)
    edges_b = _edges_of(b)
    best = math.inf
    for pa, pb in edges_a:
        for qa, qb in edges_b:
            d = segment_distance(pa, pb, qa, qb)
            if d < best:
                best = d
            if best == 0.0:
                break
        if best == 0.0:
            break
    if best > 0.0:
        # no boundary contact: one operand may still lie entirely inside
        # the other, which counts as overlap
        if _encloses(a, edges_b) or _encloses(b, edges_a):
            best = 0.0
    factor = getattr(scale, "meters_per_cell", scale)
    if factor is None:
        factor = 1.0
    return best * float(factor)


def _encloses(container, edges_inner):
    if not hasattr(container, "vertices") and (
        hasattr(container, "a") or len(_loop(container)) == 2
    ):
        return False
    loop = container.vertices if hasattr(container, "vertices") else container
    return point_strictly_inside(edges_inner[0][0], loop)
