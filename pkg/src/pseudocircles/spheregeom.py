"""Exact spherical geometry: predicates, generators, combinatorializers.

Points are non-zero integer (or Fraction) 3-vectors understood as
directions from the sphere's center; unit length is never needed because
every question below is a sign of a determinant or dot product.  Planar
inputs (x, y) embed on the upper hemisphere as (x, y, 1): geodesic minor
arcs between such points project to straight segments in the z=1 plane,
so one exact builder serves both spherical and planar corpus data.
"""

from __future__ import annotations

import functools
import random
from fractions import Fraction

from .drawing import Edge, PlanarDrawing, edge_key


class DegeneracyError(ValueError):
    """Input points are not in general position for the computation."""


# -- integer/rational vector primitives ---------------------------------

def vsub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def det3(a, b, c):
    return dot(a, cross(b, c))


def sgn(x):
    return (x > 0) - (x < 0)


def is_zero(a):
    return a[0] == 0 and a[1] == 0 and a[2] == 0


def canon_dir(a):
    """Scale-canonical representative of a ray direction (sign kept)."""
    if is_zero(a):
        raise DegeneracyError("zero direction")
    if all(isinstance(x, int) for x in a):
        from math import gcd
        g = gcd(gcd(abs(a[0]), abs(a[1])), abs(a[2]))
        return (a[0] // g, a[1] // g, a[2] // g)
    fr = [Fraction(x) for x in a]
    den = 1
    for f in fr:
        den = den * f.denominator // _gcd(den, f.denominator)
    ints = tuple(int(f * den) for f in fr)
    return canon_dir(ints)


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


# -- geodesic arc predicates ---------------------------------------------

def _interior_of_arc(w, p, q, n):
    """Is w (a point of the arc's great circle) interior to minor arc pq?

    Traversal p -> q is counterclockwise around n = p x q and subtends
    less than half a turn, so membership is a pair of wedge signs.
    """
    s1 = sgn(det3(n, p, w))
    s2 = sgn(det3(n, w, q))
    if s1 == 0 or s2 == 0:
        raise DegeneracyError("crossing coincides with an arc endpoint")
    return s1 > 0 and s2 > 0


def arcs_cross(p, q, r, s):
    """Do the minor arcs pq and rs cross (strict transversal interior point)?

    Raises DegeneracyError when a sign test is zero (touching, shared
    circle, or endpoint incidences); callers supply generic inputs.
    """
    n1 = cross(p, q)
    n2 = cross(r, s)
    if is_zero(n1) or is_zero(n2):
        raise DegeneracyError("arc endpoints are parallel")
    d1r, d1s = sgn(dot(n1, r)), sgn(dot(n1, s))
    d2p, d2q = sgn(dot(n2, p)), sgn(dot(n2, q))
    if 0 in (d1r, d1s, d2p, d2q):
        raise DegeneracyError("arc endpoint on the other arc's circle")
    if d1r == d1s or d2p == d2q:
        return False
    # the circles meet at +-w; separation puts exactly one of the two on
    # each minor arc, so the arcs cross iff it is the same one
    w = cross(n1, n2)
    return _interior_of_arc(w, p, q, n1) == _interior_of_arc(w, r, s, n2)


def arc_crossing_point(p, q, r, s):
    """Canonical direction of the crossing of minor arcs pq, rs."""
    n1 = cross(p, q)
    w = cross(n1, cross(r, s))
    if not _interior_of_arc(w, p, q, n1):
        w = (-w[0], -w[1], -w[2])
    return canon_dir(w)


def order_along_arc(p, q, points):
    """Sort crossing directions along the minor arc from p toward q."""
    n1 = cross(p, q)

    def cmp(w1, w2):
        if w1 == w2:
            return 0
        s = sgn(det3(w1, w2, n1))
        if s == 0:
            raise DegeneracyError("two crossings coincide on an arc")
        return -1 if s > 0 else 1

    return sorted(points, key=functools.cmp_to_key(cmp))


def cyclic_sort_tangents(axis, items):
    """Sort (tangent, payload) pairs counterclockwise around the axis.

    Tangents must be orthogonal to the axis (they are, by construction).
    The view is from outside the sphere looking down the axis.
    """
    ref = items[0][0]

    def classify(t):
        c = sgn(det3(ref, t, axis))
        d = sgn(dot(ref, t))
        if c == 0 and d > 0:
            return 0
        if c > 0:
            return 1
        if c == 0 and d < 0:
            return 2
        return 3

    def cmp(a, b):
        ta, tb = a[0], b[0]
        ca, cb = classify(ta), classify(tb)
        if ca != cb:
            return -1 if ca < cb else 1
        s = sgn(det3(ta, tb, axis))
        if s == 0:
            if a[1] == b[1]:
                return 0
            raise DegeneracyError("two strands share a tangent direction")
        return -1 if s > 0 else 1

    return sorted(items, key=functools.cmp_to_key(cmp))


def vertex_tangent(p, q):
    """Tangent at p of the geodesic toward q."""
    return cross(cross(p, q), p)


# -- generic arc-systems combinatorializer --------------------------------

class _Piece:
    __slots__ = ("owner", "idx", "a", "b", "normal", "hits")

    def __init__(self, owner, idx, a, b):
        self.owner = owner
        self.idx = idx
        self.a = a
        self.b = b
        self.normal = cross(a, b)
        self.hits = []


def _compute_crossings(pieces, allowed_pair):
    """All pairwise piece crossings; populates piece.hits with (w, other)."""
    points = {}
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            P, Q = pieces[i], pieces[j]
            if not allowed_pair(P, Q):
                continue
            shared = {canon_dir(P.a), canon_dir(P.b)} & {canon_dir(Q.a), canon_dir(Q.b)}
            if shared:
                continue
            if arcs_cross(P.a, P.b, Q.a, Q.b):
                w = arc_crossing_point(P.a, P.b, Q.a, Q.b)
                points.setdefault(w, []).append((P, Q))
                P.hits.append((w, Q))
                Q.hits.append((w, P))
    return points


def build_drawing_from_arcs(vertex_pos, edge_paths, name_prefix="x"):
    """Planarize a system of polyline edges into a PlanarDrawing.

    vertex_pos: node id -> integer/Fraction 3-vector.
    edge_paths: sorted end pair -> list of 3-vectors from u to v
        (first/last entries must be the endpoint positions; interior
        entries are bend points, not map nodes).
    """
    pos_canon = {v: canon_dir(p) for v, p in vertex_pos.items()}
    if len(set(pos_canon.values())) != len(pos_canon):
        raise DegeneracyError("two vertices share a direction")

    pieces = []
    for key, path in edge_paths.items():
        if canon_dir(path[0]) != pos_canon[key[0]] or canon_dir(path[-1]) != pos_canon[key[1]]:
            raise ValueError(f"path of edge {key} does not join its ends")
        for i in range(len(path) - 1):
            pieces.append(_Piece(key, i, path[i], path[i + 1]))

    def allowed(P, Q):
        return P.owner != Q.owner

    points = _compute_crossings(pieces, allowed)

    vertex_dirs = set(pos_canon.values())
    names = {}
    for w in sorted(points):
        if w in vertex_dirs:
            raise DegeneracyError("a crossing coincides with a vertex")
        edges_here = {P.owner for pq in points[w] for P in pq}
        if len(points[w]) > 1:
            raise DegeneracyError(f"three or more edges concurrent at {w}")
        names[w] = f"{name_prefix}{len(names)}"

    chains = {}
    cross_pos = {}
    for key, path in edge_paths.items():
        chain = []
        for piece in pieces:
            if piece.owner != key:
                continue
            ws = order_along_arc(piece.a, piece.b, [w for w, _ in piece.hits])
            chain.extend(ws)
        chains[key] = tuple(names[w] for w in chain)
        for w in chain:
            cross_pos[names[w]] = w

    edges = [Edge(k[0], k[1], chains[k]) for k in edge_paths]
    edge_objs = {e.key: e for e in edges}

    # rotations at vertices
    rotations = {}
    incident = {v: [] for v in vertex_pos}
    for key in edge_paths:
        incident[key[0]].append(key)
        incident[key[1]].append(key)
    for v, keys in incident.items():
        p = vertex_pos[v]
        items = []
        for key in keys:
            path = edge_paths[key]
            if key[0] == v:
                t = vertex_tangent(p, path[1])
                dart = (key, 0, 1)
            else:
                t = vertex_tangent(p, path[-2])
                dart = (key, len(chains[key]), -1)
            items.append((t, dart))
        rotations[v] = [d for _, d in cyclic_sort_tangents(p, items)]

    # rotations at crossings; chain node j+1 carries darts (key, j+1, +1)
    # onward and (key, j, -1) backward
    piece_of = {}
    for piece in pieces:
        for w, _ in piece.hits:
            piece_of.setdefault(w, []).append(piece)
    for w in points:
        x = names[w]
        items = []
        for piece in piece_of[w]:
            key = piece.owner
            j = chains[key].index(x)
            fwd_t = cross(piece.normal, w)
            bwd_t = tuple(-c for c in fwd_t)
            items.append((fwd_t, (key, j + 1, 1)))
            items.append((bwd_t, (key, j, -1)))
        rotations[x] = [d for _, d in cyclic_sort_tangents(w, items)]

    d = PlanarDrawing(sorted(vertex_pos), edges, rotations)
    d.coordinates = {
        "vertices": dict(vertex_pos),
        "crossings": cross_pos,
        "straight": {k: len(p) == 2 for k, p in edge_paths.items()},
    }
    return d


def straight_edge_paths(vertex_pos, pairs=None):
    keys = pairs if pairs is not None else all_pairs(sorted(vertex_pos))
    return {edge_key(u, v): [vertex_pos[edge_key(u, v)[0]], vertex_pos[edge_key(u, v)[1]]]
            for (u, v) in keys}


def all_pairs(vertices):
    vs = sorted(vertices)
    return [(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs))]


# -- random spherical drawings --------------------------------------------

class SphericalPointSet:
    """n exact directions, no two parallel, no three on a great circle."""

    def __init__(self, points, seed):
        self.points = points
        self.seed = seed
        self.check()

    def check(self):
        pts = list(self.points.values())
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if is_zero(cross(pts[i], pts[j])):
                    raise DegeneracyError("parallel directions")
                for k in range(j + 1, len(pts)):
                    if det3(pts[i], pts[j], pts[k]) == 0:
                        raise DegeneracyError("three points on a great circle")


_SCALE = 1 << 20


def _random_direction(rng):
    while True:
        v = (round(rng.gauss(0, 1) * _SCALE),
             round(rng.gauss(0, 1) * _SCALE),
             round(rng.gauss(0, 1) * _SCALE))
        if not is_zero(v):
            return v


def random_spherical_point_set(n, seed, max_tries=64):
    rng = random.Random(seed)
    for _ in range(max_tries):
        pts = {f"v{i+1}": _random_direction(rng) for i in range(n)}
        try:
            return SphericalPointSet(pts, seed)
        except DegeneracyError:
            continue
    raise DegeneracyError(f"seed {seed}: cannot find generic points (re-seed)")


def random_spherical_drawing(n, seed, max_tries=64):
    """Random spherical drawing of K_n: uniform-ish points, geodesic edges."""
    if not 3 <= n <= 12:
        raise ValueError("n must be between 3 and 12")
    last = None
    for attempt in range(max_tries):
        ps = random_spherical_point_set(n, (seed, attempt), max_tries)
        paths = {edge_key(u, v): [ps.points[min(u, v)], ps.points[max(u, v)]]
                 for (u, v) in all_pairs(ps.points)}
        try:
            d = build_drawing_from_arcs(ps.points, paths)
        except DegeneracyError as exc:
            last = exc
            continue
        ps.seed = seed
        return ps, d
    raise DegeneracyError(f"seed {seed}: degenerate samples persist ({last})")


# -- 2-page book drawings ---------------------------------------------------

class TwoPageSpec:
    """Spine order plus a page (top/bottom) for every edge."""

    def __init__(self, spine, page):
        self.spine = list(spine)
        self.page = {edge_key(u, v): p for (u, v), p in page.items()}
        for key, p in self.page.items():
            if p not in ("top", "bottom"):
                raise ValueError(f"bad page {p!r}")
        for u, v in all_pairs(self.spine):
            if edge_key(u, v) not in self.page:
                raise ValueError(f"edge {(u, v)} has no page")


def two_page_drawing(spec):
    """Build the drawing of a 2-page layout combinatorially and exactly.

    Vertices sit at integer spine positions; a top (bottom) edge is the
    half-circle above (below) the spine. Same-page edges cross exactly
    when their spine intervals interleave.
    """
    spine = spec.spine
    n = len(spine)
    pos = {v: i + 1 for i, v in enumerate(spine)}

    def interval(key):
        a, b = pos[key[0]], pos[key[1]]
        return (a, b) if a < b else (b, a)

    crossings = {}
    on_edge = {key: [] for key in spec.page}
    names = {}
    for i, e in enumerate(sorted(spec.page)):
        for f in sorted(spec.page):
            if f <= e or spec.page[e] != spec.page[f]:
                continue
            (a, b), (c, d) = interval(e), interval(f)
            if a < c < b < d or c < a < d < b:
                m1, r1 = Fraction(a + b, 2), Fraction(b - a, 2)
                m2, r2 = Fraction(c + d, 2), Fraction(d - c, 2)
                x0 = (r1 * r1 - r2 * r2 + m2 * m2 - m1 * m1) / (2 * (m2 - m1))
                name = f"x{len(names)}"
                names[(e, f)] = name
                crossings[name] = (e, f, x0)
                on_edge[e].append((x0, name, m1))
                on_edge[f].append((x0, name, m2))

    chains = {}
    for key, hits in on_edge.items():
        a, b = interval(key)
        hits.sort()
        seq = [h[1] for h in hits]
        if pos[key[0]] > pos[key[1]]:
            seq.reverse()
        chains[key] = tuple(seq)

    edges = [Edge(k[0], k[1], chains[k]) for k in sorted(spec.page)]

    rotations = {}
    for v in spine:
        i = pos[v]
        tr, tl, bl, br = [], [], [], []
        for key in spec.page:
            if v not in key:
                continue
            w = key[0] if key[1] == v else key[1]
            j = pos[w]
            dart = (key, 0, 1) if key[0] == v else (key, len(chains[key]), -1)
            entry = (j, dart)
            if spec.page[key] == "top":
                (tr if j > i else tl).append(entry)
            else:
                (bl if j < i else br).append(entry)
        tr.sort()                     # nearest right neighbour first
        tl.sort()                     # farthest left first
        bl.sort(key=lambda t: -t[0])  # nearest left first
        br.sort(key=lambda t: -t[0])  # farthest right first
        rotations[v] = [d for _, d in tr + tl + bl + br]

    for name, (e, f, x0) in crossings.items():
        top = spec.page[e] == "top"
        items = []
        for key in (e, f):
            a, b = interval(key)
            m = Fraction(a + b, 2)
            j = chains[key].index(name)
            jj = j if pos[key[0]] < pos[key[1]] else len(chains[key]) - 1 - j
            alpha_right = (m - x0) if top else (x0 - m)
            right_dart = (key, j + 1, 1) if pos[key[0]] < pos[key[1]] else (key, j, -1)
            left_dart = (key, j, -1) if pos[key[0]] < pos[key[1]] else (key, j + 1, 1)
            items.append(((1, alpha_right), right_dart))
            items.append(((-1, -alpha_right), left_dart))

        def angle_key(t):
            s, alpha = t
            if s > 0 and alpha >= 0:
                return (0, alpha)
            if s < 0 and alpha > 0:
                return (1, -alpha)
            if s < 0:
                return (2, -alpha)
            return (3, alpha)

        items.sort(key=lambda it: angle_key(it[0]))
        rotations[name] = [d for _, d in items]

    return PlanarDrawing(list(spine), edges, rotations)
