"""Rational realization of f-convex drawings as planar point sets.

An f-convex drawing is pseudolinear, and at the sizes handled here the
abstract order type read off the drawing is realizable by points.
Placement is incremental: each new point must satisfy the orientation
sign of every triple it forms with two placed points; those constraints
are half-planes, so the feasible cell is a convex polygon tracked
exactly with Fractions.  A candidate realization is accepted only when
rebuilding the drawing from the points reproduces the input exactly
(same labels, chains and rotations); order types can admit several
drawings differing by triangle mutations, hence the verify-and-retry
loop with randomized interior points.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .drawing import edge_key
from .spheregeom import DegeneracyError, all_pairs, build_drawing_from_arcs


class RealizationError(ValueError):
    pass


def drawing_chirotope(d, outer_face):
    """Orientation of every sorted vertex triple: +1 when the side of the
    drawn triangle away from the outer face lies left of the a->b->c walk."""
    chi = {}
    for T in itertools.combinations(sorted(d.vertices), 3):
        sp = d.triangle_sides(T)
        inner = sp.side_b if outer_face in sp.side_a.faces else sp.side_a
        walk = d.cycle_darts(list(T))
        left = d.map.face_left(walk[0])
        chi[T] = 1 if left in inner.faces else -1
    return chi


def _triple_halfplane(idx, pa, pb):
    """det of the sorted triple as A*x + B*y + C in the unknown point.

    idx: position of the unknown in the triple; pa, pb: the two known
    points in the order they appear among the remaining positions.
    """
    (xa, ya), (xb, yb) = pa, pb
    if idx == 0:
        return (ya - yb, xb - xa, xa * yb - ya * xb)
    if idx == 1:
        return (yb - ya, -(xb - xa), ya * (xb - xa) - xa * (yb - ya))
    return (-(yb - ya), xb - xa, (yb - ya) * xa - (xb - xa) * ya)


def _clip(poly, A, B, C):
    """Clip a convex polygon to the open half-plane A*x + B*y + C > 0."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = A * p[0] + B * p[1] + C
        fq = A * q[0] + B * q[1] + C
        if fp > 0:
            out.append(p)
        if (fp > 0) != (fq > 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _poly_area2(poly):
    s = Fraction(0)
    for i in range(len(poly)):
        p, q = poly[i], poly[(i + 1) % len(poly)]
        s += p[0] * q[1] - p[1] * q[0]
    return abs(s)


def _interior_point(poly, rng):
    ws = [Fraction(rng.randint(1, 97)) for _ in poly]
    s = sum(ws)
    return (sum(w * p[0] for w, p in zip(ws, poly)) / s,
            sum(w * p[1] for w, p in zip(ws, poly)) / s)


def place_points(chi, vertices, rng):
    """One incremental placement attempt; None when a cell comes up empty."""
    B0 = Fraction(1 << 16)
    pos = {vertices[0]: (Fraction(0), Fraction(0)),
           vertices[1]: (Fraction(1), Fraction(0))}
    for v in vertices[2:]:
        poly = [(-B0, -B0), (B0, -B0), (B0, B0), (-B0, B0)]
        placed = sorted(pos)
        for a, b in itertools.combinations(placed, 2):
            T = tuple(sorted((a, b, v)))
            idx = T.index(v)
            knowns = [x for x in T if x != v]
            A, Bc, C = _triple_halfplane(idx, pos[knowns[0]], pos[knowns[1]])
            if chi[T] < 0:
                A, Bc, C = -A, -Bc, -C
            poly = _clip(poly, A, Bc, C)
            if len(poly) < 3 or _poly_area2(poly) == 0:
                return None
        pos[v] = _interior_point(poly, rng)
    return pos


def labeled_structure(d):
    """Exact labeled signature: chains by crossing partners, rotations."""
    chains = {}
    for key, e in d.edges.items():
        descr = []
        for x in e.chain:
            ea, eb = d.crossings[x]
            descr.append(eb if ea == key else ea)
        chains[key] = tuple(descr)
    rots = {}
    for v in d.vertices:
        seq = [d.map.names[a][0] for a in d.map.node_darts[v]]
        k = seq.index(min(seq))
        rots[v] = tuple(seq[k:] + seq[:k])
    xsigns = {}
    for x, (ea, eb) in sorted(d.crossings.items()):
        lst = [d.map.names[a] for a in d.map.node_darts[x]]
        fwd_e = next(nm for nm in lst if nm[0] == ea and nm[2] > 0)
        i = lst.index(fwd_e)
        nxt = lst[(i + 1) % 4]
        ia = d.edges[ea].chain.index(x)
        ib = d.edges[eb].chain.index(x)
        xsigns[(ea, ia, eb, ib)] = (nxt[0], nxt[2])
    return (chains, rots, xsigns)


def realize_f_convex(d, outer_face, seed=0, tries=60):
    """Rational planar points whose straight-line drawing equals d.

    Points are returned as exact (x, y, 1) directions (upper-hemisphere
    lift); raises RealizationError when no matching realization is found
    within the retry budget.
    """
    chi = drawing_chirotope(d, outer_face)
    target = labeled_structure(d)
    vertices = sorted(d.vertices)
    for t in range(tries):
        rng = random.Random((seed, t))
        order = list(vertices)
        if t % 3 == 2:
            rng.shuffle(order)
            order = order  # chirotope keys are sorted triples, order-free
        pos = place_points(chi, order, rng)
        if pos is None:
            continue
        pts = {v: (p[0], p[1], Fraction(1)) for v, p in pos.items()}
        paths = {edge_key(u, v): [pts[edge_key(u, v)[0]], pts[edge_key(u, v)[1]]]
                 for (u, v) in all_pairs(vertices)}
        try:
            built = build_drawing_from_arcs(pts, paths)
        except DegeneracyError:
            continue
        if labeled_structure(built) == target:
            return pts
    raise RealizationError(
        "no straight-line realization reproduced the drawing "
        f"within {tries} attempts (n={d.n})")
