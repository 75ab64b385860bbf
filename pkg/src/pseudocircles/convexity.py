"""Convexity hierarchy of drawings of complete graphs.

A closed side of a drawn 3-cycle is convex when every edge between
vertices in the side stays inside it.  A drawing is convex when every
3-cycle has a convex side, hereditarily convex (h-convex) when sides can
be chosen so that nested triangles receive nested sides, and face convex
(f-convex) when one face of the drawing sees every chosen side on its
far side.  The hereditary choice is solved as a 2-SAT instance over the
per-triangle side options; the forbidden-subdrawing route is implemented
separately and the two are cross-validated in the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .drawing import DrawingError, induced_subdrawing, drawings_isomorphic
from .twosat import TwoSat


def triangles(d):
    return list(itertools.combinations(sorted(d.vertices), 3))


def _closed_side_segments(sp, side):
    return side.segments | sp.cycle_segments


def side_is_convex(d, T, sp, side):
    """Definition test; returns an offending vertex pair or None."""
    inside = sorted(side.nodes & set(d.vertices))
    allowed = _closed_side_segments(sp, side)
    boundary = list(T)
    for i, x in enumerate(inside):
        for y in inside[i + 1:] + boundary:
            darts = d.chain_darts(x, y)
            if not all(d.map.segment_of(a) in allowed for a in darts):
                return (x, y)
    return None


def convex_side_options(d, T):
    """Convex closed sides of the drawn 3-cycle T: [], one, or both."""
    d.require_complete()
    sp = d.triangle_sides(T)
    out = []
    for side in sp.sides():
        if side_is_convex(d, T, sp, side) is None:
            out.append(side)
    return out


@dataclass
class ConvexWitness:
    """h-convexity witness: for every 3-cycle its chosen convex side."""
    drawing: object
    choice: dict    # T (sorted tuple) -> Side

    def chosen(self, T):
        return self.choice[tuple(sorted(T))]

    def side_label(self, T):
        T = tuple(sorted(T))
        sp = self.drawing.triangle_sides(T)
        return "a" if self.choice[T] is sp.side_a else "b"

    def to_json_obj(self):
        return {",".join(T): self.side_label(T) for T in sorted(self.choice)}


@dataclass
class ConvexityReport:
    level: str                      # not-convex | convex | h-convex | f-convex
    witness: object = None          # ConvexWitness or None
    f_face: object = None           # face id or None
    counterexample: object = None   # (T, (x, y)) for not-convex

    def to_json_obj(self, obstructions=None):
        obj = {"level": self.level}
        if self.witness is not None:
            obj["witness"] = self.witness.to_json_obj()
        if self.f_face is not None:
            obj["f_face"] = self.f_face
        if self.counterexample is not None:
            T, pair = self.counterexample
            obj["counterexample"] = {"triangle": list(T), "pair": list(pair)}
        if obstructions is not None:
            obj["obstructions"] = obstructions
        return obj


def triangle_contained_in(d, T, sp_big, side_big):
    """Is the drawn 3-cycle T inside the closed side of another 3-cycle?"""
    allowed = _closed_side_segments(sp_big, side_big)
    return all(d.map.segment_of(a) in allowed for a in d.cycle_darts(list(T)))


def side_contained_side(small, sp_big, side_big):
    return small.faces <= side_big.faces


def _all_options(d):
    opts = {}
    for T in triangles(d):
        opts[T] = convex_side_options(d, T)
    return opts


def h_convex_witness(d, _opts=None):
    """Witness side choice via implication solving, or None.

    Each 3-cycle with two convex sides becomes a boolean; containments of
    one drawn triangle in a candidate side force that side's choice to
    imply the nested choice, including unit clauses for 3-cycles whose
    convex side is unique.  None means unsatisfiable (or not convex).
    """
    d.require_complete()
    opts = _opts if _opts is not None else _all_options(d)
    ts = triangles(d)
    if any(not opts[T] for T in ts):
        return None

    var = {T: i for i, T in enumerate(T2 for T2 in ts if len(opts[T2]) == 2)}
    sat = TwoSat(len(var))

    def literal(T, side):
        sp = d.triangle_sides(T)
        return (var[T], side is sp.side_a)

    # forced triangles are unit clauses
    for T in ts:
        if len(opts[T]) == 1 and T in var:
            raise AssertionError("forced triangle misfiled")

    forced = {T: opts[T][0] for T in ts if len(opts[T]) == 1}

    for Tbig in ts:
        sp_big = d.triangle_sides(Tbig)
        for side_big in opts[Tbig]:
            for Tsmall in ts:
                if Tsmall == Tbig:
                    continue
                if not triangle_contained_in(d, Tsmall, sp_big, side_big):
                    continue
                sp_small = d.triangle_sides(Tsmall)
                inner = (sp_small.side_a
                         if sp_small.side_a.faces <= side_big.faces
                         else sp_small.side_b)
                if any(inner is s for s in opts[Tsmall]):
                    ok_inner = True
                else:
                    ok_inner = False
                big_forced = Tbig in forced
                if big_forced:
                    if not ok_inner:
                        return None
                    if Tsmall in forced:
                        if forced[Tsmall] is not inner:
                            return None
                    else:
                        sat.add_unit(literal(Tsmall, inner))
                else:
                    if not ok_inner:
                        sat.add_unit((var[Tbig], not (side_big is sp_big.side_a)))
                    elif Tsmall in forced:
                        if forced[Tsmall] is not inner:
                            sat.add_unit(
                                (var[Tbig], not (side_big is sp_big.side_a)))
                    else:
                        sat.add_implication(literal(Tbig, side_big),
                                            literal(Tsmall, inner))

    assignment = sat.solve()
    if assignment is None:
        return None
    choice = dict(forced)
    for T, i in var.items():
        sp = d.triangle_sides(T)
        choice[T] = sp.side_a if assignment[i] else sp.side_b
    return ConvexWitness(d, choice)


def audit_witness(d, w):
    """Quadratic hereditary scan; list of violated pairs (empty when good)."""
    bad = []
    ts = triangles(d)
    for Tbig in ts:
        sp_big = d.triangle_sides(Tbig)
        side_big = w.chosen(Tbig)
        if side_is_convex(d, Tbig, sp_big, side_big) is not None:
            bad.append((Tbig, "chosen side not convex"))
        for Tsmall in ts:
            if Tsmall == Tbig:
                continue
            if triangle_contained_in(d, Tsmall, sp_big, side_big):
                if not side_contained_side(w.chosen(Tsmall), sp_big, side_big):
                    bad.append((Tsmall, Tbig))
    return bad


def is_f_convex(d, _opts=None):
    """First face whose far sides are all convex, or None."""
    d.require_complete()
    opts = _opts if _opts is not None else _all_options(d)
    ts = triangles(d)
    convex_flags = {}
    for T in ts:
        sp = d.triangle_sides(T)
        convex_flags[T] = (any(s is sp.side_a for s in opts[T]),
                           any(s is sp.side_b for s in opts[T]))
    nfaces = len(d.map.faces())
    for face in range(nfaces):
        ok = True
        for T in ts:
            sp = d.triangle_sides(T)
            if face in sp.side_a.faces:
                far_ok = convex_flags[T][1]
            elif face in sp.side_b.faces:
                far_ok = convex_flags[T][0]
            else:
                ok = False
                break
            if not far_ok:
                ok = False
                break
        if ok:
            return face
    return None


def classify_convexity(d):
    """Place the drawing in the hierarchy, with witnesses."""
    d.require_complete()
    opts = _all_options(d)
    for T in triangles(d):
        if not opts[T]:
            sp = d.triangle_sides(T)
            pair = side_is_convex(d, T, sp, sp.side_a)
            return ConvexityReport("not-convex", counterexample=(T, pair))
    witness = h_convex_witness(d, _opts=opts)
    if witness is None:
        return ConvexityReport("convex")
    face = is_f_convex(d, _opts=opts)
    if face is not None:
        return ConvexityReport("f-convex", witness=witness, f_face=face)
    return ConvexityReport("h-convex", witness=witness)


def match_h_obstructions(d):
    """Occurrences of the three forbidden subdrawings (two K5s, one K6)."""
    from .corpus import h_obstructions
    d.require_complete()
    obs = h_obstructions()
    found = []
    by_size = {}
    for name, od in obs.items():
        by_size.setdefault(od.n, []).append((name, od))
    for size, items in sorted(by_size.items()):
        if d.n < size:
            continue
        for S in itertools.combinations(sorted(d.vertices), size):
            sub = induced_subdrawing(d, S)
            for name, od in items:
                if sub.crossing_count() != od.crossing_count():
                    continue
                if drawings_isomorphic(sub, od):
                    found.append({"subset": list(S), "obstruction": name})
    return found


def two_page_side_rule(d, spec):
    """Convex-side rule for crossing-minimal 2-page drawings, n even.

    Same-page triangles take their bounded side; when exactly two edges
    share a page, the unbounded side is taken iff the vertex on both of
    them is the spine-middle one.
    """
    if len(spec.spine) % 2 != 0:
        raise DrawingError("side rule is stated for even n only")
    pos = {v: i for i, v in enumerate(spec.spine)}
    choice = {}
    for T in triangles(d):
        x, y, z = sorted(T, key=lambda v: pos[v])
        pages = {frozenset(p): spec.page[tuple(sorted(p))] for p in
                 ((x, y), (x, z), (y, z))}
        sp = d.triangle_sides(T)
        spine_rest = [v for v in spec.spine if v not in T]
        if len(set(pages.values())) == 1:
            bounded = _bounded_triangle_side(d, T, sp, spine_rest, pos)
            choice[tuple(sorted(T))] = bounded
        else:
            vals = list(pages.values())
            maj = "top" if vals.count("top") == 2 else "bottom"
            both = [v for v in (x, y, z)
                    if sum(1 for p, pg in pages.items() if v in p and pg == maj) == 2]
            mid = both[0] == y
            bounded = _bounded_triangle_side(d, T, sp, spine_rest, pos)
            unbounded = sp.other(bounded)
            choice[tuple(sorted(T))] = unbounded if mid else bounded
    return ConvexWitness(d, choice)


def _bounded_triangle_side(d, T, sp, spine_rest, pos):
    """Side of T not containing the spine's far ends (the bounded one)."""
    x, z = min(T, key=lambda v: pos[v]), max(T, key=lambda v: pos[v])
    outside = [v for v in spine_rest if pos[v] < pos[x] or pos[v] > pos[z]]
    if outside:
        far = outside[0]
        side = sp.side_of_node(far)
        return sp.other(side)
    # triangle spans the whole spine: the bounded side is the one whose
    # vertices all lie between x and z
    for side in sp.sides():
        if all(pos[x] < pos[v] < pos[z] for v in side.nodes & set(d.vertices)):
            return side
    return sp.side_a
