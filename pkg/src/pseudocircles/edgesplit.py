"""Per-edge structure of an h-convex drawing under a chosen witness.

An oriented edge splits the remaining vertices by the witnessed side of
their triangle with the edge (left = side 1).  Each part induces a
subdrawing in which the edge is uncrossed; the face of that subdrawing
across the edge is bounded by a cycle through the edge, and the two
cycles bound disjoint closed discs meeting only along the drawn edge.
The leftover region between the two discs is where extension curves are
routed.  Every structural fact used downstream is asserted here as a
named audit instead of being assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cmap import VERTEX
from .convexity import side_is_convex, triangle_contained_in
from .drawing import DrawingError, edge_key, induced_subdrawing


class SplitAuditError(DrawingError):
    """A structural lemma about the split failed (witness or input bug)."""


@dataclass
class Region:
    """Open region of the base map: faces plus interior segments/nodes."""
    faces: frozenset
    segments: frozenset
    nodes: frozenset


@dataclass
class EdgeSplit:
    edge: tuple              # oriented (u0, v0)
    sigma1: frozenset
    sigma2: frozenset
    d1: object               # induced subdrawing on sigma1 + ends
    d2: object
    c1: tuple                # boundary cycle vertices, or None when degenerate
    c2: tuple
    delta1: object           # base-map Side, or None when degenerate
    delta2: object
    f_e: Region
    drawing: object
    witness: object
    f1_face: object = None   # face id of F_e^i within d1 / d2
    f2_face: object = None

    def sigma(self, i):
        return self.sigma1 if i == 1 else self.sigma2

    def cycle(self, i):
        return self.c1 if i == 1 else self.c2

    def delta(self, i):
        return self.delta1 if i == 1 else self.delta2

    def wall_path(self, i):
        """Vertex path C_e^i - e from u0 to v0 (None when degenerate)."""
        c = self.cycle(i)
        if c is None:
            return None
        u0, v0 = self.edge
        k = c.index(u0)
        cyc = c[k:] + c[:k]
        if cyc[1] == v0:
            cyc = (cyc[0],) + tuple(reversed(cyc[1:]))
        if cyc[-1] != v0:
            raise SplitAuditError("boundary cycle does not pass the edge")
        return cyc

    def to_json_obj(self, audits=None):
        obj = {
            "edge": list(self.edge),
            "sigma1": sorted(self.sigma1),
            "sigma2": sorted(self.sigma2),
            "c1": list(self.c1) if self.c1 else None,
            "c2": list(self.c2) if self.c2 else None,
        }
        if audits is not None:
            obj["audits"] = audits
        return obj


def _left_faces_of_edge(d, u0, v0):
    darts = d.chain_darts(u0, v0)
    return {d.map.face_left(a) for a in darts}


def edge_split(d, w, e):
    """Split the drawing along oriented edge e = (u0, v0) under witness w.

    Vertices whose witnessed triangle side lies left of the oriented edge
    form side 1.  Audited: the edge is uncrossed within each side's
    subdrawing, the boundary face is crossing-free and bounded by a
    cycle, and the two discs meet exactly along the drawn edge.
    """
    u0, v0 = e
    d.require_complete()
    key = edge_key(u0, v0)
    first = d.chain_darts(u0, v0)[0]
    sigma1, sigma2 = set(), set()
    for x in d.vertices:
        if x in (u0, v0):
            continue
        T = tuple(sorted((u0, v0, x)))
        side = w.chosen(T)
        sp = d.triangle_sides(T)
        left_face = d.map.face_left(first)
        if left_face in side.faces:
            sigma1.add(x)
        else:
            sigma2.add(x)

    parts = {}
    for i, sigma in ((1, sigma1), (2, sigma2)):
        if not sigma:
            parts[i] = (None, None, None, None, None)
            continue
        sub = induced_subdrawing(d, sigma | {u0, v0})
        if sub.edges[key].chain:
            raise SplitAuditError(
                f"edge {key} is crossed within its side-{i} subdrawing")
        dart = sub.chain_darts(u0, v0)[0]
        flanks = [sub.map.face_left(dart), sub.map.face_right(dart)]
        other = (sigma2 if i == 1 else sigma1)
        if other:
            target = sub.provenance.locate_node(next(iter(other)))
            if target not in flanks:
                raise SplitAuditError(
                    f"face across edge {key} does not see the other side")
            for x in other:
                if sub.provenance.locate_node(x) != target:
                    raise SplitAuditError(
                        f"side-{3-i} vertices split across faces of side {i}")
            face = target
        else:
            # all remaining vertices sit on side i; the boundary face lies
            # on the empty side: right of u0->v0 for i=1, left for i=2
            face = flanks[1] if i == 1 else flanks[0]
        cycle_darts = sub.map.faces()[face]
        nodes = [sub.map.node_of[x] for x in cycle_darts]
        if any(sub.map.node_kind[nd] != VERTEX for nd in nodes):
            raise SplitAuditError(
                f"boundary face of side {i} touches a crossing")
        if len(set(nodes)) != len(nodes):
            raise SplitAuditError(f"boundary of side {i} is not a cycle")
        # orient the cycle as a vertex list and take the disc on the far
        # side from the boundary face F_e^i
        cyc = tuple(nodes)
        base_cycle = d.cycle_darts(list(cyc))
        sp = d.map.side_partition(base_cycle)
        f_base = d.map.faces()[sub.provenance.base_face_of(face)][0]
        f_face_id = d.map.face_of(f_base)
        inside = sp.side_b if f_face_id in sp.side_a.faces else sp.side_a
        if not sigma <= inside.nodes | sp.cycle_nodes:
            raise SplitAuditError(f"side-{i} vertices escape their disc")
        parts[i] = (sub, cyc, sp, inside, face)

    d1, c1, sp1, delta1, f1face = parts[1]
    d2, c2, sp2, delta2, f2face = parts[2]

    # region F_e: complement of the closed discs (degenerate disc = D[e])
    nfaces = len(d.map.faces())
    used_faces = set()
    used_segs = set(d.edge_segments(key))
    used_nodes = {u0, v0} | set(d.edges[key].chain)
    for sp, delta, cyc in ((sp1, delta1, c1), (sp2, delta2, c2)):
        if sp is None:
            continue
        used_faces |= set(delta.faces)
        used_segs |= delta.segments | sp.cycle_segments
        used_nodes |= delta.nodes | sp.cycle_nodes
    f_faces = frozenset(range(nfaces)) - used_faces
    f_segs = frozenset(d.map.segments()) - used_segs
    f_nodes = frozenset(d.map.nodes) - used_nodes
    fe = Region(f_faces, f_segs, f_nodes)

    split = EdgeSplit((u0, v0), frozenset(sigma1), frozenset(sigma2),
                      d1, d2, c1, c2, delta1, delta2, fe, d, w,
                      f1_face=f1face, f2_face=f2face)
    _audit_discs(split)
    return split


def _audit_discs(s):
    """Lemma-level checks that must hold for any valid split."""
    d = s.drawing
    if len(s.sigma1) + len(s.sigma2) != d.n - 2:
        raise SplitAuditError("sides do not partition the other vertices")
    if s.delta1 is not None and s.delta2 is not None:
        if s.delta1.faces & s.delta2.faces:
            raise SplitAuditError("discs overlap (Delta1 ^ Delta2 > D[e])")
        shared_segs = ((s.delta1.segments | _cycle_segs(d, s.c1))
                       & (s.delta2.segments | _cycle_segs(d, s.c2)))
        if shared_segs != set(d.edge_segments(edge_key(*s.edge))):
            raise SplitAuditError("discs meet beyond the drawn edge")
    for i in (1, 2):
        delta = s.delta(i)
        if delta is None:
            continue
        for x in delta.nodes:
            if d.map.node_kind[x] == VERTEX and x not in s.sigma(i):
                raise SplitAuditError(
                    f"vertex {x!r} drawn in disc {i} but not in sigma{i}")


def _cycle_segs(d, cyc):
    return {d.map.segment_of(a) for a in d.cycle_darts(list(cyc))}


def edge_meets_region(d, ekey, region):
    """Does the closed drawn edge have a point in the open region?"""
    if set(d.edges[ekey].chain) & region.nodes:
        return True
    return bool(d.edge_segments(ekey) & region.segments)


def audit_split(s):
    """Report of the named structural checks on one split."""
    d = s.drawing
    report = {}
    fe = s.f_e

    bad = []
    for ekey in d.edges:
        if edge_meets_region(d, ekey, fe):
            a, b = ekey
            sides = {a in s.sigma1 or b in s.sigma1, a in s.sigma2 or b in s.sigma2}
            if sides != {True}:
                bad.append(ekey)
    report["edges_meeting_F_have_ends_in_both_sides"] = bad

    bad = []
    if s.d1 is not None and s.d2 is not None:
        e1_edges = set(s.d1.edges) - {edge_key(*s.edge)}
        e2_edges = set(s.d2.edges) - {edge_key(*s.edge)}
        for x, (ea, eb) in d.crossings.items():
            if (ea in e1_edges and eb in e2_edges) or (ea in e2_edges and eb in e1_edges):
                bad.append(x)
    report["no_cross_side_crossings"] = bad

    f_convex_bad = []
    from .convexity import triangles
    for i in (1, 2):
        sub = (s.d1, s.d2)[i - 1]
        if sub is None or sub.n < 3:
            continue
        face = s.f1_face if i == 1 else s.f2_face
        for T in triangles(sub):
            sp = sub.triangle_sides(T)
            far = sp.side_b if face in sp.side_a.faces else sp.side_a
            if side_is_convex(sub, T, sp, far) is not None:
                f_convex_bad.append((i, T))
    report["side_subdrawings_f_convex"] = f_convex_bad

    ok = all(not v for v in report.values())
    report["ok"] = ok
    return report


def interlacing_check(d, w, e, e2):
    """No 1,2,1,2 pattern around C_e^1 when labeled by the other split."""
    s = edge_split(d, w, e)
    if s.c1 is None:
        return True
    s2 = edge_split(d, w, e2)
    labels = []
    for x in s.c1:
        if x in e2:
            labels.append(3)
        elif x in s2.sigma1:
            labels.append(1)
        else:
            labels.append(2)
    return not _has_cyclic_abab(labels)


def _has_cyclic_abab(labels):
    seq = [x for x in labels if x in (1, 2)]
    if len(seq) < 4:
        return False
    # cyclic 1,2,1,2 detection: count blocks of equal labels cyclically
    blocks = []
    for x in seq:
        if not blocks or blocks[-1] != x:
            blocks.append(x)
    if len(blocks) > 1 and blocks[0] == blocks[-1]:
        blocks.pop()
    return len(blocks) >= 4
