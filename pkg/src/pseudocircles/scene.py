"""Mutable refined maps: a base drawing plus inserted closed curves.

The scene is the substrate for building extension curve families.  Every
curve contains the drawn chain of its edge and is completed by an arc
routed through faces; curve/edge and curve/curve crossings are real map
nodes created by surgery.  Routing never touches coordinates: a curve is
threaded strand by strand, each crossing subdividing the strand it
pierces at the tail end, so the "slot order" of parallel strands along
any wall is simply the refinement order of its sub-segments.

Surgeries: start/cross/finish of completion arcs, wall-hug routing,
curve deletion (splicing crossings away), a Reidemeister II push of a
curve dart across another curve's dart, and a Reidemeister III slide of
a curve across a crossing of two other curves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cmap import VERTEX, CROSSING


class SceneError(ValueError):
    pass


LEFT, RIGHT = "left", "right"


@dataclass
class CurveRec:
    cid: str
    ekey: tuple
    anchors: tuple


@dataclass
class _Pending:
    cid: str
    dart: int


class Scene:
    """Refined combinatorial map over a base PlanarDrawing."""

    def __init__(self, drawing):
        self.base = drawing
        self.theta = []
        self.node_of_dart = []
        self.owner = []           # ("edge", ekey) | ("curve", cid)
        self.alive = []
        self.node_darts = {}      # node -> CCW list of outgoing darts
        self.node_kind = {}
        self.edge_chains = {}     # ekey -> forward darts in u->v order
        self.curves = {}          # cid -> CurveRec
        self.curve_for_edge = {}  # ekey -> set of cids containing D[e]
        self._q = 0
        self._faces = None

        m = drawing.map
        trans = {}
        for name in m.names:
            trans[name] = self._new_dart(("edge", name[0]), None)
        for d, name in enumerate(m.names):
            self.theta[trans[name]] = trans[m.names[m.theta[d]]]
        for node in m.nodes:
            self.node_kind[node] = m.node_kind[node]
            self.node_darts[node] = [trans[m.names[d]] for d in m.node_darts[node]]
            for d in self.node_darts[node]:
                self.node_of_dart[d] = node
        for key in drawing.edges:
            self.edge_chains[key] = [trans[m.names[d]] for d in drawing.chain_darts(*key)]
            self.curve_for_edge[key] = set()

    # -- bookkeeping -----------------------------------------------------

    def _new_dart(self, owner, node):
        d = len(self.theta)
        self.theta.append(-1)
        self.node_of_dart.append(node)
        self.owner.append(owner)
        self.alive.append(True)
        return d

    def _new_node(self):
        while True:
            self._q += 1
            node = f"q{self._q}"
            if node not in self.node_darts:
                break
        self.node_kind[node] = CROSSING
        self.node_darts[node] = []
        return node

    def head_node(self, d):
        return self.node_of_dart[self.theta[d]]

    def segment_of(self, d):
        return min(d, self.theta[d])

    def dirty(self):
        self._faces = None

    def rot_next(self, d):
        lst = self.node_darts[self.node_of_dart[d]]
        return lst[(lst.index(d) + 1) % len(lst)]

    def rot_prev(self, d):
        lst = self.node_darts[self.node_of_dart[d]]
        return lst[(lst.index(d) - 1) % len(lst)]

    def phi(self, d):
        return self.rot_prev(self.theta[d])

    def faces(self):
        if self._faces is None:
            face_of = {}
            faces = []
            for d0 in range(len(self.theta)):
                if not self.alive[d0] or d0 in face_of:
                    continue
                fid = len(faces)
                d = d0
                orbit = []
                while d not in face_of:
                    face_of[d] = fid
                    orbit.append(d)
                    d = self.phi(d)
                if d != d0:
                    raise SceneError("scene faces do not close")
                faces.append(orbit)
            self._faces = (faces, face_of)
        return self._faces[0]

    def face_of(self, d):
        self.faces()
        return self._faces[1][d]

    def live_darts(self):
        return [d for d in range(len(self.theta)) if self.alive[d]]

    def validate(self):
        for d in self.live_darts():
            t = self.theta[d]
            if t < 0 or not self.alive[t] or self.theta[t] != d or t == d:
                raise SceneError(f"broken involution at dart {d}")
            if d not in self.node_darts[self.node_of_dart[d]]:
                raise SceneError(f"dart {d} missing from its rotation")
        total = 0
        for node, lst in self.node_darts.items():
            total += len(lst)
            for d in lst:
                if not self.alive[d] or self.node_of_dart[d] != node:
                    raise SceneError(f"rotation at {node!r} lists a foreign dart")
        V = len(self.node_darts)
        E = total // 2
        F = len(self.faces())
        if V - E + F != 2:
            raise SceneError(f"scene not spherical: {V}-{E}+{F}={V - E + F}")
        for key, chain in self.edge_chains.items():
            if self.node_of_dart[chain[0]] != key[0] or self.head_node(chain[-1]) != key[1]:
                raise SceneError(f"edge chain {key} detached")
            for a, b in zip(chain, chain[1:]):
                if self.head_node(a) != self.node_of_dart[b]:
                    raise SceneError(f"edge chain {key} broken")
        for cid, rec in self.curves.items():
            if rec.ekey in self.edge_chains:
                self.curve_walk(cid)   # open routed arcs have no chain

    # -- curve membership --------------------------------------------------

    def curve_of_dart(self, d):
        kind, key = self.owner[d]
        if kind == "curve":
            return {key}
        return self.curve_for_edge.get(key, set())

    def register_curve(self, cid, ekey, anchors):
        self.curves[cid] = CurveRec(cid, ekey, anchors)
        self.curve_for_edge.setdefault(ekey, set()).add(cid)

    def curve_strands_at(self, cid, node):
        return [d for d in self.node_darts[node] if cid in self.curve_of_dart(d)]

    def curve_walk(self, cid):
        """Closed dart walk of the curve: drawn chain then completion."""
        rec = self.curves[cid]
        chain = self.edge_chains[rec.ekey]
        walk = list(chain)
        guard = 0
        d = self._next_strand(cid, walk[-1])
        while d != walk[0]:
            walk.append(d)
            d = self._next_strand(cid, d)
            guard += 1
            if guard > len(self.theta):
                raise SceneError(f"curve {cid} does not close")
        return walk

    def _next_strand(self, cid, dart):
        back = self.theta[dart]
        node = self.node_of_dart[back]
        outs = [d for d in self.node_darts[node]
                if d != back and cid in self.curve_of_dart(d)]
        if len(outs) != 1:
            raise SceneError(f"curve {cid} branches at {node!r}")
        return outs[0]

    def curve_nodes(self, cid):
        rec = self.curves[cid]
        nodes = set()
        for d in self.curve_walk(cid):
            nodes.add(self.node_of_dart[d])
        return nodes

    def curves_intersect(self, c1, c2):
        return bool(self.curve_nodes(c1) & self.curve_nodes(c2))

    def intersection_count(self, c1, c2):
        return len(self.curve_nodes(c1) & self.curve_nodes(c2))

    # -- crossing surgery ----------------------------------------------------

    def cross(self, pending, strand, from_left):
        """Cross an existing strand, subdividing it at its tail end.

        With the strand pointing "north" and coming from its left (west),
        the CCW rotation at the new node is [north, west, south, east]:
        strand-far, reversed-incoming, strand-back, outgoing.
        """
        cid = pending.cid
        if cid in self.curve_of_dart(strand):
            raise SceneError("curve asked to cross itself")
        x = self._new_node()
        s = strand
        sb = self.theta[s]
        owner = self.owner[s]

        s_far = self._new_dart(owner, x)      # x -> old head
        s_back = self._new_dart(owner, x)     # x -> tail
        self.theta[s_far] = sb
        self.theta[sb] = s_far
        self.theta[s] = s_back
        self.theta[s_back] = s

        c_in_rev = self._new_dart(("curve", cid), x)
        self.theta[pending.dart] = c_in_rev
        self.theta[c_in_rev] = pending.dart
        c_out = self._new_dart(("curve", cid), x)

        if from_left:
            self.node_darts[x] = [s_far, c_in_rev, s_back, c_out]
        else:
            self.node_darts[x] = [s_far, c_out, s_back, c_in_rev]

        self._chain_insert_after_cross(owner, s, s_far, s_back)
        pending.dart = c_out
        self.dirty()
        return x

    def _chain_insert_after_cross(self, owner, s, s_far, s_back):
        kind, key = owner
        if kind != "edge":
            return
        chain = self.edge_chains[key]
        if s in chain:
            i = chain.index(s)
            chain[i:i + 1] = [s, s_far]
        else:
            sb = self.theta[s_far]
            i = chain.index(sb)
            chain[i:i + 1] = [sb, s_back]

    def add_vertex(self, name):
        from .cmap import VERTEX as _V
        if name in self.node_darts:
            raise SceneError(f"node {name!r} exists")
        self.node_kind[name] = _V
        self.node_darts[name] = []
        self.dirty()

    def start_completion(self, cid, vertex, anchor_dart, side):
        """Open a completion arc leaving a vertex beside an anchor dart.

        LEFT inserts the new strand immediately counterclockwise of the
        anchor (the corridor lies on the anchor dart's left).  A vertex
        with no strands yet takes the new strand unconditionally."""
        d = self._new_dart(("curve", cid), vertex)
        lst = self.node_darts[vertex]
        if anchor_dart is None and not lst:
            lst.append(d)
        else:
            i = lst.index(anchor_dart)
            lst.insert(i + 1 if side == LEFT else i, d)
        self.dirty()
        return _Pending(cid, d)

    def finish_completion(self, pending, vertex, anchor_dart, side):
        """Close the pending arc at a vertex beside an anchor dart.

        Here the anchor is an outgoing dart at the landing vertex; LEFT
        means the corridor lies on the left of the WALL arriving there,
        i.e. the strand goes immediately clockwise of the anchor."""
        d = self._new_dart(("curve", pending.cid), vertex)
        self.theta[d] = pending.dart
        self.theta[pending.dart] = d
        lst = self.node_darts[vertex]
        i = lst.index(anchor_dart)
        lst.insert(i if side == LEFT else i + 1, d)
        self.dirty()
        return d

    # -- deletion ------------------------------------------------------------

    def splice_pair(self, node, a, b):
        """Merge the two segments of darts a, b (outgoing at node)."""
        da, db = self.theta[a], self.theta[b]
        self.theta[da] = db
        self.theta[db] = da
        for dying in (a, b):
            kind, key = self.owner[dying]
            if kind == "edge":
                chain = self.edge_chains[key]
                if dying in chain:
                    chain.remove(dying)
            self.alive[dying] = False

    def splice_crossing(self, node):
        lst = self.node_darts[node]
        if len(lst) != 4:
            raise SceneError(f"can only splice degree-4 crossings ({node!r})")
        self.splice_pair(node, lst[0], lst[2])
        self.splice_pair(node, lst[1], lst[3])
        del self.node_darts[node]
        del self.node_kind[node]
        self.dirty()

    def delete_curve(self, cid):
        rec = self.curves[cid]
        own = ("curve", cid)
        for node in [n for n, lst in self.node_darts.items()
                     if any(self.owner[d] == own for d in lst)]:
            if self.node_kind[node] == CROSSING and len(self.node_darts[node]) == 4:
                owners = [self.owner[d] for d in self.node_darts[node]]
                if owners.count(own) == 2:
                    self.splice_crossing(node)
        for v in rec.anchors:
            lst = self.node_darts[v]
            lst[:] = [d for d in lst if self.owner[d] != own]
        for d in range(len(self.theta)):
            if self.owner[d] == own:
                self.alive[d] = False
        del self.curves[cid]
        self.curve_for_edge[rec.ekey].discard(cid)
        self.dirty()

    # -- wall-hug routing ------------------------------------------------------

    def interval_strands(self, node, start_dart, stop_dart):
        """Outgoing darts strictly between start and stop, counterclockwise."""
        lst = self.node_darts[node]
        i = lst.index(start_dart)
        out = []
        k = (i + 1) % len(lst)
        while lst[k] != stop_dart:
            out.append(lst[k])
            k = (k + 1) % len(lst)
            if len(out) > len(lst):
                raise SceneError("stop dart not at node")
        return out

    def route_hug(self, cid, wall, side, start_anchor=None, end_anchor=None):
        """Route a completion arc alongside a wall path of darts.

        wall: dart path from one vertex to another (current refined darts);
        side: which side of the wall darts the corridor is on.  The arc
        starts at the wall's tail vertex beside its first dart, crosses
        every strand poking into the corridor at intermediate wall nodes
        (innermost, i.e. adjacent to the node), and lands at the head
        vertex beside the last dart's reversal.  Returns the new
        crossing nodes in order.
        """
        u = self.node_of_dart[wall[0]]
        v = self.head_node(wall[-1])
        if start_anchor is None:
            start_anchor = wall[0]
        if end_anchor is None:
            end_anchor = self.theta[wall[-1]]
        pend = self.start_completion(cid, u, start_anchor, side)
        made = self.hug_corridor(pend, wall, side)
        self.finish_completion(pend, v, end_anchor, side)
        return made

    def hug_corridor(self, pend, wall, side):
        """Cross every strand poking into the corridor at wall nodes."""
        made = []
        for i in range(len(wall) - 1):
            node = self.head_node(wall[i])
            w_in, w_out = wall[i], wall[i + 1]
            back = self.theta[w_in]
            # pokes are crossed in travel order along the wall: for the
            # left corridor that runs against the rotation direction
            if side == LEFT:
                pokes = list(reversed(self.interval_strands(node, w_out, back)))
            else:
                pokes = self.interval_strands(node, back, w_out)
            for s in pokes:
                made.append(self.cross(pend, s, from_left=(side == LEFT)))
        return made

    # -- Reidemeister surgeries ------------------------------------------------

    def _replace_dart_by_route(self, g, crossings):
        """Replace curve dart g by a route crossing the given strands.

        crossings: list of (strand_dart, from_left); the new arc occupies
        g's rotation slots at both endpoints.  Returns new crossing nodes.
        """
        cid = self._single_curve_owner(g)
        tail, head = self.node_of_dart[g], self.head_node(g)
        gb = self.theta[g]
        lst_t, lst_h = self.node_darts[tail], self.node_darts[head]
        slot_t, slot_h = lst_t.index(g), lst_h.index(gb)
        lst_t.remove(g)
        lst_h.remove(gb)
        self.alive[g] = self.alive[gb] = False

        n1 = self._new_dart(("curve", cid), tail)
        lst_t.insert(slot_t, n1)
        pend = _Pending(cid, n1)
        made = [self.cross(pend, s, fl) for s, fl in crossings]
        d_end = self._new_dart(("curve", cid), head)
        self.theta[d_end] = pend.dart
        self.theta[pend.dart] = d_end
        lst_h.insert(slot_h, d_end)
        self.dirty()
        return made

    def _single_curve_owner(self, d):
        kind, key = self.owner[d]
        if kind != "curve":
            raise SceneError("moving dart must be a completion dart")
        return key

    def reidemeister_ii(self, moving_dart, target_dart):
        """Push the moving completion dart across the target dart.

        Both darts must have their LEFT face in common (callers orient
        them so).  Creates two crossings with the target's segment; all
        other pair counts are unchanged.
        """
        if self.face_of(moving_dart) != self.face_of(target_dart):
            raise SceneError("Reidemeister II darts do not share their left face")
        return self._replace_dart_by_route(
            moving_dart,
            [(target_dart, True), (target_dart, False)])

    def side_of(self, node, strand, through):
        """LEFT/RIGHT of a walk at a node; through = (in_dart, out_dart)."""
        a_in, b_out = through
        stop = self.theta[a_in]
        lst = self.node_darts[node]
        d = self.rot_next(b_out)
        while d != stop:
            if d == strand:
                return LEFT
            d = self.rot_next(d)
        d = self.rot_next(stop)
        while d != b_out:
            if d == strand:
                return RIGHT
            d = self.rot_next(d)
        raise SceneError("strand is a through dart")

    def reidemeister_iii(self, p_node, q_node, x_node):
        """Slide the curve crossing at P and Q across the crossing X.

        P and Q carry the moving curve over delta and delta'; X is the
        delta/delta' crossing; the triangle P-Q-X must bound a face whose
        sides are single segments (checked).  All pairwise crossing
        counts are preserved; X changes side of the moving curve.
        """
        d_px = self._dart_between(p_node, x_node)
        d_qx = self._dart_between(q_node, x_node)
        d_pq = self._dart_between(p_node, q_node)
        if d_px is None or d_qx is None or d_pq is None:
            raise SceneError("P, Q, X do not bound a clean triangle")
        mov = self.owner[d_pq]
        if mov[0] != "curve":
            raise SceneError("moving strand must be a completion arc")
        delta = self.owner[d_px]
        delta2 = self.owner[d_qx]
        if delta == mov or delta2 == mov or delta == delta2:
            raise SceneError("triangle sides are not three distinct objects")

        far_delta = [d for d in self.node_darts[x_node]
                     if self.owner[d] == delta and d != self.theta[d_px]][0]
        far_delta2 = [d for d in self.node_darts[x_node]
                      if self.owner[d] == delta2 and d != self.theta[d_qx]][0]

        g_prev = [d for d in self.node_darts[p_node]
                  if self.owner[d] == mov and d != d_pq][0]
        g1 = self.theta[g_prev]          # survives both splices, merged
        # orientation of the moving curve (prev -> next) over delta at P,
        # measured against delta oriented into P and out toward X
        p_away = [d for d in self.node_darts[p_node]
                  if self.owner[d] == delta and d != d_px][0]
        fl_delta = self.side_of(p_node, g_prev,
                                (self.theta[p_away], d_px)) == LEFT
        # and over delta' at Q (the moving curve arrives there from P)
        q_away = [d for d in self.node_darts[q_node]
                  if self.owner[d] == delta2 and d != d_qx][0]
        fl_delta2 = self.side_of(q_node, self.theta[d_pq],
                                 (self.theta[q_away], d_qx)) == LEFT

        self.splice_crossing(p_node)
        self.splice_crossing(q_node)
        # order swaps: cross delta' first, then delta
        return self._replace_dart_by_route(
            g1, [(far_delta2, fl_delta2), (far_delta, fl_delta)])

    def _dart_between(self, a, b):
        for d in self.node_darts[a]:
            if self.head_node(d) == b:
                return d
        return None
