"""Arrangements of simple closed curves: arcs, spirals, coherence.

An arc in the union of the curves has a unique decomposition into maximal
subarcs each lying on one curve; the number of curve changes is its
weight.  At every change the two curve continuations leave on a common
side of the arc (the side the crossing "faces"); a spiral is an arc whose
changes all face the same side.  Coherent spirals are exactly what an
arrangement of pseudocircles cannot contain, and that equivalence is
exercised here both as a direct check and as a searched certificate.

Arc endpoints live on segment interiors: an ArcPath given by darts
d1..dk starts inside segment(d1) and ends inside segment(dk), which
realizes the "sufficiently small" truncations exactly.
"""

from __future__ import annotations

import functools
import json
import random
import re
from dataclasses import dataclass, field

from .cmap import CombinatorialMap, MapError, CROSSING, VERTEX
from .spheregeom import (DegeneracyError, arcs_cross, arc_crossing_point,
                         canon_dir, cross, cyclic_sort_tangents, det3, dot,
                         order_along_arc, sgn, _random_direction)


class ArrangementError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of its node budget (reported, not silent)."""


LEFT, RIGHT = "left", "right"


def _other(side):
    return RIGHT if side == LEFT else LEFT


# ---------------------------------------------------------------------------
# curve systems: the shared view of arrangements and drawings
# ---------------------------------------------------------------------------

class CurveSystem:
    """A map whose segments are grouped into curves (or drawn edges).

    ``closed`` curves are cyclic dart walks; open ones (drawn edges) end
    at vertex nodes.  This is the substrate for decomposition, spirals,
    coherence and closed-spiral searches.
    """

    def __init__(self, cmap, curve_segments, closed_walks):
        self.map = cmap
        self.curve_of_seg = {}
        for label, segs in curve_segments.items():
            for s in segs:
                self.curve_of_seg[s] = label
        self.curves = dict(curve_segments)
        self.walks = dict(closed_walks)
        self._curve_nodes = {}

    def curve_of(self, dart):
        return self.curve_of_seg[self.map.segment_of(dart)]

    def curve_nodes(self, label):
        nodes = self._curve_nodes.get(label)
        if nodes is None:
            nodes = set()
            for s in self.curves[label]:
                nodes.add(self.map.node_of[s])
                nodes.add(self.map.node_of[self.map.theta[s]])
            self._curve_nodes[label] = nodes
        return nodes

    def strands_at(self, label, node):
        """Outgoing darts of one curve at a node (2 if it passes through)."""
        return [d for d in self.map.node_darts[node] if self.curve_of(d) == label]

    def continuation(self, dart):
        """The strand continuing dart's curve beyond its head node.

        None when the curve ends there (an open edge at a vertex).
        """
        node = self.map.head_node(dart)
        back = self.map.theta[dart]
        rest = [d for d in self.strands_at(self.curve_of(dart), node) if d != back]
        if len(rest) > 1:
            raise ArrangementError(f"curve revisits node {node!r}")
        return rest[0] if rest else None

    def is_vertex(self, node):
        return self.map.node_kind[node] == VERTEX


def drawing_curve_system(d):
    segs = {}
    walks = {}
    for key in d.edges:
        darts = d.chain_darts(*key)
        segs[key] = [d.map.segment_of(x) for x in darts]
    return CurveSystem(d.map, segs, walks)


# ---------------------------------------------------------------------------
# arrangements proper
# ---------------------------------------------------------------------------

_STRAND_RE = re.compile(r"^c:([A-Za-z0-9_]+)#(\d+):([+-])$")


class Arrangement(CurveSystem):
    """Closed curves on the sphere, every intersection a crossing."""

    def __init__(self, cmap, curve_darts):
        curve_segments = {}
        walks = {}
        for label, darts in curve_darts.items():
            curve_segments[label] = [cmap.segment_of(x) for x in darts]
            walks[label] = list(darts)
        super().__init__(cmap, curve_segments, walks)
        self.validate()

    def validate(self):
        m = self.map
        for label, walk in self.walks.items():
            seen = set()
            for i, dart in enumerate(walk):
                node = m.node_of[dart]
                if node in seen:
                    raise ArrangementError(f"non-simple curve {label!r}")
                seen.add(node)
                nxt = walk[(i + 1) % len(walk)]
                if m.head_node(dart) != m.node_of[nxt]:
                    raise ArrangementError(f"curve {label!r} is not a closed walk")
        for node in m.nodes:
            labels = {self.curve_of(d) for d in m.node_darts[node]}
            if len(labels) < 2:
                raise ArrangementError(
                    f"node {node!r} lies on a single curve (not a crossing)")
            for a in labels:
                for b in labels:
                    if a < b and not self._alternate(node, a, b):
                        raise ArrangementError(
                            f"tangency detected: curves {a!r} and {b!r} "
                            f"do not alternate at {node!r}")

    def _alternate(self, node, a, b):
        pattern = [self.curve_of(d) for d in self.map.node_darts[node]
                   if self.curve_of(d) in (a, b)]
        if len(pattern) != 4:
            return False
        return pattern[0] != pattern[1] and pattern[1] != pattern[2]

    def curve_ids(self):
        return sorted(self.walks)

    def to_json_obj(self):
        m = self.map
        curves = {}
        for label, walk in self.walks.items():
            curves[label] = [m.node_of[d] for d in walk]
        rotations = {}
        names = {}
        for label, walk in self.walks.items():
            for k, dart in enumerate(walk):
                names[dart] = f"c:{label}#{k}:+"
                names[m.theta[dart]] = f"c:{label}#{k}:-"
        for node in sorted(m.nodes):
            lst = [names[d] for d in m.node_darts[node]]
            pivot = lst.index(min(lst))
            rotations[node] = lst[pivot:] + lst[:pivot]
        return {"curves": curves, "rotations": rotations}


def serialize_arrangement(a):
    return json.dumps(a.to_json_obj(), indent=2, sort_keys=True) + "\n"


def parse_arrangement(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArrangementError(
            f"JSON syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return arrangement_from_json_obj(obj)


def arrangement_from_json_obj(obj):
    curves = {str(k): [str(x) for x in v] for k, v in obj["curves"].items()}
    seg_count = {k: len(v) for k, v in curves.items()}

    def parse_strand(s):
        m = _STRAND_RE.match(str(s))
        if not m:
            raise ArrangementError(f"bad strand dart id {s!r}")
        label, k, sign = m.group(1), int(m.group(2)), m.group(3)
        if label not in seg_count or not 0 <= k < seg_count[label]:
            raise ArrangementError(f"strand {s!r} out of range")
        return (label, k, 1 if sign == "+" else -1)

    rotations = {}
    for node, lst in obj["rotations"].items():
        rotations[str(node)] = [parse_strand(s) for s in lst]

    involution = {}
    node_kind = {}
    expected = {}
    for label, seq in curves.items():
        for k in range(len(seq)):
            involution[(label, k, 1)] = (label, k, -1)
            involution[(label, k, -1)] = (label, k, 1)
            a, b = seq[k], seq[(k + 1) % len(seq)]
            expected.setdefault(a, set()).add((label, k, 1))
            expected.setdefault(b, set()).add((label, k, -1))
            node_kind[a] = CROSSING
    for node, need in expected.items():
        if node not in rotations or set(rotations[node]) != need:
            raise ArrangementError(f"rotation at {node!r} does not list its strands")
    try:
        cmap = CombinatorialMap(rotations, involution, node_kind)
    except MapError as exc:
        raise ArrangementError(str(exc)) from exc

    curve_darts = {}
    for label, seq in curves.items():
        curve_darts[label] = [cmap.index[(label, k, 1)] for k in range(len(seq))]
    return Arrangement(cmap, curve_darts)


def build_arrangement(text):
    return parse_arrangement(text)


def pairwise_crossings(a):
    """Symmetric matrix of pairwise crossing counts, ordered by curve id."""
    ids = a.curve_ids()
    idx = {c: i for i, c in enumerate(ids)}
    mat = [[0] * len(ids) for _ in ids]
    for node in a.map.nodes:
        labels = sorted({a.curve_of(d) for d in a.map.node_darts[node]})
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                mat[idx[labels[i]]][idx[labels[j]]] += 1
                mat[idx[labels[j]]][idx[labels[i]]] += 1
    return ids, mat


# ---------------------------------------------------------------------------
# arcs and decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArcPath:
    """Arc in the curve union given by its dart walk.

    The arc starts on the interior of the first dart's segment and ends
    on the interior of the last dart's segment.
    """
    darts: tuple

    def __len__(self):
        return len(self.darts)


@dataclass
class Decomposition:
    """Unique maximal same-curve segmentation of an arc."""
    arc: ArcPath
    runs: list          # list of lists of darts
    hosts: list         # curve label per run
    turn_nodes: list    # node of crossing x_i between run i-1 and run i

    @property
    def weight(self):
        return len(self.runs) - 1

    def segments_of_run(self, i, system):
        return {system.map.segment_of(d) for d in self.runs[i]}


def _check_arc(system, darts):
    if not darts:
        raise ArrangementError("empty arc")
    m = system.map
    seen_nodes = set()
    seen_segs = set()
    for i, d in enumerate(darts):
        s = m.segment_of(d)
        if s in seen_segs:
            raise ArrangementError("arc revisits a segment")
        seen_segs.add(s)
        if i + 1 < len(darts):
            node = m.head_node(d)
            if m.node_of[darts[i + 1]] != node:
                raise ArrangementError("arc darts do not chain")
            if node in seen_nodes:
                raise ArrangementError("arc revisits a node")
            seen_nodes.add(node)
    return seen_nodes, seen_segs


def decompose(system, arc):
    """Group the arc's darts into maximal same-curve runs."""
    darts = list(arc.darts)
    _check_arc(system, darts)
    runs = [[darts[0]]]
    hosts = [system.curve_of(darts[0])]
    turns = []
    for prev, d in zip(darts, darts[1:]):
        label = system.curve_of(d)
        if label == hosts[-1]:
            runs[-1].append(d)
        else:
            turns.append(system.map.node_of[d])
            runs.append([d])
            hosts.append(label)
    return Decomposition(ArcPath(tuple(darts)), runs, hosts, turns)


def arc_interior_nodes(system, dec):
    m = system.map
    darts = dec.arc.darts
    return [m.head_node(d) for d in darts[:-1]]


def _arc_side_sets(system, dec):
    """For each interior node, the through-darts (in, out) of the arc."""
    m = system.map
    darts = dec.arc.darts
    result = {}
    for i in range(len(darts) - 1):
        node = m.head_node(darts[i])
        result[node] = (darts[i], darts[i + 1])
    return result


def side_of_strand(system, node, strand, through):
    """LEFT/RIGHT side of the arc at a node for an outgoing strand.

    ``through`` is the (in_dart, out_dart) pair of the arc at the node;
    the left side is the rotation interval counterclockwise from the out
    dart to the reversal of the in dart.
    """
    m = system.map
    a_in, b_out = through
    stop = m.theta[a_in]
    d = m.rot_next[b_out]
    while d != stop:
        if d == strand:
            return LEFT
        if d == b_out:
            raise ArrangementError("strand not found in rotation")
        d = m.rot_next[d]
    d = m.rot_next[stop]
    while d != b_out:
        if d == strand:
            return RIGHT
        d = m.rot_next[d]
    raise ArrangementError("strand is a through dart of the arc")


def facing_side(system, dec, i):
    """Side of the arc faced by crossing x_i (both continuations leave there)."""
    if not 1 <= i <= dec.weight:
        raise ArrangementError("facing_side index out of range")
    m = system.map
    node = dec.turn_nodes[i - 1]
    a_in = dec.runs[i - 1][-1]
    b_out = dec.runs[i][0]
    c1 = system.continuation(a_in)
    back = m.theta[b_out]
    c2 = [d for d in system.strands_at(dec.hosts[i], node) if d != b_out]
    c2 = c2[0] if c2 else None
    if c1 is None or c2 is None:
        raise ArrangementError("a curve ends at a decomposition crossing")
    s1 = side_of_strand(system, node, c1, (a_in, b_out))
    s2 = side_of_strand(system, node, c2, (a_in, b_out))
    if s1 != s2:
        raise ArrangementError(f"continuations at {node!r} disagree (tangency?)")
    return s1


def is_spiral(system, dec):
    """All decomposition crossings face one side; weight <= 1 is vacuous."""
    sides = [facing_side(system, dec, i) for i in range(1, dec.weight + 1)]
    return len(set(sides)) <= 1


def spiral_side(system, dec):
    sides = {facing_side(system, dec, i) for i in range(1, dec.weight + 1)}
    return sides.pop() if len(sides) == 1 else None


def segment_status(system, dec, i):
    """"external" iff the host curve meets the arc only along run i."""
    if not 0 <= i <= dec.weight:
        raise ArrangementError("segment index out of range")
    host = dec.hosts[i]
    if dec.hosts.count(host) > 1:
        return "internal"
    arc_nodes = set(arc_interior_nodes(system, dec))
    run_nodes = set()
    m = system.map
    for d in dec.runs[i]:
        run_nodes.add(m.node_of[d])
        run_nodes.add(m.head_node(d))
    others = (arc_nodes - run_nodes) & system.curve_nodes(host)
    return "internal" if others else "external"


START_LOCUS, END_LOCUS = "start", "end"


@dataclass
class ExtensionArc:
    index: int
    sign: int                 # -1 or +1
    path: list                # darts walked along the host curve
    landing: object           # node id, or START_LOCUS/END_LOCUS
    landing_side: object      # LEFT/RIGHT/None
    start_side: object        # LEFT/RIGHT/None
    coherent: bool = False


def extension_arc(system, dec, i, sign):
    """Continuation of run i beyond x_i (-) or x_{i+1} (+) to first return."""
    m = system.map
    darts = dec.arc.darts
    arc_nodes = set(arc_interior_nodes(system, dec))
    arc_segs = {m.segment_of(d) for d in darts}
    seg_first, seg_last = m.segment_of(darts[0]), m.segment_of(darts[-1])
    through = _arc_side_sets(system, dec)

    start_side = None
    endpoint_start = (sign < 0 and i == 0) or (sign > 0 and i == dec.weight)
    if sign < 0 and i == 0:
        first = m.theta[darts[0]]
    elif sign > 0 and i == dec.weight:
        first = darts[-1]
    else:
        if sign < 0:
            node = dec.turn_nodes[i - 1]
            b_out = dec.runs[i][0]
            cand = [d for d in system.strands_at(dec.hosts[i], node) if d != b_out]
        else:
            node = dec.turn_nodes[i]
            a_in = dec.runs[i][-1]
            cand = [system.continuation(a_in)]
        first = cand[0]
        start_side = side_of_strand(system, node, first, through[node])
        s = m.segment_of(first)
        if s == seg_first or s == seg_last:
            # the continuation is the sliver of an end segment beyond the
            # arc's endpoint locus: it meets A first at that endpoint
            landing = START_LOCUS if s == seg_first else END_LOCUS
            return ExtensionArc(i, sign, [first], landing, None, start_side, False)

    path = []
    d = first
    landing, landing_side = None, None
    for _ in range(len(m.names) + 1):
        path.append(d)
        node = m.head_node(d)
        if node in arc_nodes:
            landing = node
            landing_side = side_of_strand(system, node, m.theta[d], through[node])
            break
        nxt = system.continuation(d)
        if nxt is None:
            landing = None  # open edge ended at a vertex off the arc
            break
        s = m.segment_of(nxt)
        if s == seg_first:
            landing = START_LOCUS
            break
        if s == seg_last:
            landing = END_LOCUS
            break
        d = nxt
    else:
        raise ArrangementError("extension walk failed to terminate")

    internal = segment_status(system, dec, i) == "internal"
    coherent = (internal and not endpoint_start
                and landing not in (None, START_LOCUS, END_LOCUS)
                and start_side == landing_side)
    return ExtensionArc(i, sign, path, landing, landing_side, start_side, coherent)


@dataclass
class CoherenceReport:
    arc: ArcPath
    weight: int
    per_segment: list      # (status, minus_coherent, plus_coherent)
    coherent: bool


def is_coherent_arc(system, dec):
    per = []
    ok = True
    for i in range(dec.weight + 1):
        status = segment_status(system, dec, i)
        minus = extension_arc(system, dec, i, -1).coherent
        plus = extension_arc(system, dec, i, +1).coherent
        per.append((status, minus, plus))
        ok = ok and (minus or plus)
    return CoherenceReport(dec.arc, dec.weight, per, ok)


# ---------------------------------------------------------------------------
# pseudocircle checks and spiral searches
# ---------------------------------------------------------------------------

def check_pseudocircles(a):
    """Direct pairwise test plus, on failure, a weight-1 coherent spiral.

    The certificate follows the constructive recipe: start on one curve,
    take the first three meetings p1, p2, p3 with the other, turn at p2
    and stop just past p3.
    """
    ids, mat = pairwise_crossings(a)
    bad = None
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if mat[i][j] > 2:
                bad = (ids[i], ids[j])
                break
        if bad:
            break
    if bad is None:
        return True, None

    g0, g1 = bad
    m = a.map
    walk = a.walks[g0]
    nodes1 = a.curve_nodes(g1)
    # rotate the walk to start just after a crossing with g1
    start = next(k for k, d in enumerate(walk) if m.node_of[d] in nodes1)
    walk = walk[start:] + walk[:start]
    meets = [k for k, d in enumerate(walk) if m.head_node(d) in nodes1]
    k1, k2 = meets[0], meets[1]
    p2 = m.head_node(walk[k2])
    darts = list(walk[:k2 + 1])
    # continue along g1 from p2 in the direction that avoids p1 first
    p1 = m.head_node(walk[k1])
    b = [d for d in a.strands_at(g1, p2)]
    nodes0 = a.curve_nodes(g0)
    for first in b:
        cand = _walk_until(a, first, stop_nodes=nodes0 | {p1})
        if cand is not None and m.head_node(cand[-1]) != p1:
            ext = darts + cand + [a.continuation(cand[-1])]
            try:
                dec = decompose(a, ArcPath(tuple(ext)))
            except ArrangementError:
                continue
            if dec.weight == 1 and is_spiral(a, dec) and is_coherent_arc(a, dec).coherent:
                return False, (ArcPath(tuple(ext)), dec)
    found = find_coherent_spiral(a, 1)
    return False, found


def _walk_until(system, first, stop_nodes):
    m = system.map
    path = [first]
    for _ in range(len(m.names)):
        node = m.head_node(path[-1])
        if node in stop_nodes:
            return path
        nxt = system.continuation(path[-1])
        if nxt is None:
            return None
        path.append(nxt)
    return None


def find_coherent_spiral(system, max_weight, budget=2_000_000):
    """Bounded exhaustive search for a coherent spiral.

    Arcs are enumerated as dart walks with canonical endpoints; facing
    consistency prunes non-spirals early.  Returns (ArcPath, Decomposition)
    or None when the bound is exhausted with no witness.
    """
    if max_weight < 1:
        raise ValueError("max_weight must be at least 1")
    m = system.map
    steps = 0

    def extendable(dart, used_segs, used_nodes):
        node = m.head_node(dart)
        if node in used_nodes:
            return []
        out = []
        for d in m.node_darts[node]:
            if d == m.theta[dart]:
                continue
            if m.segment_of(d) in used_segs:
                continue
            out.append(d)
        return out

    for start in range(len(m.names)):
        stack = [([start], {m.segment_of(start)}, set(), None, 0)]
        while stack:
            steps += 1
            if steps > budget:
                raise BudgetExceeded(
                    f"coherent-spiral search exceeded {budget} expansions")
            darts, segs, nodes, side, weight = stack.pop()
            arc = ArcPath(tuple(darts))
            dec = decompose(system, arc)
            if dec.weight >= 1 and is_coherent_arc(system, dec).coherent:
                if is_spiral(system, dec):
                    return arc, dec
            last = darts[-1]
            node = m.head_node(last)
            for d in extendable(last, segs, nodes):
                turn = system.curve_of(d) != system.curve_of(last)
                new_side, new_weight = side, weight
                if turn:
                    if system.is_vertex(node):
                        continue
                    new_weight = weight + 1
                    if new_weight > max_weight:
                        continue
                    trial = decompose(system, ArcPath(tuple(darts + [d])))
                    s = facing_side(system, trial, trial.weight)
                    if side is not None and s != side:
                        continue
                    new_side = s
                stack.append((darts + [d], segs | {m.segment_of(d)},
                              nodes | {node}, new_side, new_weight))
    return None


@dataclass
class ClosedSpiral:
    """Simple closed walk that becomes a spiral when cut near a basepoint."""
    cycle: tuple          # darts, starting at the basepoint node
    basepoint: object     # node id
    side: str             # side faced by all other turns
    weight: int           # weight of the cut arc
    turn_nodes: tuple

    def cut_arc(self):
        return ArcPath(tuple(self.cycle))


def find_closed_spirals(system, min_weight=2, max_weight=None, budget=2_000_000):
    """All closed spirals up to rotation/reflection, by pruned DFS.

    A cycle qualifies when cutting it near some basepoint node leaves an
    arc of weight >= min_weight whose turns all face one side.  Turns at
    vertex nodes (drawn-edge systems) are only ever valid basepoints, so
    cycles through two or more vertices are skipped.
    """
    m = system.map
    results = {}
    steps = 0
    if max_weight is None:
        max_weight = len(m.names)

    for base in m.nodes:
        for b_out in m.node_darts[base]:
            stack = [([b_out], {m.segment_of(b_out)}, set(), None, 0)]
            while stack:
                steps += 1
                if steps > budget:
                    raise BudgetExceeded(
                        f"closed-spiral search exceeded {budget} expansions")
                darts, segs, nodes, side, weight = stack.pop()
                last = darts[-1]
                node = m.head_node(last)
                if node == base:
                    if weight >= min_weight:
                        _record_closed_spiral(system, results, base, darts, side, weight)
                    continue
                if node in nodes:
                    continue
                for d in m.node_darts[node]:
                    if d == m.theta[last]:
                        continue
                    if m.segment_of(d) in segs:
                        continue
                    turn = system.curve_of(d) != system.curve_of(last)
                    new_side, new_weight = side, weight
                    if turn:
                        if system.is_vertex(node):
                            continue
                        new_weight = weight + 1
                        if new_weight > max_weight:
                            continue
                        s = _turn_side(system, node, last, d)
                        if s is None:
                            continue
                        if side is not None and s != side:
                            continue
                        new_side = s
                    elif system.is_vertex(node):
                        continue
                    stack.append((darts + [d], segs | {m.segment_of(d)},
                                  nodes | {node}, new_side, new_weight))
    return sorted(results.values(), key=lambda cs: (cs.weight, str(cs.basepoint)))


def _turn_side(system, node, in_dart, out_dart):
    m = system.map
    c1 = system.continuation(in_dart)
    back = m.theta[out_dart]
    host = system.curve_of(out_dart)
    c2 = [d for d in system.strands_at(host, node) if d != out_dart and d != back]
    c2 = [d for d in c2 if m.segment_of(d) != m.segment_of(out_dart)]
    if c1 is None or not c2:
        return None
    s1 = side_of_strand(system, node, c1, (in_dart, out_dart))
    s2 = side_of_strand(system, node, c2[0], (in_dart, out_dart))
    return s1 if s1 == s2 else None


def _record_closed_spiral(system, results, base, darts, side, weight):
    m = system.map
    turns = tuple(m.head_node(darts[i]) for i in range(len(darts) - 1)
                  if system.curve_of(darts[i]) != system.curve_of(darts[i + 1]))
    key_nodes = tuple(m.node_of[d] for d in darts)
    k = min(range(len(key_nodes)), key=lambda i: str(key_nodes[i]))
    canon_f = key_nodes[k:] + key_nodes[:k]
    rev = tuple(reversed(key_nodes))
    k2 = min(range(len(rev)), key=lambda i: str(rev[i]))
    canon_r = rev[k2:] + rev[:k2]
    canon = min(canon_f, canon_r)
    if canon in results and results[canon].weight <= weight:
        return
    results[canon] = ClosedSpiral(tuple(darts), base, side, weight, turns)


# ---------------------------------------------------------------------------
# geometric construction of arrangements (spherical polygons)
# ---------------------------------------------------------------------------

def arrangement_from_polygons(polygons):
    """Exact combinatorialization of closed spherical polygons.

    polygons: curve id -> list of integer 3-vectors (cyclic corner
    directions).  Corners are bends, not nodes; all nodes are crossings.
    Multi-crossings (three or more curves through a point) are allowed.
    """
    pieces = {}
    order = []
    for label, pts in polygons.items():
        k = len(pts)
        segs = [(pts[i], pts[(i + 1) % k]) for i in range(k)]
        pieces[label] = segs
        order.append(label)

    hits = {label: [[] for _ in pieces[label]] for label in order}
    points = {}
    for li in range(len(order)):
        for lj in range(li, len(order)):
            a, b = order[li], order[lj]
            for i, (p, q) in enumerate(pieces[a]):
                for j, (r, s) in enumerate(pieces[b]):
                    if a == b and (i == j or (i + 1) % len(pieces[a]) == j
                                   or (j + 1) % len(pieces[a]) == i):
                        continue
                    shared = ({canon_dir(p), canon_dir(q)}
                              & {canon_dir(r), canon_dir(s)})
                    if shared:
                        raise DegeneracyError("polygons share a corner")
                    if arcs_cross(p, q, r, s):
                        if a == b:
                            raise ArrangementError(f"non-simple curve {a!r}")
                        w = arc_crossing_point(p, q, r, s)
                        points.setdefault(w, set()).update([(a, i), (b, j)])
                        hits[a][i].append(w)
                        hits[b][j].append(w)

    names = {w: f"p{k}" for k, w in enumerate(sorted(points))}

    # node sequence per curve
    seqs = {}
    for label in order:
        seq = []
        for i, (p, q) in enumerate(pieces[label]):
            seq.extend(order_along_arc(p, q, hits[label][i]))
        if not seq:
            raise ArrangementError(f"curve {label!r} crosses nothing")
        seqs[label] = seq

    involution = {}
    node_kind = {}
    tangents = {}
    for label in order:
        seq = seqs[label]
        for k in range(len(seq)):
            involution[(label, k, 1)] = (label, k, -1)
            involution[(label, k, -1)] = (label, k, 1)
            node_kind[names[seq[k]]] = CROSSING
    pos_in_piece = {}
    for label in order:
        seq = seqs[label]
        segsof = pieces[label]
        idx = 0
        for i, (p, q) in enumerate(segsof):
            n = cross(p, q)
            for w in order_along_arc(p, q, hits[label][i]):
                t_fwd = cross(n, w)
                k = seq.index(w)
                tangents.setdefault(names[w], []).append(
                    (t_fwd, (label, k, 1)))
                tangents[names[w]].append(
                    ((-t_fwd[0], -t_fwd[1], -t_fwd[2]), (label, (k - 1) % len(seq), -1)))

    dirs = {names[w]: w for w in points}
    rotations = {}
    for node, items in tangents.items():
        rotations[node] = [d for _, d in cyclic_sort_tangents(dirs[node], items)]

    cmap = CombinatorialMap(rotations, involution, node_kind)
    curve_darts = {label: [cmap.index[(label, k, 1)] for k in range(len(seqs[label]))]
                   for label in order}
    return Arrangement(cmap, curve_darts)


def random_arrangement(seed, max_curves=5, max_total_crossings=20, max_tries=400):
    """Random connected arrangement of small spherical polygons."""
    rng = random.Random(seed)
    for _ in range(max_tries):
        k = rng.randint(2, max_curves)
        polys = {}
        ok = True
        for c in range(k):
            sides = rng.randint(3, 5)
            pts = [_random_direction(rng) for _ in range(sides)]
            axis = _random_direction(rng)
            ref = _random_direction(rng)

            def ang_key(p):
                u = cross(axis, ref)
                x, y = dot(p, ref), dot(p, u)
                import math
                return math.atan2(float(y), float(x))

            pts.sort(key=ang_key)
            polys[f"g{c}"] = pts
        try:
            arr = arrangement_from_polygons(polys)
        except (DegeneracyError, ArrangementError, MapError):
            continue
        total = len(arr.map.nodes)
        if total > max_total_crossings:
            continue
        return arr
    raise DegeneracyError(f"seed {seed}: no valid random arrangement found")
