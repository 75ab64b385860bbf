"""Good drawings of complete graphs as planarized combinatorial maps.

A drawing is stored fully combinatorially: vertices, crossings, the chain
of crossings along each drawn edge, and the counterclockwise rotation at
every node.  The drawing file format is JSON:

    {"n": int,
     "vertices": [id, ...],
     "edges": [{"ends": [u, v], "chain": [crossingId, ...]}, ...],
     "rotations": {nodeId: [dartId, ...]}}

with dart id grammar ``<u>-<v>#<k>:<+|->`` meaning the k-th segment of
edge uv oriented along (+) or against (-) the listed ends.  Node ids are
ASCII words (letters, digits, underscore).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .cmap import CombinatorialMap, MapError, SphericityError, VERTEX, CROSSING


class DrawingError(ValueError):
    pass


class DrawingSyntaxError(DrawingError):
    pass


class GoodDrawingError(DrawingError):
    pass


_ID_RE = re.compile(r"^[A-Za-z0-9_]+$")
_DART_RE = re.compile(r"^([A-Za-z0-9_]+)-([A-Za-z0-9_]+)#(\d+):([+-])$")


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    chain: tuple

    @property
    def key(self):
        return (self.u, self.v)

    def nodes(self):
        return (self.u,) + self.chain + (self.v,)


def edge_key(u, v):
    return (u, v) if u < v else (v, u)


def dart_name(ekey, k, sign):
    u, v = ekey
    return f"{u}-{v}#{k}:{'+' if sign > 0 else '-'}"


class PlanarDrawing:
    """A (usually complete) good drawing on the sphere.

    ``edges`` maps sorted end pairs to Edge records; ``map`` is the
    planarized combinatorial map whose darts are ``(ekey, k, sign)``
    tuples: sign +1 points from ``u`` toward ``v``.
    """

    def __init__(self, vertices, edges, rotations, check_good=True):
        self.vertices = list(vertices)
        self.n = len(self.vertices)
        self.edges = {e.key: e for e in edges}
        vset = set(self.vertices)
        if len(vset) != self.n:
            raise DrawingError("duplicate vertex ids")

        crossings = {}
        for e in self.edges.values():
            if e.u not in vset or e.v not in vset:
                raise DrawingError(f"edge {e.key} has unknown end")
            if e.u == e.v:
                raise DrawingError("loop edge")
            for x in e.chain:
                if x in vset:
                    raise DrawingError(f"chain of {e.key} passes through vertex {x!r}")
                crossings.setdefault(x, []).append(e.key)
        for x, members in crossings.items():
            if len(members) != 2:
                raise DrawingError(
                    f"crossing {x!r} lies on {len(members)} edges (need exactly 2)")
            if members[0] == members[1]:
                raise GoodDrawingError(
                    f"good-drawing violation: edge {members[0]} crosses itself at {x!r}")
        self.crossings = {x: tuple(m) for x, m in crossings.items()}

        node_kind = {v: VERTEX for v in self.vertices}
        node_kind.update({x: CROSSING for x in self.crossings})
        involution = {}
        self._darts_of_edge = {}
        for e in self.edges.values():
            segs = len(e.chain) + 1
            fwd, bwd = [], []
            for k in range(segs):
                involution[(e.key, k, 1)] = (e.key, k, -1)
                involution[(e.key, k, -1)] = (e.key, k, 1)
                fwd.append((e.key, k, 1))
                bwd.append((e.key, k, -1))
            self._darts_of_edge[e.key] = (fwd, bwd)

        expected = {node: set() for node in node_kind}
        for e in self.edges.values():
            nodes = e.nodes()
            for k in range(len(nodes) - 1):
                expected[nodes[k]].add((e.key, k, 1))
                expected[nodes[k + 1]].add((e.key, k, -1))
        for node in node_kind:
            if node not in rotations:
                raise DrawingError(f"missing rotation for node {node!r}")
            if set(rotations[node]) != expected[node]:
                raise DrawingError(f"rotation at {node!r} does not list its darts")

        try:
            self.map = CombinatorialMap(rotations, involution, node_kind)
        except SphericityError:
            raise
        except MapError as exc:
            raise DrawingError(str(exc)) from exc

        self.coordinates = None  # optional realization hint, never serialized
        self._triangle_sides = {}
        if check_good:
            report = self.good_drawing_violations()
            if report:
                raise GoodDrawingError("; ".join(report))

    # -- structure -------------------------------------------------------

    @property
    def complete(self):
        return len(self.edges) == self.n * (self.n - 1) // 2

    def require_complete(self):
        if not self.complete:
            raise DrawingError("operation requires a drawing of a complete graph")

    def edge(self, u, v):
        return self.edges[edge_key(u, v)]

    def crossing_count(self):
        return len(self.crossings)

    def chain_darts(self, u, v):
        """Dart walk of edge uv from u to v."""
        key = edge_key(u, v)
        fwd, bwd = self._darts_of_edge[key]
        names = fwd if key[0] == u else [b for b in reversed(bwd)]
        return [self.map.index[d] for d in names]

    def edge_segments(self, key):
        """Canonical segment ids of one edge's chain."""
        fwd, _ = self._darts_of_edge[key]
        return {self.map.segment_of(self.map.index[d]) for d in fwd}

    def segment_edge(self, seg):
        """Drawing edge owning a map segment id."""
        return self.map.names[seg][0]

    def cycle_darts(self, cycle_vertices):
        """Closed dart walk realizing a vertex cycle along drawn chains."""
        walk = []
        k = len(cycle_vertices)
        for i in range(k):
            walk.extend(self.chain_darts(cycle_vertices[i], cycle_vertices[(i + 1) % k]))
        return walk

    def triangle_sides(self, T):
        """SidePartition of the drawn 3-cycle T (cached)."""
        key = tuple(sorted(T))
        sp = self._triangle_sides.get(key)
        if sp is None:
            sp = self.map.side_partition(self.cycle_darts(key))
            self._triangle_sides[key] = sp
        return sp

    # -- good-drawing laws -------------------------------------------------

    def good_drawing_violations(self):
        report = []
        for e in self.edges.values():
            if len(set(e.nodes())) != len(e.nodes()):
                report.append(f"edge {e.key} revisits a node")
        shared = {}
        for e in self.edges.values():
            for x in e.chain:
                shared.setdefault(x, set()).add(e.key)
        pair_crossings = {}
        for x, eks in shared.items():
            a, b = sorted(eks)
            if set(a) & set(b):
                report.append(
                    f"good-drawing violation: adjacent edges {a} and {b} "
                    f"intersect off-vertex at {x!r}")
            pair_crossings.setdefault((a, b), []).append(x)
        for (a, b), xs in pair_crossings.items():
            if len(xs) > 1:
                report.append(
                    f"good-drawing violation: edges {a} and {b} share "
                    f"{len(xs)} crossings {sorted(xs)}")
        for x, (ea, eb) in self.crossings.items():
            rot = [self.map.names[d][0] for d in self.map.node_darts[x]]
            if len(rot) != 4:
                report.append(f"crossing {x!r} has degree {len(rot)}")
                continue
            if rot[0] == rot[1] or rot[1] == rot[2]:
                report.append(
                    f"good-drawing violation: edges {ea} and {eb} do not "
                    f"alternate at {x!r} (tangential intersection)")
        if self.complete:
            deg = self.n - 1
            for v in self.vertices:
                if self.map.degree(v) != deg:
                    report.append(f"vertex {v!r} has degree {self.map.degree(v)}")
        return report

    # -- serialization -----------------------------------------------------

    def to_json_obj(self):
        edges = []
        for key in sorted(self.edges):
            e = self.edges[key]
            edges.append({"ends": [e.u, e.v], "chain": list(e.chain)})
        rotations = {}
        for node in sorted(self.map.nodes):
            darts = [dart_name(*self.map.names[d]) for d in self.map.node_darts[node]]
            pivot = darts.index(min(darts))
            rotations[node] = darts[pivot:] + darts[:pivot]
        return {"n": self.n, "vertices": sorted(self.vertices),
                "edges": edges, "rotations": rotations}


def serialize_drawing(d):
    return json.dumps(d.to_json_obj(), indent=2, sort_keys=True) + "\n"


def parse_drawing(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DrawingSyntaxError(
            f"JSON syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return drawing_from_json_obj(obj)


def drawing_from_json_obj(obj):
    for field_name in ("n", "vertices", "edges", "rotations"):
        if field_name not in obj:
            raise DrawingSyntaxError(f"missing field {field_name!r}")
    vertices = [str(v) for v in obj["vertices"]]
    for v in vertices:
        if not _ID_RE.match(v):
            raise DrawingSyntaxError(f"bad node id {v!r}")
    if obj["n"] != len(vertices):
        raise DrawingSyntaxError("field n does not match vertex count")

    edges = []
    flip = {}
    for item in obj["edges"]:
        u, v = (str(x) for x in item["ends"])
        chain = tuple(str(x) for x in item.get("chain", []))
        for x in chain:
            if not _ID_RE.match(x):
                raise DrawingSyntaxError(f"bad node id {x!r}")
        if u > v:
            u, v, chain = v, u, tuple(reversed(chain))
            flip[(v, u)] = True
        if (u, v) in (e.key for e in edges):
            raise DrawingSyntaxError(f"duplicate edge {(u, v)}")
        edges.append(Edge(u, v, chain))
    seg_count = {e.key: len(e.chain) + 1 for e in edges}

    def parse_dart(s):
        m = _DART_RE.match(str(s))
        if not m:
            raise DrawingSyntaxError(f"bad dart id {s!r}")
        a, b, k, sign = m.group(1), m.group(2), int(m.group(3)), m.group(4)
        sgn = 1 if sign == "+" else -1
        key = edge_key(a, b)
        if key not in seg_count:
            raise DrawingSyntaxError(f"dart {s!r} names unknown edge")
        if (a, b) != key:
            k, sgn = seg_count[key] - 1 - k, -sgn
        if not 0 <= k < seg_count[key]:
            raise DrawingSyntaxError(f"dart {s!r} has segment index out of range")
        return (key, k, sgn)

    rotations = {}
    for node, darts in obj["rotations"].items():
        rotations[str(node)] = [parse_dart(s) for s in darts]
    return PlanarDrawing(vertices, edges, rotations)


def validate_good_drawing(d):
    """Report-based check: list of violated laws, empty iff good."""
    return d.good_drawing_violations()


def crossing_count(d):
    return d.crossing_count()


def drawings_isomorphic(a, b):
    """Sphere isomorphism up to relabeling and reflection."""
    if a.n != b.n or len(a.edges) != len(b.edges):
        return False
    if a.crossing_count() != b.crossing_count():
        return False
    return a.map.canonical_code() == b.map.canonical_code()


def induced_subdrawing(d, S):
    """Subdrawing induced by vertex set S (2 or more vertices).

    Crossings between two surviving edges are kept with their original
    ids; crossings with removed edges are smoothed away.  The result
    carries provenance for locating removed nodes in its faces.
    """
    S = set(S)
    if len(S) < 2:
        raise DrawingError("induced subdrawing needs at least 2 vertices")
    if not S <= set(d.vertices):
        raise DrawingError("S is not a subset of the vertices")

    kept_edges = {k for k in d.edges if k[0] in S and k[1] in S}
    kept_cross = {x for x, (ea, eb) in d.crossings.items()
                  if ea in kept_edges and eb in kept_edges}
    kept_nodes = S | kept_cross

    new_edges = []
    dart_map = {}
    for key in kept_edges:
        e = d.edges[key]
        new_chain = tuple(x for x in e.chain if x in kept_cross)
        new_edges.append(Edge(e.u, e.v, new_chain))
        run = 0
        old_nodes = e.nodes()
        for k in range(len(e.chain) + 1):
            dart_map[(key, k, 1)] = (key, run, 1)
            dart_map[(key, k, -1)] = (key, run, -1)
            if k < len(e.chain) and old_nodes[k + 1] in kept_cross:
                run += 1

    rotations = {}
    for node in kept_nodes:
        old = [d.map.names[x] for x in d.map.node_darts[node]]
        rotations[node] = [dart_map[nm] for nm in old if nm[0] in kept_edges]

    sub = PlanarDrawing(sorted(S), new_edges, rotations)

    # provenance: old faces merge along segments of removed edges
    d.map.faces()
    nfaces = len(d.map._faces)
    parent = list(range(nfaces))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for dart in range(len(d.map.names)):
        if dart < d.map.theta[dart] and d.map.names[dart][0] not in kept_edges:
            a, b = find(d.map._face_of[dart]), find(d.map._face_of[d.map.theta[dart]])
            if a != b:
                parent[a] = b

    class_to_new = {}
    new_face_sample = {}
    for old_name, new_name in dart_map.items():
        if old_name[0] in kept_edges:
            old_id = d.map.index[old_name]
            cls = find(d.map._face_of[old_id])
            new_face = sub.map.face_of(sub.map.index[new_name])
            class_to_new[cls] = new_face
            new_face_sample.setdefault(new_face, old_id)

    sub.provenance = SubdrawingProvenance(d, dart_map, parent, class_to_new,
                                          new_face_sample, find)
    return sub


@dataclass
class SubdrawingProvenance:
    parent_drawing: object
    dart_map: dict
    face_parent: list
    class_to_new: dict
    new_face_sample: dict
    _find: object

    def locate_node(self, node):
        """Face of the subdrawing containing a node removed from it."""
        d = self.parent_drawing
        old_dart = d.map.node_darts[node][0]
        cls = self._find(d.map._face_of[old_dart])
        return self.class_to_new[cls]

    def base_face_of(self, new_face):
        """Some face of the parent map inside the given subdrawing face."""
        d = self.parent_drawing
        return d.map.face_of(self.new_face_sample[new_face])
