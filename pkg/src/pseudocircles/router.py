"""Combinatorial edge routing: grow drawings by threading new edges.

A new edge is an arc from vertex to vertex through faces of the current
planarized map, crossing one segment per step.  Routes are enumerated
subject to the good-drawing laws (never cross an adjacent edge, never
cross any edge twice); materializing a route uses the scene surgery
machinery, and converting back yields a PlanarDrawing again.

This is the engine behind the derived corpus: enumerating the good
drawings of small complete graphs and completing hand-placed gadget
drawings into full ones.
"""

from __future__ import annotations

import random

from .cmap import VERTEX
from .drawing import Edge, PlanarDrawing, edge_key
from .scene import LEFT, RIGHT, Scene


class RoutingError(ValueError):
    pass


def scene_to_drawing(scene, check_good=True):
    """Planar drawing from a scene whose curves are open vertex-to-vertex
    arcs (each registered curve realizes the edge named by its record)."""
    vertices = [n for n, k in scene.node_kind.items() if k == VERTEX]
    edges = []
    chains = {}
    for key, chain in scene.edge_chains.items():
        nodes = [scene.head_node(x) for x in chain[:-1]]
        edges.append(Edge(key[0], key[1], tuple(nodes)))
        chains[key] = list(chain)
    for cid, rec in scene.curves.items():
        walk = _arc_walk(scene, cid)
        key = edge_key(*rec.anchors)
        if rec.anchors[0] != key[0]:
            walk = [scene.theta[x] for x in reversed(walk)]
        nodes = [scene.head_node(x) for x in walk[:-1]]
        edges.append(Edge(key[0], key[1], tuple(nodes)))
        chains[key] = walk

    dart_names = {}
    for key, chain in chains.items():
        for k, dart in enumerate(chain):
            dart_names[dart] = (key, k, 1)
            dart_names[scene.theta[dart]] = (key, k, -1)
    rotations = {}
    for node, lst in scene.node_darts.items():
        rotations[node] = [dart_names[dd] for dd in lst]
    return PlanarDrawing(vertices, edges, rotations, check_good=check_good)


def _arc_walk(scene, cid):
    rec = scene.curves[cid]
    u, v = rec.anchors
    own = ("curve", cid)
    start = [dd for dd in scene.node_darts[u] if scene.owner[dd] == own]
    if len(start) != 1:
        raise RoutingError(f"arc {cid} has {len(start)} strands at {u!r}")
    walk = [start[0]]
    while scene.head_node(walk[-1]) != v:
        walk.append(scene._next_strand(cid, walk[-1]))
    return walk


def insert_edge(scene, u, v, start_anchor, route, end_anchor):
    """Thread a new edge from u to v crossing the given darts in order.

    Every route dart has the arc's current face on its left; the start
    slot is counterclockwise-after the start anchor, the end slot
    counterclockwise-after the end anchor (so the landing corner is the
    face left of the end anchor).
    """
    cid = f"e_{u}_{v}"
    pend = scene.start_completion(cid, u, start_anchor, LEFT)
    for dart in route:
        scene.cross(pend, dart, from_left=True)
    scene.finish_completion(pend, v, end_anchor, RIGHT)
    scene.register_curve(cid, edge_key(u, v), (u, v))
    return cid


def _owner_key(scene, dart):
    kind, key = scene.owner[dart]
    return key if kind == "edge" else edge_key(*scene.curves[key].anchors)


def enumerate_routes(scene, u, v, forbidden, max_crossings=8,
                     from_faces=None):
    """(start_anchor, route, end_anchor) triples for a new edge u-v.

    ``forbidden`` is a set of edge keys the arc may not cross (the edges
    adjacent to uv); no edge is crossed twice.  When u has no strands yet
    (a fresh vertex) pass from_faces to place it, and start anchors are
    None.
    """
    scene.faces()
    faces, face_of = scene._faces

    starts = []
    if from_faces is not None:
        starts = [(None, f) for f in from_faces]
    else:
        for dd in scene.node_darts[u]:
            starts.append((dd, face_of[dd]))
    ends = {}
    for dd in scene.node_darts[v]:
        ends.setdefault(face_of[dd], []).append(dd)

    results = []
    for start_dart, f0 in starts:
        stack = [(f0, (), frozenset())]
        while stack:
            face, route, used = stack.pop()
            for end_dart in ends.get(face, ()):
                results.append((start_dart, route, end_dart))
            if len(route) >= max_crossings:
                continue
            for dart in faces[face]:
                key = _owner_key(scene, dart)
                if key in forbidden or key in used:
                    continue
                stack.append((face_of[scene.theta[dart]],
                              route + (dart,), used | {key}))
    return results


def copy_scene(scene):
    sc = Scene.__new__(Scene)
    sc.base = scene.base
    sc.theta = list(scene.theta)
    sc.node_of_dart = list(scene.node_of_dart)
    sc.owner = list(scene.owner)
    sc.alive = list(scene.alive)
    sc.node_darts = {k: list(v) for k, v in scene.node_darts.items()}
    sc.node_kind = dict(scene.node_kind)
    sc.edge_chains = {k: list(v) for k, v in scene.edge_chains.items()}
    sc.curves = dict(scene.curves)
    sc.curve_for_edge = {k: set(v) for k, v in scene.curve_for_edge.items()}
    sc._q = scene._q
    sc._faces = None
    return sc


def add_vertex_all_ways(d, new_vertex, max_crossings_per_edge=4,
                        rng=None, sample=None):
    """Good drawings obtained by joining a new vertex to all old ones.

    Every combination of simple routes is explored (or a random sample
    of each edge's options when ``sample`` is given); results are
    deduplicated by canonical form.
    """
    olds = sorted(d.vertices)
    results = []
    seen = set()
    rng = rng or random.Random(0)

    def recurse(scene, remaining):
        if not remaining:
            try:
                nd = scene_to_drawing(scene)
            except Exception:
                return
            code = nd.map.canonical_code()
            if code not in seen:
                seen.add(code)
                results.append(nd)
            return
        w = remaining[0]
        adjacent = ({edge_key(new_vertex, x) for x in olds if x != w}
                    | {edge_key(w, x) for x in olds + [new_vertex] if x != w})
        fresh = not scene.node_darts[new_vertex]
        from_faces = range(len(scene.faces())) if fresh else None
        options = enumerate_routes(scene, new_vertex, w, adjacent,
                                   max_crossings=max_crossings_per_edge,
                                   from_faces=from_faces)
        if sample is not None and len(options) > sample:
            options = rng.sample(options, sample)
        for start_dart, route, end_dart in options:
            sc2 = copy_scene(scene)
            try:
                insert_edge(sc2, new_vertex, w, start_dart, list(route), end_dart)
                sc2.validate()   # routes revisiting a split face wire badly
            except Exception:
                continue
            recurse(sc2, remaining[1:])

    base = Scene(d)
    base.add_vertex(new_vertex)
    recurse(base, olds)
    return results
