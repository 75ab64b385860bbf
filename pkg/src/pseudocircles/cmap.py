"""Combinatorial maps on the sphere.

A map is a set of darts (directed half-segments) with

  * an involution pairing each dart with its reversal,
  * a rotation giving the counterclockwise cyclic order of the darts
    leaving each node.

Faces are the orbits of ``rotation-predecessor o involution``; with
counterclockwise rotations the orbit of a dart walks the boundary of the
face on its left.
All side/containment questions are answered by orbit computations, never
by coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

VERTEX = "vertex"
CROSSING = "crossing"


class MapError(ValueError):
    """Structural defect in a combinatorial map."""


class SphericityError(MapError):
    """Map is disconnected or fails Euler's formula V - E + F = 2."""


class CycleError(MapError):
    """A walk that was required to be a node-simple closed cycle is not."""


class CombinatorialMap:
    """Immutable dart-based map.

    Parameters
    ----------
    rotations : dict node -> list of dart names (counterclockwise, darts
        leaving the node)
    involution : dict dart name -> dart name (fixed-point-free pairing)
    node_kind : dict node -> "vertex" | "crossing"
    """

    def __init__(self, rotations, involution, node_kind, check=True):
        names = []
        index = {}
        node_of = []
        for node, darts in rotations.items():
            for name in darts:
                if name in index:
                    raise MapError(f"dart {name!r} listed at two nodes")
                index[name] = len(names)
                names.append(name)
                node_of.append(node)
        self.names = names
        self.index = index
        self.node_of = node_of
        self.nodes = list(rotations.keys())
        self.node_kind = dict(node_kind)
        D = len(names)

        theta = [-1] * D
        for a, b in involution.items():
            if a not in index or b not in index:
                raise MapError(f"involution names unknown dart {a!r}/{b!r}")
            theta[index[a]] = index[b]
        for d in range(D):
            t = theta[d]
            if t < 0 or t == d or theta[t] != d:
                raise MapError(
                    f"involution is not a fixed-point-free pairing at {names[d]!r}")
        self.theta = theta

        rot_next = [-1] * D
        rot_prev = [-1] * D
        self.node_darts = {}
        for node, darts in rotations.items():
            ids = [index[name] for name in darts]
            self.node_darts[node] = ids
            k = len(ids)
            if k == 0:
                raise MapError(f"node {node!r} has no darts")
            for i, d in enumerate(ids):
                rot_next[d] = ids[(i + 1) % k]
                rot_prev[d] = ids[(i - 1) % k]
        self.rot_next = rot_next
        self.rot_prev = rot_prev

        self._faces = None
        self._face_of = None
        if check:
            self.validate()

    # -- basics --------------------------------------------------------

    def dart_count(self):
        return len(self.names)

    def edge_count(self):
        return len(self.names) // 2

    def segment_of(self, d):
        """Canonical id of the undirected segment carrying dart d."""
        return min(d, self.theta[d])

    def segments(self):
        return [d for d in range(len(self.names)) if d < self.theta[d]]

    def head_node(self, d):
        """Node the dart points to."""
        return self.node_of[self.theta[d]]

    def degree(self, node):
        return len(self.node_darts[node])

    def phi(self, d):
        """Next dart along the face on the left of d.

        With counterclockwise rotations the boundary of the left face
        turns onto the rotation predecessor of the reversed dart.
        """
        return self.rot_prev[self.theta[d]]

    def phi_inv(self, d):
        return self.theta[self.rot_next[d]]

    # -- faces ---------------------------------------------------------

    def faces(self):
        """Orbits of phi, each a list of darts walking a face boundary."""
        if self._faces is None:
            D = len(self.names)
            face_of = [-1] * D
            faces = []
            for d0 in range(D):
                if face_of[d0] >= 0:
                    continue
                fid = len(faces)
                orbit = []
                d = d0
                while face_of[d] < 0:
                    face_of[d] = fid
                    orbit.append(d)
                    d = self.phi(d)
                if d != d0:
                    raise MapError("phi orbit does not close")
                faces.append(orbit)
            self._faces = faces
            self._face_of = face_of
        return self._faces

    def face_of(self, d):
        self.faces()
        return self._face_of[d]

    def face_left(self, d):
        return self.face_of(d)

    def face_right(self, d):
        return self.face_of(self.theta[d])

    # -- validation ----------------------------------------------------

    def is_connected(self):
        if not self.names:
            return True
        seen = [False] * len(self.names)
        stack = [0]
        seen[0] = True
        while stack:
            d = stack.pop()
            for nb in (self.theta[d], self.rot_next[d]):
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(nb)
        return all(seen)

    def validate(self):
        if not self.is_connected():
            raise SphericityError("map is disconnected")
        V = len(self.nodes)
        E = self.edge_count()
        F = len(self.faces())
        if V - E + F != 2:
            raise SphericityError(
                f"not spherical: V-E+F = {V}-{E}+{F} = {V - E + F} != 2")
        for node in self.nodes:
            if node not in self.node_kind:
                raise MapError(f"node {node!r} has no kind")

    # -- sides of cycles -------------------------------------------------

    def check_cycle(self, cycle):
        """Check that a dart list is a closed node-simple walk."""
        if not cycle:
            raise CycleError("empty cycle")
        seen = set()
        for i, d in enumerate(cycle):
            tail = self.node_of[d]
            if tail in seen:
                raise CycleError(f"cycle revisits node {tail!r}")
            seen.add(tail)
            nxt = cycle[(i + 1) % len(cycle)]
            if self.head_node(d) != self.node_of[nxt]:
                raise CycleError("darts do not chain into a closed walk")
        return seen

    def side_partition(self, cycle):
        """Split the sphere along a node-simple closed dart walk.

        Returns a SidePartition whose two sides are face sets together
        with the nodes and segments strictly interior to each side.
        """
        cycle_nodes = self.check_cycle(cycle)
        boundary_segs = {self.segment_of(d) for d in cycle}
        if 2 * len(boundary_segs) != 2 * len(cycle):
            raise CycleError("cycle repeats a segment")

        self.faces()
        nfaces = len(self._faces)
        parent = list(range(nfaces))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for d in range(len(self.names)):
            if d < self.theta[d] and self.segment_of(d) not in boundary_segs:
                a, b = find(self._face_of[d]), find(self._face_of[self.theta[d]])
                if a != b:
                    parent[a] = b

        comp_a = find(self._face_of[cycle[0]])
        comp_b = find(self._face_of[self.theta[cycle[0]]])
        if comp_a == comp_b:
            raise CycleError("cycle does not separate the sphere")
        groups = {find(f) for f in range(nfaces)}
        if groups != {comp_a, comp_b}:
            raise CycleError("cycle leaves more than two regions")

        faces_a = frozenset(f for f in range(nfaces) if find(f) == comp_a)
        faces_b = frozenset(f for f in range(nfaces) if find(f) == comp_b)

        side_a = _collect_side(self, faces_a, cycle_nodes, boundary_segs)
        side_b = _collect_side(self, faces_b, cycle_nodes, boundary_segs)
        return SidePartition(tuple(cycle), frozenset(cycle_nodes),
                             frozenset(boundary_segs), side_a, side_b)

    # -- canonical form ---------------------------------------------------

    def _code_from(self, start, reflect):
        rot = self.rot_prev if reflect else self.rot_next
        label = {start: 0}
        order = [start]
        code = []
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            for nb in (rot[d], self.theta[d]):
                if nb not in label:
                    label[nb] = len(order)
                    order.append(nb)
            code.append((label[rot[d]], label[self.theta[d]],
                         self.node_kind[self.node_of[d]] == VERTEX))
        return tuple(code)

    def canonical_code(self):
        """Minimum BFS code over all starting darts and both orientations.

        Invariant under relabeling of nodes and reflection of the sphere.
        """
        best = None
        for reflect in (False, True):
            for start in range(len(self.names)):
                code = self._code_from(start, reflect)
                if best is None or code < best:
                    best = code
        return best


def _collect_side(m, faces, cycle_nodes, boundary_segs):
    nodes = set()
    segs = set()
    for f in faces:
        for d in m._faces[f]:
            node = m.node_of[d]
            if node not in cycle_nodes:
                nodes.add(node)
            s = m.segment_of(d)
            if s not in boundary_segs:
                segs.add(s)
    return Side(faces, frozenset(nodes), frozenset(segs))


@dataclass(frozen=True)
class Side:
    """One closed side of a cycle: its faces plus interior content."""
    faces: frozenset
    nodes: frozenset
    segments: frozenset


@dataclass(frozen=True)
class SidePartition:
    cycle: tuple
    cycle_nodes: frozenset
    cycle_segments: frozenset
    side_a: Side
    side_b: Side

    def sides(self):
        return (self.side_a, self.side_b)

    def side_of_node(self, node):
        """Side strictly containing the node, or None if on the cycle."""
        if node in self.cycle_nodes:
            return None
        if node in self.side_a.nodes:
            return self.side_a
        if node in self.side_b.nodes:
            return self.side_b
        raise KeyError(node)

    def other(self, side):
        return self.side_b if side is self.side_a else self.side_a

    def contains_walk(self, side, darts, map_):
        """True if every segment of the dart walk is in the closed side."""
        allowed = side.segments | self.cycle_segments
        return all(map_.segment_of(d) in allowed for d in darts)
