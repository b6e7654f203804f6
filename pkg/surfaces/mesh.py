"""
Combinatorial triangulated surfaces.

A SurfaceMesh is a list of triangles over a contiguous vertex range plus the
dart structure derived from it. Dart ``3 * face + corner`` runs from
``faces[face][corner]`` to ``faces[face][(corner + 1) % 3]``. Its twin is the
other dart on the same undirected edge, or -1 on the boundary. On a
non-orientable surface a twin may run in the same direction as its dart;
such a pair is called twisted.

Coordinates are carried along for output only and never read by algorithms.
"""

import logging
import numbers
from collections import defaultdict, deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

from networkx.utils import UnionFind

from .exceptions import (
    CurveNotSimple,
    CurveTouchesVertex,
    DegenerateTriangle,
    EmptyInput,
    InvalidComponent,
    NonManifoldEdge,
    NonManifoldVertex,
    NotABoundaryCycle,
)

logger = logging.getLogger(__name__)


class Link(NamedTuple):
    """Ordered neighbours of a vertex. ``closed`` is True for interior vertices."""

    neighbors: tuple
    closed: bool


class PieceTag(str, Enum):
    DISK = "Disk"
    ANNULUS = "Annulus"
    MOEBIUS = "Moebius"
    MOEBIUS_WITH_HOLE = "MoebiusWithHole"
    OTHER = "Other"


_PIECE_SIGNATURES = {
    (1, True, 1): PieceTag.DISK,
    (0, True, 2): PieceTag.ANNULUS,
    (0, False, 1): PieceTag.MOEBIUS,
    (-1, False, 2): PieceTag.MOEBIUS_WITH_HOLE,
}


@dataclass(frozen=True)
class PieceKind:
    tag: PieceTag
    chi: int
    orientable: bool
    boundary_count: int

    def as_dict(self):
        return {
            "tag": self.tag.value,
            "chi": self.chi,
            "orientable": self.orientable,
            "boundary_count": self.boundary_count,
        }


def edge_key(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    n_vertices: int
    faces: tuple
    twins: tuple
    coords: Optional[tuple] = None

    # ------------------------------------------------------------------
    # darts
    # ------------------------------------------------------------------

    def origin(self, dart):
        return self.faces[dart // 3][dart % 3]

    def target(self, dart):
        return self.faces[dart // 3][(dart % 3 + 1) % 3]

    def is_twisted(self, dart):
        twin = self.twins[dart]
        return twin >= 0 and self.origin(twin) == self.origin(dart)

    @property
    def n_faces(self):
        return len(self.faces)

    # ------------------------------------------------------------------
    # edges and links
    # ------------------------------------------------------------------

    @cached_property
    def edge_faces(self):
        incidence = defaultdict(list)
        for f, (a, b, c) in enumerate(self.faces):
            for u, v in ((a, b), (b, c), (c, a)):
                incidence[edge_key(u, v)].append(f)
        return {edge: tuple(fs) for edge, fs in sorted(incidence.items())}

    @property
    def edges(self):
        return list(self.edge_faces)

    @cached_property
    def boundary_edges(self):
        return frozenset(e for e, fs in self.edge_faces.items() if len(fs) == 1)

    @cached_property
    def adjacency(self):
        neighbors = defaultdict(set)
        for u, v in self.edge_faces:
            neighbors[u].add(v)
            neighbors[v].add(u)
        return {v: frozenset(neighbors[v]) for v in range(self.n_vertices)}

    @cached_property
    def vertex_faces(self):
        incident = defaultdict(list)
        for f, face in enumerate(self.faces):
            for v in face:
                incident[v].append(f)
        return {v: tuple(incident[v]) for v in range(self.n_vertices)}

    @cached_property
    def links(self):
        return tuple(_ordered_link(self, v) for v in range(self.n_vertices))

    def is_boundary_vertex(self, v):
        return not self.links[v].closed

    # ------------------------------------------------------------------
    # components and boundary
    # ------------------------------------------------------------------

    @cached_property
    def components(self):
        """Vertex sets of the connected components, ordered by least vertex."""
        uf = UnionFind(range(self.n_vertices))
        for a, b, c in self.faces:
            uf.union(a, b, c)
        groups = [tuple(sorted(group)) for group in uf.to_sets()]
        return tuple(sorted(groups))

    @cached_property
    def vertex_component(self):
        lookup = {}
        for index, group in enumerate(self.components):
            for v in group:
                lookup[v] = index
        return lookup

    def face_component(self, f):
        return self.vertex_component[self.faces[f][0]]

    @cached_property
    def boundary_cycles(self):
        """Boundary circles as vertex tuples, each starting at its least vertex."""
        neighbors = defaultdict(list)
        for u, v in self.boundary_edges:
            neighbors[u].append(v)
            neighbors[v].append(u)
        seen = set()
        cycles = []
        for start in sorted(neighbors):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            previous, current = start, min(neighbors[start])
            while current != start:
                cycle.append(current)
                seen.add(current)
                a, b = neighbors[current]
                previous, current = current, (b if a == previous else a)
            cycles.append(tuple(cycle))
        return tuple(cycles)

    @cached_property
    def boundary_cycle_of_vertex(self):
        return {v: i for i, cycle in enumerate(self.boundary_cycles) for v in cycle}

    def component_boundary_cycles(self, component):
        return [
            i
            for i, cycle in enumerate(self.boundary_cycles)
            if self.vertex_component[cycle[0]] == component
        ]

    # ------------------------------------------------------------------
    # topology
    # ------------------------------------------------------------------

    def euler_characteristic(self, component=None):
        if component is None:
            return self.n_vertices - len(self.edge_faces) + self.n_faces
        self._check_component(component)
        vertices = set(self.components[component])
        n_edges = sum(1 for u, _ in self.edge_faces if u in vertices)
        n_faces = sum(1 for face in self.faces if face[0] in vertices)
        return len(vertices) - n_edges + n_faces

    @cached_property
    def face_signs(self):
        """
        Breadth-first orientation attempt.

        Returns (signs, orientable) where signs[f] is +1 when face f keeps its
        vertex order and -1 when reversed, and orientable[k] reports whether
        component k admitted a consistent choice.
        """
        signs = [0] * self.n_faces
        orientable = [True] * len(self.components)
        for seed in range(self.n_faces):
            if signs[seed]:
                continue
            signs[seed] = 1
            queue = deque([seed])
            while queue:
                f = queue.popleft()
                for corner in range(3):
                    dart = 3 * f + corner
                    twin = self.twins[dart]
                    if twin < 0:
                        continue
                    g = twin // 3
                    expected = -signs[f] if self.is_twisted(dart) else signs[f]
                    if signs[g] == 0:
                        signs[g] = expected
                        queue.append(g)
                    elif signs[g] != expected:
                        orientable[self.face_component(f)] = False
        return tuple(signs), tuple(orientable)

    def _check_component(self, component):
        if not 0 <= component < len(self.components):
            raise InvalidComponent(
                f"component {component} does not exist "
                f"(mesh has {len(self.components)})"
            )


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------


def build_surface(triangles: Sequence, n_vertices=None, coords=None) -> SurfaceMesh:
    """
    Build a SurfaceMesh from vertex triples and check the manifold conditions.

    Args:
        triangles: sequence of (i, j, k) vertex indices.
        n_vertices: size of the vertex range. Defaults to one past the largest
            index; every index in the range must be used by some triangle.
        coords: optional per-vertex coordinates, kept as metadata.

    Raises:
        EmptyInput, DegenerateTriangle, NonManifoldEdge, NonManifoldVertex
    """
    faces = tuple(tuple(int(v) for v in triangle) for triangle in triangles)
    if not faces:
        raise EmptyInput("no triangles given")

    seen_faces = {}
    for f, face in enumerate(faces):
        if len(face) != 3 or len(set(face)) != 3 or min(face) < 0:
            raise DegenerateTriangle(f"face {f} {face} is not a proper triangle")
        key = tuple(sorted(face))
        if key in seen_faces:
            raise DegenerateTriangle(
                f"faces {seen_faces[key]} and {f} span the same vertices {key}"
            )
        seen_faces[key] = f

    used = {v for face in faces for v in face}
    if n_vertices is None:
        n_vertices = max(used) + 1
    if max(used) >= n_vertices:
        raise DegenerateTriangle(f"vertex {max(used)} outside range 0..{n_vertices - 1}")
    unused = sorted(set(range(n_vertices)) - used)
    if unused:
        raise NonManifoldVertex(f"vertex {unused[0]} belongs to no triangle")

    darts_on_edge = defaultdict(list)
    for f, (a, b, c) in enumerate(faces):
        for corner, (u, v) in enumerate(((a, b), (b, c), (c, a))):
            darts_on_edge[edge_key(u, v)].append(3 * f + corner)

    twins = [-1] * (3 * len(faces))
    for edge, darts in darts_on_edge.items():
        if len(darts) > 2:
            raise NonManifoldEdge(f"edge {edge} is shared by {len(darts)} triangles")
        if len(darts) == 2:
            twins[darts[0]], twins[darts[1]] = darts[1], darts[0]

    if coords is not None:
        coords = tuple(tuple(float(x) for x in point) for point in coords)

    mesh = SurfaceMesh(n_vertices=n_vertices, faces=faces, twins=tuple(twins), coords=coords)
    # links are validated eagerly so a broken vertex fails here, not later
    mesh.links
    logger.debug(
        f"built surface: V={n_vertices} F={len(faces)} "
        f"components={len(mesh.components)} boundaries={len(mesh.boundary_cycles)}"
    )
    return mesh


def _ordered_link(mesh, v):
    link = defaultdict(list)
    for f in mesh.vertex_faces[v]:
        u, w = [x for x in mesh.faces[f] if x != v]
        link[u].append(w)
        link[w].append(u)

    ends = sorted(u for u, nbrs in link.items() if len(nbrs) == 1)
    if any(len(nbrs) > 2 for nbrs in link.values()) or len(ends) not in (0, 2):
        raise NonManifoldVertex(f"link of vertex {v} is not a single path or cycle")

    closed = not ends
    start = min(link) if closed else ends[0]
    order = [start]
    previous, current = start, min(link[start])
    while current != start:
        order.append(current)
        if len(link[current]) == 1:
            break
        a, b = link[current]
        previous, current = current, (b if a == previous else a)
    if len(order) != len(link):
        raise NonManifoldVertex(f"link of vertex {v} has more than one piece")
    return Link(tuple(order), closed)


# ----------------------------------------------------------------------
# pieces
# ----------------------------------------------------------------------


def orientability(mesh: SurfaceMesh, component: int) -> bool:
    mesh._check_component(component)
    return mesh.face_signs[1][component]


def classify_piece(mesh: SurfaceMesh, component: int) -> PieceKind:
    mesh._check_component(component)
    chi = mesh.euler_characteristic(component)
    orientable = orientability(mesh, component)
    n_boundary = len(mesh.component_boundary_cycles(component))
    tag = _PIECE_SIGNATURES.get((chi, orientable, n_boundary), PieceTag.OTHER)
    return PieceKind(tag=tag, chi=chi, orientable=orientable, boundary_count=n_boundary)


# ----------------------------------------------------------------------
# surgery
# ----------------------------------------------------------------------


def cut_along_curve(mesh: SurfaceMesh, curve) -> SurfaceMesh:
    """
    Cut the surface along a closed transverse curve.

    ``curve.crossings`` is the cyclic list of (face, entry edge, exit edge)
    records and ``curve.points`` maps each crossed edge to its parameter t in
    (0, 1) measured from the lower vertex index. Every crossing point becomes
    two new vertices, ``V + 2i`` and ``V + 2i + 1`` for the entry point of
    record i, one per side of the curve. Only the crossed triangles are
    retriangulated; original vertex indices are preserved.

    Raises:
        CurveNotSimple: the records do not chain into one closed two-sided
            curve crossing each edge and face at most once.
        CurveTouchesVertex: a crossing parameter lies outside (0, 1).
    """
    crossings = list(curve.crossings)
    n = len(crossings)
    if n < 3:
        raise CurveNotSimple(f"a closed curve needs at least 3 crossings, got {n}")

    entries = [record[1] for record in crossings]
    if len(set(entries)) != n or len({record[0] for record in crossings}) != n:
        raise CurveNotSimple("curve crosses an edge or a triangle twice")

    for edge in entries:
        t = curve.points.get(edge)
        if t is None or not 0.0 < t < 1.0:
            raise CurveTouchesVertex(f"crossing on edge {edge} is not interior (t={t})")
        if edge in mesh.boundary_edges:
            raise CurveNotSimple(f"curve leaves the surface through boundary edge {edge}")

    point_index = {edge: i for i, edge in enumerate(entries)}
    left = {entries[0]: entries[0][0]}
    lone = []
    for i, (f, e_in, e_out) in enumerate(crossings):
        if e_out != entries[(i + 1) % n]:
            raise CurveNotSimple(f"crossing {i} does not continue into crossing {i + 1}")
        face = set(mesh.faces[f])
        shared = set(e_in) & set(e_out)
        if not (set(e_in) <= face and set(e_out) <= face) or len(shared) != 1:
            raise CurveNotSimple(f"crossing {i} is not a segment inside face {f}")
        (a,) = shared
        lone.append(a)
        other = e_out[0] if e_out[1] == a else e_out[1]
        next_left = a if left[e_in] == a else other
        if i + 1 < n:
            left[e_out] = next_left
        elif next_left != left[entries[0]]:
            raise CurveNotSimple("curve is one-sided")

    base = mesh.n_vertices

    def copy(edge, vertex):
        side = 0 if left[edge] == vertex else 1
        return base + 2 * point_index[edge] + side

    new_faces = []
    crossed = {}
    for i, (f, e_in, e_out) in enumerate(crossings):
        crossed[f] = i
    for f, face in enumerate(mesh.faces):
        if f not in crossed:
            new_faces.append(face)
            continue
        _, e_in, e_out = crossings[crossed[f]]
        a = lone[crossed[f]]
        b = e_in[0] if e_in[1] == a else e_in[1]
        c = e_out[0] if e_out[1] == a else e_out[1]
        p_a, q_a = copy(e_in, a), copy(e_out, a)
        p_b, q_b = copy(e_in, b), copy(e_out, c)
        position = face.index(a)
        same_order = face[(position + 1) % 3] == b
        pieces = [(a, p_a, q_a), (p_b, b, c), (p_b, c, q_b)]
        if not same_order:
            pieces = [(x, z, y) for x, y, z in pieces]
        new_faces.extend(pieces)

    cut = build_surface(new_faces, n_vertices=base + 2 * n)
    logger.debug(
        f"cut along {n}-crossing curve: components {len(mesh.components)} -> "
        f"{len(cut.components)}, boundaries {len(mesh.boundary_cycles)} -> "
        f"{len(cut.boundary_cycles)}"
    )
    return cut


def cap_boundary(mesh: SurfaceMesh, cycle) -> SurfaceMesh:
    """
    Cone off one boundary circle with a new vertex ``V``.

    ``cycle`` is an index into ``mesh.boundary_cycles`` or the vertex tuple
    of one of them (any rotation or direction).
    """
    cycles = mesh.boundary_cycles
    if isinstance(cycle, numbers.Integral):
        if not 0 <= cycle < len(cycles):
            raise NotABoundaryCycle(f"no boundary cycle with index {cycle}")
        index = cycle
    else:
        wanted = set(cycle)
        matches = [i for i, c in enumerate(cycles) if set(c) == wanted and len(c) == len(cycle)]
        if not matches:
            raise NotABoundaryCycle(f"{tuple(cycle)} is not a boundary cycle")
        index = matches[0]

    members = set(cycles[index])
    apex = mesh.n_vertices
    new_faces = list(mesh.faces)
    for dart, twin in enumerate(mesh.twins):
        if twin >= 0:
            continue
        u, w = mesh.origin(dart), mesh.target(dart)
        if u in members and w in members:
            new_faces.append((w, u, apex))
    coords = None
    if mesh.coords is not None:
        ring = [mesh.coords[v] for v in cycles[index]]
        coords = mesh.coords + (tuple(sum(axis) / len(ring) for axis in zip(*ring)),)
    return build_surface(new_faces, n_vertices=apex + 1, coords=coords)
