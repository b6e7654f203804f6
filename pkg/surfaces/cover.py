"""
Orientation double cover of a triangulated surface.

Every base face ``f`` lifts to two oppositely oriented total faces, ``2f``
with the base vertex order and ``2f + 1`` reversed. Lifted corners are glued
across each base edge whenever the two lifted faces induce opposite
directions on it, so the total surface is oriented by construction. Every
base vertex ends up with exactly two lifts, numbered ``2v`` and ``2v + 1``;
``2v`` is the lift seen from the positive copy of the least face around v.

The deck involution ``xi`` swaps ``2v <-> 2v + 1`` and ``2f <-> 2f + 1``.
The projection is integer division by two on both.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from .exceptions import SurfaceError
from .field import LevelCurve, level_curves
from .mesh import SurfaceMesh, build_surface, edge_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CoveringData:
    base: SurfaceMesh
    total: SurfaceMesh

    def project_vertex(self, x):
        return x // 2

    def project_face(self, face):
        return face // 2

    def xi_vertex(self, x):
        return x ^ 1

    def xi_face(self, face):
        return face ^ 1

    def project_edge(self, edge):
        return edge_key(edge[0] // 2, edge[1] // 2)

    def xi_edge(self, edge):
        return edge_key(edge[0] ^ 1, edge[1] ^ 1)

    @cached_property
    def xi_darts(self):
        """xi on total darts: the dart of the swapped face on the swapped edge."""
        total = self.total
        images = []
        for dart in range(3 * total.n_faces):
            partner = self.xi_face(dart // 3)
            wanted = {self.xi_vertex(total.origin(dart)), self.xi_vertex(total.target(dart))}
            for corner in range(3):
                candidate = 3 * partner + corner
                if {total.origin(candidate), total.target(candidate)} == wanted:
                    images.append(candidate)
                    break
        return tuple(images)

    @cached_property
    def edge_lifts(self):
        lifts = {}
        for edge in self.total.edge_faces:
            lifts.setdefault(self.project_edge(edge), []).append(edge)
        return {edge: tuple(sorted(found)) for edge, found in lifts.items()}

    def lift_values(self, values):
        values = np.asarray(values, dtype=float)
        return np.repeat(values, 2)

    def sidecar_lines(self):
        return [
            f"{x} {self.project_vertex(x)} {self.xi_vertex(x)}"
            for x in range(self.total.n_vertices)
        ]


def orientation_double_cover(mesh: SurfaceMesh) -> CoveringData:
    def corner(f, sheet, v):
        return (f, sheet, v)

    uf = UnionFind(
        corner(f, sheet, v) for f, face in enumerate(mesh.faces) for sheet in (1, -1) for v in face
    )
    for dart, twin in enumerate(mesh.twins):
        if twin < dart:
            continue
        f, g = dart // 3, twin // 3
        flip = -1 if mesh.is_twisted(dart) else 1
        for sheet in (1, -1):
            for v in (mesh.origin(dart), mesh.target(dart)):
                uf.union(corner(f, sheet, v), corner(g, sheet * flip, v))

    lift = {}
    for v in range(mesh.n_vertices):
        positive = uf[corner(min(mesh.vertex_faces[v]), 1, v)]
        for f in mesh.vertex_faces[v]:
            for sheet in (1, -1):
                key = corner(f, sheet, v)
                lift[key] = 2 * v if uf[key] == positive else 2 * v + 1

    faces = []
    for f, (a, b, c) in enumerate(mesh.faces):
        faces.append((lift[(f, 1, a)], lift[(f, 1, b)], lift[(f, 1, c)]))
        faces.append((lift[(f, -1, c)], lift[(f, -1, b)], lift[(f, -1, a)]))

    for v in range(mesh.n_vertices):
        classes = {lift[corner(f, s, v)] for f in mesh.vertex_faces[v] for s in (1, -1)}
        if classes != {2 * v, 2 * v + 1}:
            raise SurfaceError(f"vertex {v} does not have two orientation lifts")

    coords = None
    if mesh.coords is not None:
        coords = tuple(point for point in mesh.coords for _ in range(2))
    total = build_surface(faces, n_vertices=2 * mesh.n_vertices, coords=coords)
    logger.info(
        f"orientation cover: base chi={mesh.euler_characteristic()} -> "
        f"total chi={total.euler_characteristic()}, "
        f"{len(total.components)} component(s)"
    )
    return CoveringData(base=mesh, total=total)


@dataclass(frozen=True)
class PreimageComponents:
    components: tuple  # frozensets of total cells
    xi_swaps: bool
    xi_preserves: bool

    @property
    def count(self):
        return len(self.components)


def preimage_components(cover: CoveringData, subset) -> PreimageComponents:
    """
    Connected components of the preimage of a connected base subcomplex.

    ``subset`` is a LevelCurve, a closed vertex path (for instance an entry
    of ``base.boundary_cycles``) or a collection of face indices. Cells of
    the total surface are tagged ``("v", x)``, ``("e", edge)`` and
    ``("f", face)``.
    """
    graph = nx.Graph()
    total = cover.total

    if isinstance(subset, LevelCurve):
        for record in subset.crossings:
            for lifted_face in (2 * record.face, 2 * record.face + 1):
                face_node = ("f", lifted_face)
                graph.add_node(face_node)
                a, b, c = total.faces[lifted_face]
                for u, w in ((a, b), (b, c), (c, a)):
                    edge = edge_key(u, w)
                    if cover.project_edge(edge) in (record.entry, record.exit):
                        graph.add_edge(face_node, ("e", edge))
    elif isinstance(subset, tuple):
        ring = list(subset)
        wanted = {edge_key(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))}
        for v in ring:
            graph.add_nodes_from([("v", 2 * v), ("v", 2 * v + 1)])
        for base_edge in wanted:
            for edge in cover.edge_lifts.get(base_edge, ()):
                graph.add_edge(("e", edge), ("v", edge[0]))
                graph.add_edge(("e", edge), ("v", edge[1]))
    else:
        faces = set(subset)
        for f in faces:
            graph.add_nodes_from([("f", 2 * f), ("f", 2 * f + 1)])
        for dart, twin in enumerate(total.twins):
            if twin < 0:
                continue
            if dart // 6 in faces and twin // 6 in faces:
                graph.add_edge(("f", dart // 3), ("f", twin // 3))

    def xi(cell):
        kind, value = cell
        if kind == "e":
            return ("e", cover.xi_edge(value))
        return (kind, value ^ 1)

    components = tuple(
        sorted((frozenset(c) for c in nx.connected_components(graph)), key=min)
    )
    images = [frozenset(xi(cell) for cell in c) for c in components]
    preserves = all(image == c for image, c in zip(images, components))
    swaps = len(components) == 2 and images[0] == components[1] and images[1] == components[0]
    return PreimageComponents(components=components, xi_swaps=swaps, xi_preserves=preserves)


def lift_curve(cover: CoveringData, total_field, curve: LevelCurve):
    """Level curves of the lifted field lying over ``curve``."""
    base_edges = set(curve.edges)
    return [
        lifted
        for lifted in level_curves(total_field, curve.value)
        if {cover.project_edge(e) for e in lifted.edges} <= base_edges
    ]
