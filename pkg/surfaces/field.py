"""
Piecewise-linear scalar fields on a SurfaceMesh.

A field is valid when it is constant on every boundary circle, has no
critical point on the boundary, and never repeats a value along an edge
except along a boundary circle. Interior vertices are classified by the
sign pattern of ``f(neighbor) - f(vertex)`` around their link: no change
of sign is an extremum, two changes are a regular point and ``2k`` changes
(k >= 2) are a saddle with ``k - 1`` extra sector pairs.

This module also traces level sets: closed level curves at regular values,
level components at arbitrary values and the connected pieces of slabs
``f^-1[a, b]``. The Reeb graph and the decomposition are built from these.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from networkx.utils import UnionFind

from .exceptions import (
    CriticalOnBoundary,
    CurveTouchesVertex,
    EqualAdjacentInteriorValues,
    FieldError,
    FieldSizeMismatch,
    NonConstantBoundary,
    PlateauFace,
)
from .mesh import SurfaceMesh, edge_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalKind:
    tag: str  # "Min", "Max" or "Saddle"
    multiplicity: int = 0

    @property
    def index(self):
        return 1 if self.tag in ("Min", "Max") else -self.multiplicity

    @property
    def is_saddle(self):
        return self.tag == "Saddle"

    def __str__(self):
        return f"Saddle({self.multiplicity})" if self.is_saddle else self.tag


MIN = CriticalKind("Min")
MAX = CriticalKind("Max")


def saddle(multiplicity=1):
    return CriticalKind("Saddle", multiplicity)


@dataclass(frozen=True, eq=False)
class MorseField:
    mesh: SurfaceMesh
    values: np.ndarray
    critical_vertices: tuple  # ((vertex, CriticalKind), ...) by vertex
    boundary_levels: tuple  # one value per mesh.boundary_cycles entry

    @property
    def critical_kinds(self):
        return dict(self.critical_vertices)

    @cached_property
    def plain_values(self):
        """Values as a list of floats, for the per-element loops over the mesh."""
        return self.values.tolist()

    def value(self, v):
        return self.plain_values[v]

    def regular_value(self, lo, hi, fraction=0.5):
        """
        A value in (lo, hi) near ``lo + fraction * (hi - lo)`` that no vertex takes.
        """
        target = lo + fraction * (hi - lo)
        levels = sorted({x for x in self.plain_values if lo < x < hi} | {lo, hi})
        if target not in levels:
            return target
        upper = levels[bisect_right(levels, target)]
        return (target + upper) / 2.0


class Crossing(NamedTuple):
    face: int
    entry: tuple
    exit: tuple


@dataclass(frozen=True, eq=False)
class LevelCurve:
    """
    Closed regular level curve, stored as the cyclic list of triangles it
    passes through. ``points[edge]`` is the crossing parameter measured from
    the lower vertex index of ``edge``.
    """

    value: float
    crossings: tuple
    points: dict

    @property
    def edges(self):
        return tuple(c.entry for c in self.crossings)

    @property
    def faces(self):
        return tuple(c.face for c in self.crossings)

    def __len__(self):
        return len(self.crossings)

    def reversed(self):
        """The same curve walked the other way, still starting on its first edge."""
        records = tuple(Crossing(c.face, c.exit, c.entry) for c in reversed(self.crossings))
        return LevelCurve(value=self.value, crossings=records, points=self.points)


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------


def validate_field(mesh: SurfaceMesh, values) -> MorseField:
    """
    Check the PL analogue of a class-F function and classify critical vertices.

    Raises:
        FieldSizeMismatch, NonConstantBoundary, EqualAdjacentInteriorValues,
        PlateauFace, CriticalOnBoundary
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_vertices,):
        raise FieldSizeMismatch(
            f"expected {mesh.n_vertices} values, got {values.size}"
        )
    if not np.all(np.isfinite(values)):
        raise FieldError("field values must be finite")
    values = values.copy()
    values.flags.writeable = False

    boundary_levels = []
    for index, cycle in enumerate(mesh.boundary_cycles):
        levels = values[list(cycle)]
        if np.ptp(levels) != 0.0:
            raise NonConstantBoundary(
                f"boundary cycle {index} takes values from {levels.min()} to {levels.max()}",
                details={"cycle": index, "vertices": list(cycle)},
            )
        boundary_levels.append(float(levels[0]))

    plain = values.tolist()
    cycle_of = mesh.boundary_cycle_of_vertex
    for u, v in mesh.edge_faces:
        if plain[u] != plain[v]:
            continue
        same_cycle = u in cycle_of and cycle_of.get(u) == cycle_of.get(v)
        if not same_cycle:
            raise EqualAdjacentInteriorValues(
                f"edge ({u}, {v}) joins two vertices with value {plain[u]}",
                details={"edge": [u, v]},
            )

    for f, (a, b, c) in enumerate(mesh.faces):
        if plain[a] == plain[b] == plain[c]:
            raise PlateauFace(f"face {f} is flat at value {plain[a]}", details={"face": f})

    critical = []
    for v, link in enumerate(mesh.links):
        fv = values[v]
        if not link.closed:
            inner = values[list(link.neighbors[1:-1])]
            if not (np.all(inner > fv) or np.all(inner < fv)):
                raise CriticalOnBoundary(
                    f"boundary vertex {v} has neighbours on both sides of its level",
                    details={"vertex": v},
                )
            continue
        kind = classify_vertex(plain, v, link.neighbors)
        if kind is not None:
            critical.append((v, kind))

    field = MorseField(
        mesh=mesh,
        values=values,
        critical_vertices=tuple(critical),
        boundary_levels=tuple(boundary_levels),
    )
    logger.debug(
        f"field validated: {len(critical)} critical vertices, "
        f"{len(boundary_levels)} boundary levels"
    )
    return field


def classify_vertex(values, v, ring):
    """Kind of an interior vertex from its ordered link, or None when regular."""
    signs = [values[u] > values[v] for u in ring]
    changes = sum(1 for i in range(len(signs)) if signs[i] != signs[i - 1])
    if changes == 0:
        return MIN if signs[0] else MAX
    if changes == 2:
        return None
    return saddle(changes // 2 - 1)


def critical_values(field: MorseField):
    found = {field.value(v) for v, _ in field.critical_vertices}
    found.update(field.boundary_levels)
    return sorted(found)


def index_sum(field: MorseField, component=None):
    """Sum of +1 per extremum and -k per Saddle(k), optionally on one component."""
    total = 0
    for v, kind in field.critical_vertices:
        if component is None or field.mesh.vertex_component[v] == component:
            total += kind.index
    return total


# ----------------------------------------------------------------------
# level sets
# ----------------------------------------------------------------------


def crossing_parameter(values, edge, level):
    u, v = edge
    return (level - values[u]) / (values[v] - values[u])


def crossed_edges(field: MorseField, level):
    values = field.plain_values
    return [
        (u, v)
        for u, v in field.mesh.edge_faces
        if min(values[u], values[v]) < level < max(values[u], values[v])
    ]


def level_curves(field: MorseField, level) -> list:
    """
    All closed curves of ``f^-1(level)`` for a value no vertex takes.

    Curves are ordered by their least crossed edge; each starts on that edge
    and first enters its lower-numbered triangle.
    """
    if np.any(field.values == level):
        raise CurveTouchesVertex(f"level {level} passes through a vertex")
    mesh = field.mesh
    values = field.plain_values

    crossed = crossed_edges(field, level)
    crossed_set = set(crossed)
    face_edges = {}
    for edge in crossed:
        for f in mesh.edge_faces[edge]:
            face_edges.setdefault(f, []).append(edge)

    curves = []
    visited = set()
    for start in crossed:
        if start in visited:
            continue
        records = []
        edge, face = start, min(mesh.edge_faces[start])
        while True:
            visited.add(edge)
            first, second = face_edges[face]
            out = second if first == edge else first
            records.append(Crossing(face, edge, out))
            faces = mesh.edge_faces[out]
            face = faces[0] if faces[1] == face else faces[1]
            edge = out
            if edge == start:
                break
        points = {
            e: crossing_parameter(values, e, level) for e in (r.entry for r in records)
        }
        curves.append(LevelCurve(value=float(level), crossings=tuple(records), points=points))
    assert visited == crossed_set
    return curves


def curve_field_values(field: MorseField, curve: LevelCurve):
    """Field values on the mesh produced by cutting along ``curve``."""
    extra = np.full(2 * len(curve), curve.value)
    return np.concatenate([np.asarray(field.values, dtype=float), extra])


def level_components(field: MorseField, level):
    """
    Connected components of ``f^-1(level)``, possibly through vertices.

    Elements are ``("v", vertex)`` for vertices at the level and
    ``("e", edge)`` for edges crossed in their interior. Returns a list of
    frozensets ordered by least element.
    """
    values = field.plain_values
    mesh = field.mesh
    uf = UnionFind()
    for f, face in enumerate(mesh.faces):
        members = [("v", v) for v in face if values[v] == level]
        for i in range(3):
            edge = edge_key(face[i], face[(i + 1) % 3])
            if min(values[edge[0]], values[edge[1]]) < level < max(values[edge[0]], values[edge[1]]):
                members.append(("e", edge))
        if members:
            uf.union(*members)
    return sorted((frozenset(group) for group in uf.to_sets()), key=min)


def slab_labels(field: MorseField, lo, hi):
    """
    Label every vertex and edge meeting ``f^-1[lo, hi]`` by the connected
    component of that slab it lies in.

    Returns a dict from ``("v", vertex)`` / ``("e", edge)`` to a component
    number; numbers follow the least element of each component.
    """
    values = field.plain_values
    mesh = field.mesh
    uf = UnionFind()
    for face in mesh.faces:
        members = []
        for i in range(3):
            u, v = face[i], face[(i + 1) % 3]
            if lo <= values[u] <= hi:
                members.append(("v", u))
            if min(values[u], values[v]) <= hi and max(values[u], values[v]) >= lo:
                members.append(("e", edge_key(u, v)))
        if members:
            uf.union(*members)
    groups = sorted((sorted(group) for group in uf.to_sets()), key=lambda g: g[0])
    return {element: label for label, group in enumerate(groups) for element in group}


def curve_element(curve: LevelCurve):
    return ("e", curve.crossings[0].entry)
